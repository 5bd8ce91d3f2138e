//! Triangular table of exact marginal distributions `f_N(n;x)`, their CDFs
//! `F_N(n;x)` and the gap probabilities `E_N(n−1;(x,b))` for
//! `1 ≤ n ≤ N ≤ N*`.
//!
//! Cell `(N, n)` is obtained by sweeping the gap probability
//! `E_{N−1}(n−1) = F_{N−1}(n) − F_{N−1}(n−1)` through the recurrence, then
//! normalizing so that the density integrates to one. Constants from the
//! joint density never have to be tracked.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::{full_sweep, RecurrenceParams, SweepFamily};
use crate::scalar::{fmt_q, frac, is_half_odd, q, q_to_rational, qi, ExactScalar, Q};
use crate::symfunc::{Expansion, JacobiExpansion, LaguerreExpansion};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Laguerre,
    Jacobi,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Laguerre => "laguerre",
            Family::Jacobi => "jacobi",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Laguerre with `λ₁ ∈ ℤ≥0`.
    IntegerLambda,
    /// Laguerre with `λ₁ + 1/2 ∈ ℤ≥0` and odd `β`.
    HalfIntegerLambda,
    /// Jacobi with `λ₂ ∈ ℤ≥0`.
    JacobiRouteA,
    /// Jacobi with `λ₁ ∈ ℤ≥0`: computed under `λ₁ ↔ λ₂` and reflected.
    JacobiRouteB,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::IntegerLambda => "integer-lambda",
            Regime::HalfIntegerLambda => "half-integer-lambda",
            Regime::JacobiRouteA => "jacobi-route-a",
            Regime::JacobiRouteB => "jacobi-route-b",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EnsembleSpec {
    pub family: Family,
    pub beta: u32,
    pub lambda1: Q,
    /// Zero for the Laguerre family.
    pub lambda2: Q,
    pub regime: Regime,
}

fn is_nonneg_int(v: Q) -> bool {
    v.is_integer() && v >= Q::zero()
}

impl EnsembleSpec {
    pub fn laguerre(beta: u32, lambda1: Q) -> Result<Self> {
        if beta == 0 {
            return Err(Error::Invalid("beta must be a positive integer".into()));
        }
        if lambda1 <= qi(-1) {
            return Err(Error::Invalid("lambda1 must exceed -1".into()));
        }
        let regime = if is_nonneg_int(lambda1) {
            Regime::IntegerLambda
        } else if is_half_odd(lambda1) && beta % 2 == 1 {
            Regime::HalfIntegerLambda
        } else {
            return Err(Error::RegimeUnsupported(format!(
                "Laguerre with beta={beta}, lambda1={}: need lambda1 a non-negative integer, \
                 or lambda1+1/2 a non-negative integer with beta odd",
                fmt_q(lambda1)
            )));
        };
        Ok(Self { family: Family::Laguerre, beta, lambda1, lambda2: Q::zero(), regime })
    }

    pub fn jacobi(beta: u32, lambda1: Q, lambda2: Q) -> Result<Self> {
        if beta == 0 {
            return Err(Error::Invalid("beta must be a positive integer".into()));
        }
        if lambda1 <= qi(-1) || lambda2 <= qi(-1) {
            return Err(Error::Invalid("lambda1 and lambda2 must exceed -1".into()));
        }
        let regime = if is_nonneg_int(lambda2) {
            Regime::JacobiRouteA
        } else if is_nonneg_int(lambda1) {
            Regime::JacobiRouteB
        } else {
            return Err(Error::RegimeUnsupported(format!(
                "Jacobi with lambda1={}, lambda2={}: need one of them a non-negative integer",
                fmt_q(lambda1),
                fmt_q(lambda2)
            )));
        };
        Ok(Self { family: Family::Jacobi, beta, lambda1, lambda2, regime })
    }

    fn swapped(&self) -> Self {
        Self {
            lambda1: self.lambda2,
            lambda2: self.lambda1,
            regime: Regime::JacobiRouteA,
            ..*self
        }
    }

    fn params(&self, n_vars: u32) -> RecurrenceParams {
        RecurrenceParams::new(n_vars, self.beta, self.lambda1, self.lambda2)
    }

    /// Right end `b'` of the inequality-check grid.
    pub fn grid_extent(&self, big_n: u32) -> Q {
        match self.family {
            Family::Jacobi => qi(1),
            Family::Laguerre => Q::new(4 * i64::from(big_n), i64::from(self.beta)),
        }
    }

    /// Points `k·b'/21` for `k = 1..20`.
    pub fn check_grid(&self, big_n: u32) -> Vec<Q> {
        let b = self.grid_extent(big_n);
        (1..=20).map(|k| b * Q::new(k, 21)).collect()
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} beta={} lambda1={}", self.family, self.beta, fmt_q(self.lambda1))?;
        if self.family == Family::Jacobi {
            write!(f, " lambda2={}", fmt_q(self.lambda2))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// Fix `n`, grow `N`.
    #[default]
    RowMajor,
    /// Smallest eigenvalue first: `f_N(N)`, then `f_N(N−1)`, ...
    Antidiagonal,
    /// Level by level in `N`, cells of a level in parallel.
    Wavefront,
}

/// One table entry.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell<E> {
    pub f: E,
    pub big_f: E,
}

/// Persistent storage for computed cells.
pub trait CellStore<E>: Sync {
    fn load(&self, spec: &EnsembleSpec, big_n: u32, n: u32) -> Option<Cell<E>>;
    fn store(&self, spec: &EnsembleSpec, big_n: u32, n: u32, cell: &Cell<E>);
}

/// Expansion families that carry an ensemble.
pub trait Marginal: SweepFamily + fmt::Display + 'static {
    fn weight(spec: &EnsembleSpec) -> Self;
}

impl Marginal for LaguerreExpansion {
    fn weight(spec: &EnsembleSpec) -> Self {
        LaguerreExpansion::term(ExactScalar::one(), spec.lambda1, Q::new(spec.beta.into(), 2))
    }
}

impl Marginal for JacobiExpansion {
    fn weight(spec: &EnsembleSpec) -> Self {
        JacobiExpansion::term(ExactScalar::one(), spec.lambda1, spec.lambda2)
    }
}

/// Divide by the total mass so the result integrates to one.
pub fn normalize<E: Expansion>(raw: &E) -> Result<E> {
    let total = raw.integrate_from_zero()?.limit_at_endpoint()?;
    if total.is_zero() {
        return Err(Error::ZeroIntegral);
    }
    let inv = total.inv().ok_or_else(|| {
        Error::Unsupported(format!("normalizing constant {total} mixes powers of pi"))
    })?;
    Ok(raw.scale(&inv))
}

#[derive(Clone, Debug)]
pub struct MarginalTable<E> {
    pub spec: EnsembleSpec,
    pub nmax: u32,
    cells: BTreeMap<(u32, u32), Cell<E>>,
    pub warnings: Vec<String>,
}

impl<E: Marginal> PartialEq for MarginalTable<E> {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.nmax == other.nmax && self.cells == other.cells
    }
}

impl<E: Marginal> MarginalTable<E> {
    pub fn cell(&self, big_n: u32, n: u32) -> &Cell<E> {
        self.cells
            .get(&(big_n, n))
            .unwrap_or_else(|| panic!("cell ({big_n}, {n}) not computed"))
    }

    pub fn f(&self, big_n: u32, n: u32) -> &E {
        &self.cell(big_n, n).f
    }

    /// `F_N(n;x)` with `F_N(0) = 0` and `F_N(N+1) = 1`.
    pub fn big_f(&self, big_n: u32, n: u32) -> E {
        if n == 0 {
            E::zero()
        } else if n == big_n + 1 {
            E::constant(ExactScalar::one())
        } else {
            self.cell(big_n, n).big_f.clone()
        }
    }

    /// `E_N(k;(x,b)) = F_N(k+1) − F_N(k)`, `0 ≤ k ≤ N`.
    pub fn gap(&self, big_n: u32, k: u32) -> E {
        self.big_f(big_n, k + 1).sub(&self.big_f(big_n, k))
    }

    pub fn cells(&self) -> impl Iterator<Item = ((u32, u32), &Cell<E>)> {
        self.cells.iter().map(|(k, v)| (*k, v))
    }

    /// `Σ_n f_N(n;x)`, the eigenvalue density.
    pub fn density(&self, big_n: u32) -> E {
        (1..=big_n).fold(E::zero(), |acc, n| acc.add(self.f(big_n, n)))
    }

    /// `f'_N(n;x) = f_N(N+1−n; 1−x)` applied to every cell.
    fn reflected(self, spec: EnsembleSpec) -> Result<MarginalTable<JacobiExpansion>>
    where
        E: IsJacobi,
    {
        let mut cells = BTreeMap::new();
        for big_n in 1..=self.nmax {
            for n in 1..=big_n {
                let src = self.f(big_n, big_n + 1 - n).as_jacobi();
                let f = src.reflect();
                let big_f = f
                    .integrate_from_zero()
                    .map_err(|e| in_cell(big_n, n, e))?;
                cells.insert((big_n, n), Cell { f, big_f });
            }
        }
        Ok(MarginalTable { spec, nmax: self.nmax, cells, warnings: self.warnings })
    }
}

#[doc(hidden)]
pub trait IsJacobi {
    fn as_jacobi(&self) -> &JacobiExpansion;
}

impl IsJacobi for JacobiExpansion {
    fn as_jacobi(&self) -> &JacobiExpansion {
        self
    }
}

fn in_cell(big_n: u32, n: u32, e: Error) -> Error {
    match e {
        Error::InCell { .. } => e,
        e => Error::InCell { big_n, n, source: Box::new(e) },
    }
}

fn compute_cell<E: Marginal>(
    spec: &EnsembleSpec,
    cells: &BTreeMap<(u32, u32), Cell<E>>,
    big_n: u32,
    n: u32,
    store: Option<&dyn CellStore<E>>,
) -> Result<Cell<E>> {
    if let Some(cached) = store.and_then(|s| s.load(spec, big_n, n)) {
        return Ok(cached);
    }
    let f = if big_n == 1 {
        normalize(&E::weight(spec))?
    } else {
        let prev = big_n - 1;
        let upper = if n == big_n {
            E::constant(ExactScalar::one())
        } else {
            cells[&(prev, n)].big_f.clone()
        };
        let lower = if n == 1 { E::zero() } else { cells[&(prev, n - 1)].big_f.clone() };
        let seed = upper.sub(&lower);
        normalize(&full_sweep(&seed, &spec.params(prev)))?
    };
    let big_f = f.integrate_from_zero()?;
    if matches!(spec.regime, Regime::IntegerLambda | Regime::JacobiRouteA | Regime::JacobiRouteB) {
        assert!(f.is_rational(), "integer regime left the rational component");
    }
    let cell = Cell { f, big_f };
    if let Some(s) = store {
        s.store(spec, big_n, n, &cell);
    }
    Ok(cell)
}

fn schedule(nmax: u32, ordering: Ordering) -> Vec<Vec<(u32, u32)>> {
    match ordering {
        Ordering::RowMajor => (1..=nmax)
            .flat_map(|n| (n..=nmax).map(move |big_n| vec![(big_n, n)]))
            .collect(),
        Ordering::Antidiagonal => (0..nmax)
            .flat_map(|d| (d + 1..=nmax).map(move |big_n| vec![(big_n, big_n - d)]))
            .collect(),
        Ordering::Wavefront => (1..=nmax)
            .map(|big_n| (1..=big_n).map(|n| (big_n, n)).collect())
            .collect(),
    }
}

fn compute_direct<E: Marginal>(
    spec: EnsembleSpec,
    nmax: u32,
    ordering: Ordering,
    store: Option<&dyn CellStore<E>>,
) -> Result<MarginalTable<E>> {
    let mut cells: BTreeMap<(u32, u32), Cell<E>> = BTreeMap::new();
    for level in schedule(nmax, ordering) {
        let done: Vec<((u32, u32), Result<Cell<E>>)> = if level.len() > 1 {
            level
                .par_iter()
                .map(|&(big_n, n)| ((big_n, n), compute_cell(&spec, &cells, big_n, n, store)))
                .collect()
        } else {
            level
                .iter()
                .map(|&(big_n, n)| ((big_n, n), compute_cell(&spec, &cells, big_n, n, store)))
                .collect()
        };
        for ((big_n, n), cell) in done {
            cells.insert((big_n, n), cell.map_err(|e| in_cell(big_n, n, e))?);
        }
    }
    let mut table = MarginalTable { spec, nmax, cells, warnings: Vec::new() };
    table.warnings = structure_warnings(&table);
    Ok(table)
}

/// Laguerre table for a Laguerre spec.
pub fn compute_laguerre(
    spec: EnsembleSpec,
    nmax: u32,
    ordering: Ordering,
    store: Option<&dyn CellStore<LaguerreExpansion>>,
) -> Result<MarginalTable<LaguerreExpansion>> {
    assert_eq!(spec.family, Family::Laguerre);
    assert!(nmax >= 1);
    compute_direct(spec, nmax, ordering, store)
}

/// Jacobi table; route B is computed under `λ₁ ↔ λ₂` and reflected.
pub fn compute_jacobi(
    spec: EnsembleSpec,
    nmax: u32,
    ordering: Ordering,
    store: Option<&dyn CellStore<JacobiExpansion>>,
) -> Result<MarginalTable<JacobiExpansion>> {
    assert_eq!(spec.family, Family::Jacobi);
    assert!(nmax >= 1);
    match spec.regime {
        Regime::JacobiRouteA => compute_direct(spec, nmax, ordering, store),
        Regime::JacobiRouteB => {
            compute_direct(spec.swapped(), nmax, ordering, store)?.reflected(spec)
        }
        _ => unreachable!(),
    }
}

/// Table for either family.
#[derive(Clone, Debug, PartialEq)]
pub enum Table {
    Laguerre(MarginalTable<LaguerreExpansion>),
    Jacobi(MarginalTable<JacobiExpansion>),
}

/// Optional cell stores for both families.
#[derive(Clone, Copy, Default)]
pub struct Stores<'a> {
    pub laguerre: Option<&'a dyn CellStore<LaguerreExpansion>>,
    pub jacobi: Option<&'a dyn CellStore<JacobiExpansion>>,
}

pub fn compute_table(spec: EnsembleSpec, nmax: u32, ordering: Ordering) -> Result<Table> {
    compute_table_with(spec, nmax, ordering, Stores::default())
}

pub fn compute_table_with(
    spec: EnsembleSpec,
    nmax: u32,
    ordering: Ordering,
    stores: Stores<'_>,
) -> Result<Table> {
    Ok(match spec.family {
        Family::Laguerre => Table::Laguerre(compute_laguerre(spec, nmax, ordering, stores.laguerre)?),
        Family::Jacobi => Table::Jacobi(compute_jacobi(spec, nmax, ordering, stores.jacobi)?),
    })
}

impl Table {
    pub fn spec(&self) -> &EnsembleSpec {
        match self {
            Table::Laguerre(t) => &t.spec,
            Table::Jacobi(t) => &t.spec,
        }
    }

    pub fn nmax(&self) -> u32 {
        match self {
            Table::Laguerre(t) => t.nmax,
            Table::Jacobi(t) => t.nmax,
        }
    }

    pub fn warnings(&self) -> &[String] {
        match self {
            Table::Laguerre(t) => &t.warnings,
            Table::Jacobi(t) => &t.warnings,
        }
    }

    /// `E_N(k;(x0,b))` at a rational point.
    pub fn gap_value(&self, big_n: u32, k: u32, x0: &Rational, digits: u32) -> Float {
        match self {
            Table::Laguerre(t) => t.gap(big_n, k).eval(x0, digits),
            Table::Jacobi(t) => t.gap(big_n, k).eval(x0, digits),
        }
    }

    pub fn cdf_value(&self, big_n: u32, n: u32, x0: &Rational, digits: u32) -> Float {
        match self {
            Table::Laguerre(t) => t.big_f(big_n, n).eval(x0, digits),
            Table::Jacobi(t) => t.big_f(big_n, n).eval(x0, digits),
        }
    }

    pub fn pdf_value(&self, big_n: u32, n: u32, x0: &Rational, digits: u32) -> Float {
        match self {
            Table::Laguerre(t) => t.f(big_n, n).eval(x0, digits),
            Table::Jacobi(t) => t.f(big_n, n).eval(x0, digits),
        }
    }

    pub fn cdf_f64(&self, big_n: u32, n: u32, x: f64) -> f64 {
        match self {
            Table::Laguerre(t) => t.big_f(big_n, n).eval_f64(x),
            Table::Jacobi(t) => t.big_f(big_n, n).eval_f64(x),
        }
    }

    pub fn check(&self) -> Vec<String> {
        match self {
            Table::Laguerre(t) => check_table(t),
            Table::Jacobi(t) => check_table(t),
        }
    }
}

fn structure_warnings<E: Marginal>(table: &MarginalTable<E>) -> Vec<String> {
    let mut out = Vec::new();
    let any: &dyn std::any::Any = table;
    if let Some(t) = any.downcast_ref::<MarginalTable<LaguerreExpansion>>() {
        if t.spec.regime == Regime::HalfIntegerLambda {
            let expected = Q::new(t.spec.beta.into(), 2);
            for ((big_n, n), cell) in t.cells() {
                for u in cell.big_f.erf_rates() {
                    if u != expected {
                        out.push(format!(
                            "F_{big_n}({n}) keeps an erf(sqrt({} x)) term",
                            fmt_q(u)
                        ));
                    }
                }
                if t.spec.beta == 1 && n == 1 {
                    if let Err(msg) = check_largest_shape(&cell.big_f, big_n) {
                        out.push(format!("F_{big_n}(1) deviates from the expected shape: {msg}"));
                    }
                }
            }
        }
    }
    out
}

/// Shape of `F_N(1;x)` for `β = 1`, `λ₁ + 1/2 ∈ ℤ≥0`: for odd `N`
/// `Σ_l √x e^{−(2l−1)x/2} p_{l,1} + erf(√(x/2)) e^{−(l−1)x} p_{l,2}`, for even
/// `N` `Σ_l e^{−(l−1)x} p_{l,1} + √x erf(√(x/2)) e^{−(l−1/2)x} p_{l,2}`.
pub fn check_largest_shape(big_f: &LaguerreExpansion, big_n: u32) -> std::result::Result<(), String> {
    let odd = big_n % 2 == 1;
    for (k, _) in big_f.terms() {
        let half_a = is_half_odd(k.a) && k.a > Q::zero();
        let int_a = k.a.is_integer() && k.a >= Q::zero();
        let half_s = is_half_odd(k.s);
        let int_s = k.s.is_integer() && k.s >= Q::zero();
        let ok = if k.erf {
            k.u == q(1, 2) && if odd { int_a && int_s } else { half_a && half_s }
        } else if odd {
            half_a && half_s
        } else {
            int_a && int_s
        };
        if !ok {
            return Err(format!("unexpected term {k}"));
        }
    }
    Ok(())
}

/// Split `F_N(1;x)` into the polynomials `p_{l,1}`, `p_{l,2}` of the shapes
/// described in [`check_largest_shape`]. Keys are `(l, slot)`; each value is
/// the coefficient list in increasing powers of `x` (after removing the
/// common `√x` where present).
pub fn largest_shape_polynomials(
    big_f: &LaguerreExpansion,
    big_n: u32,
) -> std::result::Result<BTreeMap<(u32, u32), Vec<ExactScalar>>, String> {
    check_largest_shape(big_f, big_n)?;
    let odd = big_n % 2 == 1;
    let mut out: BTreeMap<(u32, u32), Vec<ExactScalar>> = BTreeMap::new();
    for (k, c) in big_f.terms() {
        let slot = if k.erf { 2 } else { 1 };
        // exponent rate → l
        let l = if (slot == 1) == odd {
            (k.s + q(1, 2)).to_integer() as u32
        } else {
            (k.s + 1).to_integer() as u32
        };
        let deg = if (slot == 1) == odd { k.a - q(1, 2) } else { k.a };
        let deg = deg.to_integer() as usize;
        let v = out.entry((l, slot)).or_default();
        if v.len() <= deg {
            v.resize(deg + 1, ExactScalar::zero());
        }
        v[deg] = c.clone();
    }
    Ok(out)
}

/// Degree bound and exponential structure of `f_N(n;x)` in the integer
/// Laguerre regime: only `e^{−βjx/2}` with `n ≤ j ≤ N` and polynomial
/// coefficients of degree at most `j(λ₁ + (N−j)β)`.
pub fn check_degree_bound(
    spec: &EnsembleSpec,
    f: &LaguerreExpansion,
    big_n: u32,
    n: u32,
) -> std::result::Result<(), String> {
    let hb = Q::new(spec.beta.into(), 2);
    for (k, _) in f.terms() {
        if k.erf || !(k.a.is_integer() && k.a >= Q::zero()) {
            return Err(format!("term {k} outside the polynomial-exponential basis"));
        }
        let j = k.s / hb;
        if !j.is_integer() {
            return Err(format!("rate {} is not a multiple of beta/2", fmt_q(k.s)));
        }
        let j = j.to_integer();
        if j < i64::from(n) || j > i64::from(big_n) {
            return Err(format!("exponential index j={j} outside [{n}, {big_n}]"));
        }
        let bound = qi(j) * (spec.lambda1 + qi(big_n as i64 - j) * i64::from(spec.beta));
        if k.a > bound {
            return Err(format!(
                "degree {} exceeds bound {} for j={j}",
                fmt_q(k.a),
                fmt_q(bound)
            ));
        }
    }
    Ok(())
}

/// For even `β` the density is a single weight factor times a polynomial:
/// `e^{−βx/2}·poly` (Laguerre) or `(1−x)^{λ₂}·poly` (Jacobi).
pub fn check_density_structure(table: &Table, big_n: u32) -> std::result::Result<(), String> {
    match table {
        Table::Laguerre(t) => {
            let rho = t.density(big_n);
            let hb = Q::new(t.spec.beta.into(), 2);
            for (k, _) in rho.terms() {
                if k.erf || k.s != hb || frac(k.a - t.spec.lambda1) != Q::zero() || k.a < t.spec.lambda1 {
                    return Err(format!("density term {k} breaks the single-exponential form"));
                }
            }
            Ok(())
        }
        Table::Jacobi(t) => {
            let rho = t.density(big_n);
            for (a, b, _) in rho.terms() {
                let ok_b = frac(b - t.spec.lambda2).is_zero() && b >= t.spec.lambda2;
                let ok_a = frac(a - t.spec.lambda1).is_zero() && a >= t.spec.lambda1;
                if !(ok_a && ok_b) {
                    return Err(format!(
                        "density term x^({})(1-x)^({}) breaks the weight-times-polynomial form",
                        fmt_q(a),
                        fmt_q(b)
                    ));
                }
            }
            Ok(())
        }
    }
}

/// Every invariant of a computed table; returns a list of violations.
pub fn check_table<E: Marginal>(table: &MarginalTable<E>) -> Vec<String> {
    const DIGITS: u32 = 30;
    let mut bad = Vec::new();
    let tol = Float::with_val(128, Float::with_val(128, 10u32).pow(-(DIGITS as i32 - 5)));
    let any: &dyn std::any::Any = table;
    for big_n in 1..=table.nmax {
        let grid: Vec<Rational> =
            table.spec.check_grid(big_n).into_iter().map(q_to_rational).collect();
        let mut prev_row: Option<Vec<Float>> = None;
        for n in 1..=big_n {
            let cell = table.cell(big_n, n);
            let tag = format!("(N={big_n}, n={n})");
            match cell.big_f.value_at_zero() {
                Ok(v) if v.is_zero() => {}
                other => bad.push(format!("{tag}: F(0) = {other:?}")),
            }
            match cell.big_f.limit_at_endpoint() {
                Ok(v) if v.is_one() => {}
                other => bad.push(format!("{tag}: F(endpoint) = {other:?}")),
            }
            let values: Vec<Float> = grid.iter().map(|x| cell.big_f.eval(x, DIGITS)).collect();
            for w in values.windows(2) {
                if Float::with_val(128, &w[1] - &w[0]) < -tol.clone() {
                    bad.push(format!("{tag}: F decreases on the grid"));
                    break;
                }
            }
            for v in &values {
                if *v < -tol.clone() || Float::with_val(128, v - 1u32) > tol {
                    bad.push(format!("{tag}: F outside [0, 1]"));
                    break;
                }
            }
            for x in &grid {
                if cell.f.eval(x, DIGITS) < -tol.clone() {
                    bad.push(format!("{tag}: f negative at {x}"));
                    break;
                }
            }
            if let Some(prev) = &prev_row {
                for (lo, hi) in prev.iter().zip(&values) {
                    if Float::with_val(128, hi - lo) < -tol.clone() {
                        bad.push(format!("{tag}: F_N(n-1) > F_N(n) somewhere on the grid"));
                        break;
                    }
                }
            }
            prev_row = Some(values);
            if let Some(t) = any.downcast_ref::<MarginalTable<LaguerreExpansion>>() {
                if t.spec.regime == Regime::IntegerLambda {
                    if let Err(e) = check_degree_bound(&t.spec, t.f(big_n, n), big_n, n) {
                        bad.push(format!("{tag}: {e}"));
                    }
                }
            }
        }
        if gap_sum(table, big_n) != E::constant(ExactScalar::one()) {
            bad.push(format!("N={big_n}: gap probabilities do not sum to 1"));
        }
        let mass = table.density(big_n).integrate_from_zero().and_then(|g| g.limit_at_endpoint());
        match mass {
            Ok(m) if m == ExactScalar::from_int(big_n.into()) => {}
            other => bad.push(format!("N={big_n}: density integrates to {other:?}")),
        }
    }
    bad
}

/// `Σ_k E_N(k)`; telescopes to one.
pub fn gap_sum<E: Marginal>(table: &MarginalTable<E>, big_n: u32) -> E {
    (0..=big_n).fold(E::zero(), |acc, k| acc.add(&table.gap(big_n, k)))
}
