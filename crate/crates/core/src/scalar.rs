//! Exact coefficient arithmetic.
//!
//! Every coefficient that shows up in the closed forms is a finite sum
//! `Σ r · π^(k/2) · √d` with `r` rational, `k` an integer and `d` a square-free
//! positive integer. The powers of `√π` come from half-integer Γ values and
//! from differentiating `erf`; the `√d` factors come from rescaling
//! `erf(√(s x))` for rational rates `s`. Since `√π` is transcendental and the
//! square roots of distinct square-free integers are linearly independent over
//! the rationals, the sorted term list below is a canonical form and equality
//! is structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Small exact rational used for exponents, decay rates and breakpoints.
pub type Q = Ratio<i64>;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(num, den)
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn q_to_rational(v: Q) -> Rational {
    Rational::from((*v.numer(), *v.denom()))
}

pub fn rational_to_q(r: &Rational) -> Option<Q> {
    let n = r.numer().to_i64()?;
    let d = r.denom().to_i64()?;
    Some(Q::new(n, d))
}

pub fn is_integer(v: Q) -> bool {
    v.is_integer()
}

/// True when `v` is an integer plus one half.
pub fn is_half_odd(v: Q) -> bool {
    *v.denom() == 2
}

/// Fractional part in `[0, 1)`.
pub fn frac(v: Q) -> Q {
    v - v.floor()
}

/// Parse `"p/q"`, `"p"` or a terminating decimal such as `"-0.5"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) || fp.len() > 12 {
            return Err(bad());
        }
        let whole: i64 = if ip_abs.is_empty() { 0 } else { ip_abs.parse().map_err(|_| bad())? };
        let scale = 10i64.pow(fp.len() as u32);
        let part: i64 = fp.parse().map_err(|_| bad())?;
        let v = Q::new(whole * scale + part, scale);
        return Ok(if neg { -v } else { v });
    }
    s.parse::<i64>().map(Q::from_integer).map_err(|_| bad())
}

pub fn fmt_q(v: Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Binary precision used for `digits` significant decimal digits, with a few
/// guard bits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

/// One basis element `π^(pi_half/2) · √root`, `root` square-free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Radical {
    pub pi_half: i32,
    pub root: u64,
}

impl Radical {
    pub const ONE: Radical = Radical { pi_half: 0, root: 1 };

    /// Product of two basis elements as `(rational factor, basis element)`.
    fn mul(self, other: Radical) -> (u64, Radical) {
        let g = num_integer::gcd(self.root, other.root);
        let root = (self.root / g)
            .checked_mul(other.root / g)
            .expect("radicand overflow");
        (
            g,
            Radical {
                pi_half: self.pi_half + other.pi_half,
                root,
            },
        )
    }
}

/// Exact scalar `Σ r_k · π^(k/2) · √d_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    // sorted by basis element, no zero coefficients
    terms: Vec<(Radical, Rational)>,
}

impl ExactScalar {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::from(1))
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::monomial(r, Radical::ONE)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from(n))
    }

    pub fn from_q(v: Q) -> Self {
        Self::from_rational(q_to_rational(v))
    }

    pub fn monomial(r: Rational, basis: Radical) -> Self {
        if r.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(basis, r)] }
        }
    }

    /// `π^(k/2)`.
    pub fn pi_pow_half(k: i32) -> Self {
        Self::monomial(Rational::from(1), Radical { pi_half: k, root: 1 })
    }

    /// Exact square root of a non-negative rational.
    pub fn sqrt_rational(r: &Rational) -> Self {
        assert!(*r >= 0, "square root of a negative rational");
        if r.is_zero() {
            return Self::zero();
        }
        // √(n/d) = √(n d) / d
        let nd = Integer::from(r.numer() * r.denom());
        let (sq, rest) = squarefree_split(&nd);
        let root = rest.to_u64().expect("radicand overflow");
        Self::monomial(Rational::from((sq, r.denom().clone())), Radical { pi_half: 0, root })
    }

    /// `r^(k/2)` for `r > 0` (or `r = 0` with `k > 0`).
    pub fn pow_half(r: &Rational, k: i64) -> Self {
        if r.is_zero() {
            assert!(k > 0, "zero to a non-positive power");
            return Self::zero();
        }
        assert!(*r > 0, "half-integer power of a negative rational");
        let whole = k.div_euclid(2);
        let odd = k.rem_euclid(2) == 1;
        let base = rational_powi(r, whole);
        let out = Self::from_rational(base);
        if odd {
            &out * &Self::sqrt_rational(r)
        } else {
            out
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == Radical::ONE && self.terms[0].1 == 1
    }

    /// True when the value lies in the plain-rational component.
    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|(b, _)| *b == Radical::ONE)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::new()),
            [(b, r)] if *b == Radical::ONE => Some(r.clone()),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Radical, &Rational)> {
        self.terms.iter().map(|(b, r)| (b, r))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(b, c)| (*b, Rational::from(c * r)))
                .collect(),
        }
    }

    pub fn scale_q(&self, v: Q) -> Self {
        self.scale(&q_to_rational(v))
    }

    fn from_unsorted(mut raw: Vec<(Radical, Rational)>) -> Self {
        raw.sort_by_key(|a| a.0);
        let mut terms: Vec<(Radical, Rational)> = Vec::with_capacity(raw.len());
        for (b, r) in raw {
            match terms.last_mut() {
                Some((lb, lr)) if *lb == b => *lr += r,
                _ => terms.push((b, r)),
            }
        }
        terms.retain(|(_, r)| !r.is_zero());
        Self { terms }
    }

    /// Multiplicative inverse. Defined when all terms share one power of π;
    /// the algebraic part is inverted by successive conjugation over the
    /// primes that occur under the square roots.
    pub fn inv(&self) -> Option<Self> {
        let first = self.terms.first()?;
        let k = first.0.pi_half;
        if self.terms.iter().any(|(b, _)| b.pi_half != k) {
            return None;
        }
        let algebraic = Self::from_unsorted(
            self.terms
                .iter()
                .map(|(b, r)| (Radical { pi_half: 0, root: b.root }, r.clone()))
                .collect(),
        );
        Some(&invert_algebraic(&algebraic) * &Self::pi_pow_half(-k))
    }

    pub fn to_float(&self, prec: u32) -> Float {
        let mut acc = Float::with_val(prec, 0);
        if self.terms.is_empty() {
            return acc;
        }
        let sqrt_pi = Float::with_val(prec, Constant::Pi).sqrt();
        for (b, r) in &self.terms {
            let mut t = Float::with_val(prec, r);
            if b.pi_half != 0 {
                t *= Float::with_val(prec, (&sqrt_pi).pow(b.pi_half));
            }
            if b.root != 1 {
                t *= Float::with_val(prec, b.root).sqrt();
            }
            acc += t;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.to_float(80).to_f64()
    }

    /// Sign of the real value (evaluated numerically at generous precision).
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let v = self.to_float(512);
        v.partial_cmp(&0).unwrap_or(Ordering::Equal)
    }
}

fn rational_powi(r: &Rational, k: i64) -> Rational {
    let e = u32::try_from(k.unsigned_abs()).expect("exponent too large");
    let num = Integer::from(r.numer().pow(e));
    let den = Integer::from(r.denom().pow(e));
    if k >= 0 {
        Rational::from((num, den))
    } else {
        Rational::from((den, num))
    }
}

/// Rational `r^k` for integer `k`.
pub fn rational_pow(r: &Rational, k: i64) -> Rational {
    if k < 0 {
        assert!(!r.is_zero(), "zero to a negative power");
    }
    rational_powi(r, k)
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 2;
    }
    n
}

fn invert_algebraic(x: &ExactScalar) -> ExactScalar {
    // pick a prime dividing some radicand
    let prime = x
        .terms
        .iter()
        .find(|(b, _)| b.root != 1)
        .map(|(b, _)| smallest_prime_factor(b.root));
    let Some(p) = prime else {
        let r = x.to_rational().expect("rational part");
        return ExactScalar::from_rational(Rational::from(r.recip_ref()));
    };
    // x = A + B·√p with A, B free of √p
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (rad, r) in &x.terms {
        if rad.root % p == 0 {
            b.push((Radical { pi_half: 0, root: rad.root / p }, r.clone()));
        } else {
            a.push((*rad, r.clone()));
        }
    }
    let a = ExactScalar::from_unsorted(a);
    let b = ExactScalar::from_unsorted(b);
    let sqrt_p = ExactScalar::monomial(Rational::from(1), Radical { pi_half: 0, root: p });
    let norm = &(&a * &a) - &(&b * &b).scale(&Rational::from(p));
    let conj = &a - &(&b * &sqrt_p);
    &conj * &invert_algebraic(&norm)
}

/// Split `n > 0` as `s² · r` with `r` square-free.
pub fn squarefree_split(n: &Integer) -> (Integer, Integer) {
    assert!(*n > 0);
    let mut rem = n.clone();
    let mut s = Integer::from(1);
    let mut r = Integer::from(1);
    let mut p: u32 = 2;
    while p <= 1_000_000 {
        if Integer::from(p) * p > rem {
            break;
        }
        let mut e = 0u32;
        while rem.is_divisible_u(p) {
            rem.div_exact_u_mut(p);
            e += 1;
        }
        if e > 0 {
            s *= Integer::from(p).pow(e / 2);
            if e % 2 == 1 {
                r *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rem > 1 {
        if rem.is_perfect_square() {
            s *= rem.sqrt();
        } else {
            assert!(
                p <= 1_000_000 || rem < Integer::from(10u64).pow(12),
                "cannot certify square-free cofactor"
            );
            r *= rem;
        }
    }
    (s, r)
}

impl Zero for ExactScalar {
    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ExactScalar {
    fn one() -> Self {
        ExactScalar::one()
    }
}

impl Add<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < rhs.terms.len() {
            let ord = match (self.terms.get(i), rhs.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(rhs.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let sum = Rational::from(&self.terms[i].1 + &rhs.terms[j].1);
                    if !sum.is_zero() {
                        out.push((self.terms[i].0, sum));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        ExactScalar { terms: out }
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: ExactScalar) -> ExactScalar {
        &self + &rhs
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        if rhs.terms.len() == 1 {
            let (b, r) = &rhs.terms[0];
            match self.terms.binary_search_by(|t| t.0.cmp(b)) {
                Ok(i) => {
                    self.terms[i].1 += r;
                    if self.terms[i].1.is_zero() {
                        self.terms.remove(i);
                    }
                }
                Err(i) => self.terms.insert(i, (*b, r.clone())),
            }
            return;
        }
        *self = &*self + rhs;
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            terms: self
                .terms
                .iter()
                .map(|(b, r)| (*b, Rational::from(-r)))
                .collect(),
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(mut self) -> ExactScalar {
        for (_, r) in &mut self.terms {
            r.neg_assign_helper();
        }
        self
    }
}

trait NegAssignHelper {
    fn neg_assign_helper(&mut self);
}

impl NegAssignHelper for Rational {
    fn neg_assign_helper(&mut self) {
        let v = std::mem::take(self);
        *self = -v;
    }
}

impl Sub<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        self + &(-rhs)
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: ExactScalar) -> ExactScalar {
        &self - &rhs
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        *self += &(-rhs);
    }
}

impl Mul<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        if self.terms.len() == 1 && rhs.terms.len() == 1 {
            let (b1, r1) = &self.terms[0];
            let (b2, r2) = &rhs.terms[0];
            let (g, b) = b1.mul(*b2);
            let mut r = Rational::from(r1 * r2);
            if g != 1 {
                r *= g;
            }
            return ExactScalar::monomial(r, b);
        }
        let mut raw = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (b1, r1) in &self.terms {
            for (b2, r2) in &rhs.terms {
                let (g, b) = b1.mul(*b2);
                let mut r = Rational::from(r1 * r2);
                if g != 1 {
                    r *= g;
                }
                raw.push((b, r));
            }
        }
        ExactScalar::from_unsorted(raw)
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: ExactScalar) -> ExactScalar {
        &self * &rhs
    }
}

impl MulAssign<&ExactScalar> for ExactScalar {
    fn mul_assign(&mut self, rhs: &ExactScalar) {
        *self = &*self * rhs;
    }
}

impl From<Rational> for ExactScalar {
    fn from(r: Rational) -> Self {
        ExactScalar::from_rational(r)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::from_int(n)
    }
}

impl From<Q> for ExactScalar {
    fn from(v: Q) -> Self {
        ExactScalar::from_q(v)
    }
}

/// Tokens `num/den*pi^(k/2)`, with `*sqrt(d)` inserted before the π factor
/// when `d > 1`, joined by `" + "` in basis order. Zero prints as `0`.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, r)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}/{}", r.numer(), r.denom())?;
            if b.root != 1 {
                write!(f, "*sqrt({})", b.root)?;
            }
            write!(f, "*pi^({}/2)", b.pi_half)?;
        }
        Ok(())
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(ExactScalar::zero());
        }
        let bad = || Error::Parse(format!("not an exact scalar: {s:?}"));
        let mut raw = Vec::new();
        for token in s.split(" + ") {
            let mut parts = token.split('*');
            let coeff = parts.next().ok_or_else(bad)?;
            let r: Rational = coeff.parse().map_err(|_| bad())?;
            let mut basis = Radical::ONE;
            for p in parts {
                if let Some(inner) = p.strip_prefix("sqrt(").and_then(|x| x.strip_suffix(')')) {
                    basis.root = inner.parse().map_err(|_| bad())?;
                } else if let Some(inner) = p
                    .strip_prefix("pi^(")
                    .and_then(|x| x.strip_suffix("/2)"))
                {
                    basis.pi_half = inner.parse().map_err(|_| bad())?;
                } else {
                    return Err(bad());
                }
            }
            if basis.root == 0 {
                return Err(bad());
            }
            let (sq, rest) = squarefree_split(&Integer::from(basis.root));
            let r = r * Rational::from(sq);
            basis.root = rest.to_u64().ok_or_else(bad)?;
            raw.push((basis, r));
        }
        Ok(ExactScalar::from_unsorted(raw))
    }
}

/// `Γ(g)/Γ(g−k)` as the falling product `(g−1)(g−2)···(g−k)`.
pub fn gamma_ratio(g: &Rational, k: u32) -> Result<Rational> {
    if g.denom() == &1 {
        let gi = g.numer();
        if *gi <= 0 || Integer::from(gi - k) <= 0 {
            return Err(Error::GammaPole {
                g: g.to_string(),
                k,
            });
        }
    }
    let mut acc = Rational::from(1);
    for j in 1..=k {
        acc *= Rational::from(g - j);
    }
    Ok(acc)
}

/// `Γ(ν)` for a positive integer or half-integer `ν`.
pub fn gamma_exact(nu: Q) -> Result<ExactScalar> {
    if nu <= Q::zero() || !(nu.is_integer() || is_half_odd(nu)) {
        return Err(Error::Unsupported(format!("Gamma({}) is not an exact scalar", fmt_q(nu))));
    }
    if nu.is_integer() {
        let mut acc = Rational::from(1);
        for j in 1..nu.to_integer() {
            acc *= j;
        }
        Ok(ExactScalar::from_rational(acc))
    } else {
        // Γ(m + 1/2) = √π · (2m−1)!! / 2^m
        let m = (nu - q(1, 2)).to_integer();
        let r = gamma_ratio(&q_to_rational(nu), m as u32)?;
        Ok(&ExactScalar::from_rational(r) * &ExactScalar::pi_pow_half(1))
    }
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

/// `|v|` for exponents.
pub fn q_abs(v: Q) -> Q {
    v.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn es(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    #[test]
    fn mul_examples() {
        let inv_sqrt_pi = ExactScalar::pi_pow_half(-1);
        assert_eq!(&inv_sqrt_pi * &inv_sqrt_pi, ExactScalar::pi_pow_half(-2));

        let two_plus = &ExactScalar::from_int(2) + &ExactScalar::pi_pow_half(1);
        let prod = &two_plus * &ExactScalar::pi_pow_half(1);
        let expected = &ExactScalar::pi_pow_half(1).scale(&Rational::from(2))
            + &ExactScalar::pi_pow_half(2);
        assert_eq!(prod, expected);

        let z = &ExactScalar::from_q(q(3, 4)) * &ExactScalar::zero();
        assert!(z.is_zero());
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn gamma_ratio_examples() {
        assert_eq!(gamma_ratio(&Rational::from(5), 2).unwrap(), 12);
        assert_eq!(gamma_ratio(&Rational::from((7, 2)), 1).unwrap(), Rational::from((5, 2)));
        assert_eq!(gamma_ratio(&Rational::from(5), 0).unwrap(), 1);
        assert!(matches!(
            gamma_ratio(&Rational::from(3), 3),
            Err(Error::GammaPole { .. })
        ));
        assert!(gamma_ratio(&Rational::from(-1), 0).is_err());
    }

    #[test]
    fn sqrt_and_half_powers() {
        let s = ExactScalar::sqrt_rational(&Rational::from((1, 2)));
        assert_eq!(s.to_string(), "1/2*sqrt(2)*pi^(0/2)");
        assert_eq!(ExactScalar::sqrt_rational(&Rational::from(12)), es("2/1*sqrt(3)*pi^(0/2)"));
        let p = ExactScalar::pow_half(&Rational::from(2), 5);
        assert_eq!(p, es("4/1*sqrt(2)*pi^(0/2)"));
        let p = ExactScalar::pow_half(&Rational::from(2), -3);
        assert_eq!(p, es("1/4*sqrt(2)*pi^(0/2)"));
    }

    #[test]
    fn inverse_of_algebraic_combination() {
        // (1 + √2 + √3)⁻¹
        let x = es("1/1*pi^(0/2) + 1/1*sqrt(2)*pi^(0/2) + 1/1*sqrt(3)*pi^(0/2)");
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        let z = es("3/7*sqrt(6)*pi^(-1/2) + 2/1*pi^(-1/2)");
        assert!((&z * &z.inv().unwrap()).is_one());
        assert!(es("1/1*pi^(0/2) + 1/1*pi^(1/2)").inv().is_none());
    }

    #[test]
    fn gamma_exact_half_integers() {
        let g = gamma_exact(q(7, 2)).unwrap();
        assert_eq!(g, es("15/8*pi^(1/2)"));
        assert_eq!(gamma_exact(qi(5)).unwrap(), ExactScalar::from_int(24));
        let f = g.to_float(200);
        let r = Float::with_val(200, 3.5).gamma();
        assert!(Float::with_val(200, &f - &r).abs() < 1e-55);
    }

    #[test]
    fn float_conversion_precision() {
        let x = es("-3/7*sqrt(2)*pi^(-1/2) + 5/3*pi^(2/2)");
        for digits in [20u32, 50, 100] {
            let bits = digits_to_bits(digits);
            let v = x.to_float(bits);
            let reference = x.to_float(bits * 3);
            let err = Float::with_val(bits * 3, &v - &reference).abs();
            let bound = Float::with_val(bits * 3, reference.abs_ref())
                * Float::with_val(64, 10).pow(1 - digits as i32);
            assert!(err <= bound);
        }
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_q("-1/2").unwrap(), q(-1, 2));
        assert_eq!(parse_q("3").unwrap(), qi(3));
        assert_eq!(parse_q("0.75").unwrap(), q(3, 4));
        assert_eq!(parse_q("-0.5").unwrap(), q(-1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    fn small_scalar() -> impl Strategy<Value = ExactScalar> {
        prop::collection::vec((-3i32..=3, prop::sample::select(vec![1u64, 2, 3, 6]), -9i64..=9, 1i64..=5), 0..4)
            .prop_map(|ts| {
                let mut acc = ExactScalar::zero();
                for (k, d, n, den) in ts {
                    acc += &ExactScalar::monomial(
                        Rational::from((n, den)),
                        Radical { pi_half: k, root: d },
                    );
                }
                acc
            })
    }

    proptest! {
        #[test]
        fn field_axioms(a in small_scalar(), b in small_scalar(), c in small_scalar()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn display_round_trip(a in small_scalar()) {
            let back: ExactScalar = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn gamma_ratio_composes(gn in 1i64..40, gd in 1i64..4, k in 0u32..5, m in 0u32..5) {
            let g = Rational::from((gn, gd));
            let gk = Rational::from(&g - k);
            if let (Ok(a), Ok(b), Ok(c)) = (gamma_ratio(&g, k), gamma_ratio(&gk, m), gamma_ratio(&g, k + m)) {
                prop_assert_eq!(a * b, c);
            }
        }
    }
}
