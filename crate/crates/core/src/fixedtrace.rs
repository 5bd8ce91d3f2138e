//! Fixed-trace Laguerre marginals and the Landauer conductance density.
//!
//! With `y = 2s/β`, each term `c·y^a e^{−σy}` of `F_N(n;y)` divided by
//! `y^γ` inverts termwise:
//!
//! ```text
//! s^{−ν} e^{−qs}          →  (t−q)^{ν−1}/Γ(ν) · Θ(t−q),   ν = γ−a, q = 2σ/β
//! s^{−p−1/2} e^{−qs} erf(√s) →  g(p, q; t)
//! ```
//!
//! The result `h(t)` is, up to a constant, the density of the trace of the
//! Jacobi ensemble with `λ₂ = 0` (the conductance), and
//! `F^{fL}_N(n;x) ∝ x^{γ−1} h(1/x)`. Constants are fixed by normalization.

use num_traits::{One, Zero};
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::marginals::{compute_laguerre, CellStore, EnsembleSpec, Family, Ordering, Regime};
use crate::scalar::{binomial, factorial, fmt_q, gamma_exact, gamma_ratio, q, q_to_rational, qi, ExactScalar, Q};
use crate::symfunc::{LaguerreExpansion, PiecewisePower, PwTerm, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedTraceSpec {
    pub base: EnsembleSpec,
    pub big_n: u32,
    pub gamma: Q,
}

impl FixedTraceSpec {
    pub fn new(base: EnsembleSpec, big_n: u32) -> Result<Self> {
        if base.family != Family::Laguerre {
            return Err(Error::Unsupported("fixed trace is defined for the Laguerre family".into()));
        }
        let n = qi(big_n.into());
        let gamma = n * (base.lambda1 + Q::new(base.beta.into(), 2) * (n - 1) + 1);
        Ok(Self { base, big_n, gamma })
    }
}

/// `(2k−1)!!` with `(−1)!! = 1`.
fn odd_double_factorial(k: u32) -> Integer {
    (1..=k).fold(Integer::from(1), |acc, j| acc * (2 * j - 1))
}

/// `g(p, q; t)`, the inverse Laplace transform of `erf(√s) e^{−qs}/s^{p+1/2}`,
/// on the support `(0, hi)`.
pub fn g_function(p: u32, q0: Q, hi: Q) -> PiecewisePower {
    assert!(q0 >= Q::zero());
    let mut out = PiecewisePower::new(Q::zero(), hi);
    let inv_sqrt_pi = ExactScalar::pi_pow_half(-1);
    let dfp = odd_double_factorial(p);
    let q1 = q0 + 1;
    let above = |r: Q| if r.is_zero() { Step::Always } else { Step::Above(r) };
    for j in 1..=p {
        let c = Rational::from((
            (Integer::from(1) << j) * odd_double_factorial(p - j),
            factorial(p - j) * &dfp,
        ));
        let c = &ExactScalar::from_rational(c) * &inv_sqrt_pi;
        // (t−q)^{j−1} = Σ_m C(j−1, m) (t−q−1)^m
        for m in 0..j {
            let cm = &c * &ExactScalar::from_rational(Rational::from(binomial(j - 1, m)));
            let e = qi(i64::from(p - j + m));
            out.push(PwTerm::new(cm, Q::zero(), q1, 1, e, Step::Above(q1)));
        }
    }
    let c = &ExactScalar::from_rational(Rational::from((Integer::from(1) << p, dfp))) * &inv_sqrt_pi;
    let e = qi(p.into()) - q(1, 2);
    out.push(PwTerm::new(c.clone(), Q::zero(), q0, 1, e, above(q0)));
    out.push(PwTerm::new(-c, Q::zero(), q0, 1, e, Step::Above(q1)));
    out
}

/// `h(t)`: termwise inverse Laplace transform of `F(2s/β)/(2s/β)^γ`, times
/// `Γ(γ)`, on `(0, hi)`.
pub fn inverse_laplace(
    big_f: &LaguerreExpansion,
    beta: u32,
    gamma: Q,
    hi: Q,
) -> Result<PiecewisePower> {
    let two_over_beta = Q::new(2, beta.into());
    let g_gamma = gamma_exact(gamma)?;
    let mut out = PiecewisePower::new(Q::zero(), hi);
    for (k, c) in big_f.terms() {
        let scale = pow_q(two_over_beta, k.a)?;
        let shift = k.s * two_over_beta;
        if k.erf {
            if k.u * two_over_beta != Q::one() {
                return Err(Error::Unsupported(format!(
                    "erf(sqrt({} x)) does not map to erf(sqrt(s))",
                    fmt_q(k.u)
                )));
            }
            let p = gamma - k.a - q(1, 2);
            if !(p.is_integer() && p >= Q::zero()) {
                return Err(Error::Unsupported(format!(
                    "erf term {k} gives s^(-{}) which is not s^(-p-1/2)",
                    fmt_q(gamma - k.a)
                )));
            }
            let g = g_function(p.to_integer() as u32, shift, hi);
            out = out.add(&g.scale(&(&(c * &scale) * &g_gamma)));
        } else {
            let nu = gamma - k.a;
            if nu <= Q::zero() {
                return Err(Error::Unsupported(format!(
                    "term {k} has no ordinary inverse Laplace transform (order {})",
                    fmt_q(nu)
                )));
            }
            let ratio = if k.a.is_integer() && k.a >= Q::zero() {
                ExactScalar::from_rational(gamma_ratio(&q_to_rational(gamma), k.a.to_integer() as u32)?)
            } else {
                let inv = gamma_exact(nu)?
                    .inv()
                    .ok_or_else(|| Error::Unsupported("Gamma reciprocal".into()))?;
                &g_gamma * &inv
            };
            let coef = &(c * &scale) * &ratio;
            let step = if shift.is_zero() { Step::Always } else { Step::Above(shift) };
            out.push(PwTerm::new(coef, Q::zero(), shift, 1, nu - 1, step));
        }
    }
    Ok(out)
}

/// `v^a` for rational `v > 0` and integer or half-integer `a`.
fn pow_q(v: Q, a: Q) -> Result<ExactScalar> {
    if !(a.is_integer() || *a.denom() == 2) {
        return Err(Error::Unsupported(format!("power {} of a rational", fmt_q(a))));
    }
    Ok(ExactScalar::pow_half(&q_to_rational(v), (a * 2).to_integer()))
}

/// `x^{γ−1} h(1/x)` on `(0, 1)`.
pub fn reciprocal_substitution(h: &PiecewisePower, gamma: Q) -> Result<PiecewisePower> {
    let mut out = PiecewisePower::new(Q::zero(), qi(1));
    for t in &h.terms {
        // t^a → x^{−a}
        let mut a = -t.a;
        let mut c = t.c.clone();
        let (mut shift, mut sigma) = (Q::zero(), 1i8);
        if !t.e.is_zero() {
            // (σ(1/x − q))^e = x^{−e} (σ(1 − qx))^e = x^{−e} q^e (−σ(x − 1/q))^e
            a -= t.e;
            if !t.q.is_zero() {
                if t.q < Q::zero() {
                    return Err(Error::Unsupported("negative shift under t = 1/x".into()));
                }
                c = &c * &pow_q(t.q, t.e)?;
                shift = t.q.recip();
                sigma = -t.sigma;
            } else if t.sigma != 1 {
                return Err(Error::Unsupported("(−t)^e under t = 1/x".into()));
            }
        }
        let step = match t.step {
            Step::Always => Step::Always,
            Step::Above(r) if r.is_zero() => Step::Always,
            Step::Above(r) => Step::Below(r.recip()),
            Step::Below(r) if r > Q::zero() => Step::Above(r.recip()),
            Step::Below(_) => continue,
        };
        let e = if shift.is_zero() { Q::zero() } else { t.e };
        out.push(PwTerm::new(c, a + gamma - 1, shift, sigma, e, step));
    }
    Ok(out)
}

/// `F^{fL}_N(n;x)` on `(0, 1)` from the Laguerre CDF `F_N(n;·)`, normalized
/// so that its left limit at `x = 1` is one.
pub fn fixed_trace_cdf(big_f: &LaguerreExpansion, spec: &FixedTraceSpec) -> Result<PiecewisePower> {
    let h = inverse_laplace(big_f, spec.base.beta, spec.gamma, qi(1))?;
    let raw = reciprocal_substitution(&h, spec.gamma)?;
    let end = raw.left_limit(qi(1))?;
    if end.is_zero() {
        return Err(Error::ZeroIntegral);
    }
    let inv = end
        .inv()
        .ok_or_else(|| Error::Unsupported(format!("boundary value {end} mixes powers of pi")))?;
    Ok(raw.scale(&inv))
}

/// Fixed-trace CDFs `F^{fL}_N(n;x)` for `n = 1..N`.
pub fn fixed_trace_row(base: EnsembleSpec, big_n: u32) -> Result<Vec<PiecewisePower>> {
    fixed_trace_row_with(base, big_n, None)
}

pub fn fixed_trace_row_with(
    base: EnsembleSpec,
    big_n: u32,
    store: Option<&dyn CellStore<LaguerreExpansion>>,
) -> Result<Vec<PiecewisePower>> {
    let spec = FixedTraceSpec::new(base, big_n)?;
    let table = compute_laguerre(base, big_n, Ordering::RowMajor, store)?;
    (1..=big_n)
        .map(|n| fixed_trace_cdf(&table.big_f(big_n, n), &spec))
        .collect()
}

/// Laguerre parameters of the transmission problem with `N1`, `N2` channels:
/// `N = min`, `λ₁ = (β/2)(n₁ − N + 1) − 1` with `n₁ = max`.
pub fn conductance_spec(n1: u32, n2: u32, beta: u32) -> Result<(EnsembleSpec, u32)> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Invalid("channel numbers must be positive".into()));
    }
    if ![1, 2, 4].contains(&beta) {
        return Err(Error::Invalid("conductance needs beta in {1, 2, 4}".into()));
    }
    let (big_n, wide) = (n1.min(n2), n1.max(n2));
    let lambda1 = Q::new(beta.into(), 2) * qi(i64::from(wide - big_n + 1)) - 1;
    let spec = EnsembleSpec::laguerre(beta, lambda1)?;
    if spec.regime == Regime::HalfIntegerLambda && beta != 1 {
        return Err(Error::RegimeUnsupported(format!("conductance with beta={beta}")));
    }
    Ok((spec, big_n))
}

/// Density of the Landauer conductance `g ∈ (0, N)`, normalized exactly.
pub fn conductance_pdf(n1: u32, n2: u32, beta: u32) -> Result<PiecewisePower> {
    conductance_pdf_with(n1, n2, beta, None)
}

pub fn conductance_pdf_with(
    n1: u32,
    n2: u32,
    beta: u32,
    store: Option<&dyn CellStore<LaguerreExpansion>>,
) -> Result<PiecewisePower> {
    let (spec, big_n) = conductance_spec(n1, n2, beta)?;
    let ft = FixedTraceSpec::new(spec, big_n)?;
    let table = compute_laguerre(spec, big_n, Ordering::RowMajor, store)?;
    let h = inverse_laplace(&table.big_f(big_n, 1), beta, ft.gamma, qi(big_n.into()))?;
    let mass = h.integral_exact()?;
    if mass.is_zero() {
        return Err(Error::ZeroIntegral);
    }
    let inv = mass
        .inv()
        .ok_or_else(|| Error::Unsupported(format!("mass {mass} mixes powers of pi")))?;
    Ok(h.scale(&inv))
}

/// Mean `1 − ∫₀¹ F` of a fixed-trace marginal, by composite Simpson on each
/// interval between breakpoints (`F` is bounded and continuous there).
pub fn fixed_trace_mean(cdf: &PiecewisePower) -> f64 {
    const PANELS: usize = 400;
    let pts = cdf.breakpoints();
    let mut area = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (q_to_f64(w[0]), q_to_f64(w[1]));
        let h = (b - a) / PANELS as f64;
        let mut acc = cdf.eval_f64(a + 1e-15) + cdf.eval_f64(b);
        for i in 1..PANELS {
            let wgt = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += wgt * cdf.eval_f64(a + h * i as f64);
        }
        area += acc * h / 3.0;
    }
    1.0 - area
}

fn q_to_f64(v: Q) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}
