//! Smallest-eigenvalue density of the `β = 1`, `λ₁ = −1/2` Laguerre
//! ensemble in closed form through Tricomi's confluent hypergeometric
//! function: `f_N(N;x) ∝ x^{−1/2} e^{−Nx/2} U((N−1)/2, −1/2; x/2)`.
//!
//! `U(a, 1/2; z)` for integer and half-integer `a` is built from its two
//! lowest members by the contiguous relation in `a`, and `U(a, −1/2; z)`
//! from two neighbours with `b = 1/2`. Everything is written in `x = 2z`.

use crate::crosschecks::CheckRecord;
use crate::error::{Error, Result};
use crate::marginals::{compute_laguerre, normalize, EnsembleSpec, Ordering};
use crate::scalar::{fmt_q, is_half_odd, q, qi, q_to_rational, ExactScalar, Q};
use crate::symfunc::{Expansion, LaguerreExpansion};

fn times_z(e: &LaguerreExpansion) -> LaguerreExpansion {
    e.mul_x_pow(qi(1)).scale(&ExactScalar::from_q(q(1, 2)))
}

fn times_sqrt_z(e: &LaguerreExpansion) -> LaguerreExpansion {
    let r = ExactScalar::sqrt_rational(&q_to_rational(q(1, 2)));
    e.mul_x_pow(q(1, 2)).scale(&r)
}

/// `√π e^z erfc(√z)` with `z = x/2`.
fn erfc_scaled() -> LaguerreExpansion {
    let sp = ExactScalar::pi_pow_half(1);
    LaguerreExpansion::term(sp.clone(), qi(0), q(-1, 2)).sub(&LaguerreExpansion::erf_term(sp, qi(0), q(-1, 2), q(1, 2)))
}

/// `U(a, 1/2; x/2)` for `a ≥ −1/2` integer or half-integer.
pub fn tricomi_u_half(a: Q) -> Result<LaguerreExpansion> {
    let one = LaguerreExpansion::constant(ExactScalar::one());
    let (mut lo_a, mut prev, mut cur) = if a.is_integer() && a >= qi(0) {
        // U(0, b; z) = 1, U(1, 1/2; z) = 2 − 2√(πz) e^z erfc √z
        let u1 = one.scale(&ExactScalar::from_int(2)).sub(&times_sqrt_z(&erfc_scaled()).scale(&ExactScalar::from_int(2)));
        (qi(0), one, u1)
    } else if is_half_odd(a) && a >= q(-1, 2) {
        // U(−1/2, 1/2; z) = √z, U(1/2, 1/2; z) = √π e^z erfc √z
        (q(-1, 2), times_sqrt_z(&one), erfc_scaled())
    } else {
        return Err(Error::Unsupported(format!("U({}, 1/2; z) outside the closed-form family", fmt_q(a))));
    };
    if a == lo_a {
        return Ok(prev);
    }
    lo_a += 1;
    let b = q(1, 2);
    // −a(a−b+1) U(a+1) = U(a−1) + (b − 2a − z) U(a)
    while lo_a < a {
        let lin = cur.scale(&ExactScalar::from_q(b - lo_a * 2)).sub(&times_z(&cur));
        let denom = -(lo_a * (lo_a - b + 1));
        let next = prev.add(&lin).scale(&ExactScalar::from_q(Q::from_integer(1) / denom));
        prev = cur;
        cur = next;
        lo_a += 1;
    }
    Ok(cur)
}

/// `U(a, −1/2; x/2)` from `(a + 1/2) U(a, −1/2) = (1/2 − z) U(a, 1/2) + √z U(a − 1/2, 1/2)`.
pub fn tricomi_u_minus_half(a: Q) -> Result<LaguerreExpansion> {
    let ua = tricomi_u_half(a)?;
    let ub = tricomi_u_half(a - q(1, 2))?;
    let lhs = ua.scale(&ExactScalar::from_q(q(1, 2))).sub(&times_z(&ua)).add(&times_sqrt_z(&ub));
    Ok(lhs.scale(&ExactScalar::from_q(Q::from_integer(1) / (a + q(1, 2)))))
}

/// Normalized `f_N(N;x)` for `β = 1`, `λ₁ = −1/2`.
pub fn smallest_density(spec: &EnsembleSpec, big_n: u32) -> Result<LaguerreExpansion> {
    if spec.beta != 1 || spec.lambda1 != q(-1, 2) || spec.family != crate::marginals::Family::Laguerre {
        return Err(Error::Unsupported(format!("Tricomi form is only available for Laguerre beta=1 lambda1=-1/2, not {spec}")));
    }
    if big_n == 0 {
        return Err(Error::Invalid("N must be positive".into()));
    }
    let u = tricomi_u_minus_half(Q::new(i64::from(big_n) - 1, 2))?;
    let raw = u.mul_x_pow(q(-1, 2)).mul_exp(Q::new(i64::from(big_n), 2));
    normalize(&raw)
}

/// Compares the Tricomi form with the recursion's `f_N(N)` for `N ≤ nmax`.
pub fn compare_with_recursion(nmax: u32) -> Result<Vec<CheckRecord>> {
    let spec = EnsembleSpec::laguerre(1, q(-1, 2))?;
    let table = compute_laguerre(spec, nmax, Ordering::RowMajor, None)?;
    let mut out = Vec::new();
    for big_n in 1..=nmax {
        let closed = smallest_density(&spec, big_n)?;
        let rec = table.f(big_n, big_n);
        let ok = &closed == rec;
        let detail = if ok { String::from("identical") } else { format!("{closed}  vs  {rec}") };
        out.push(CheckRecord::new(format!("tricomi N={big_n}"), ok, detail));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crosschecks::quad::integrate_to_infinity;

    /// `U(a,b,z) = Γ(a)^{−1} ∫₀^∞ e^{−zt} t^{a−1} (1+t)^{b−a−1} dt` with `t = s²`.
    fn integral_u(a: f64, b: f64, z: f64) -> f64 {
        let v = integrate_to_infinity(
            |s| {
                let t = s * s;
                2.0 * (-z * t).exp() * s.powf(2.0 * a - 1.0) * (1.0 + t).powf(b - a - 1.0)
            },
            0.0,
            0.0,
            1e-13,
        );
        v / libm::tgamma(a)
    }

    #[test]
    fn u_matches_integral_representation() {
        for a in [q(1, 2), qi(1), q(3, 2), qi(2), q(5, 2), qi(4)] {
            let e = tricomi_u_half(a).unwrap();
            let af = *a.numer() as f64 / *a.denom() as f64;
            for z in [0.3, 1.0, 2.5] {
                let got = e.eval_f64(2.0 * z);
                let want = integral_u(af, 0.5, z);
                assert!((got - want).abs() < 1e-9 * want.abs(), "a={a} z={z}: {got} vs {want}");
            }
        }
        for a in [q(1, 2), qi(1), q(3, 2), qi(2)] {
            let e = tricomi_u_minus_half(a).unwrap();
            let af = *a.numer() as f64 / *a.denom() as f64;
            for z in [0.4, 1.7] {
                let got = e.eval_f64(2.0 * z);
                let want = integral_u(af, -0.5, z);
                assert!((got - want).abs() < 1e-9 * want.abs(), "a={a} z={z}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn base_cases() {
        assert_eq!(tricomi_u_half(qi(0)).unwrap(), LaguerreExpansion::constant(ExactScalar::one()));
        assert_eq!(tricomi_u_minus_half(qi(0)).unwrap(), LaguerreExpansion::constant(ExactScalar::one()));
        assert!(tricomi_u_half(q(-3, 2)).is_err());
    }

    #[test]
    fn other_regimes_refused() {
        let spec = EnsembleSpec::laguerre(1, q(1, 2)).unwrap();
        assert!(matches!(smallest_density(&spec, 2), Err(Error::Unsupported(_))));
    }
}
