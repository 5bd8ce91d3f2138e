//! Differential-difference recurrences lifting an `N`-variable gap
//! probability to the unnormalized density of the next ordered eigenvalue of
//! the `(N+1)`-variable ensemble.
//!
//! For the Laguerre weight the family `L_p` satisfies
//!
//! ```text
//! (β/2)(N−p) L_{p+1} = ((β/2)(N−p) x + B_p) L_p + x L_p' − D_p x L_{p−1}
//! B_p = (p−N)[λ₁ + α + 1 + (β/2)(N−p−1)],   D_p = p[(β/2)(N−p) + α + 1]
//! ```
//!
//! and for the Jacobi weight
//!
//! ```text
//! (N−p) E_p J_{p+1} = (A_p x + B_p) J_p − x(x−1) J_p' + D_p x(x−1) J_{p−1}
//! A_p = (N−p)(λ₁ + λ₂ + β(N−p−1) + 2(α+1))
//! B_p = (p−N)(λ₁ + α + 1 + (β/2)(N−p−1))
//! D_p = p((β/2)(N−p) + α + 1)
//! E_p = λ₁ + λ₂ + 1 + (β/2)(2N−p−2) + (α+1)
//! ```

use num_traits::Zero;

use crate::scalar::{qi, ExactScalar, Q};
use crate::symfunc::poly::Poly;
use crate::symfunc::{Expansion, JacobiExpansion, LaguerreExpansion};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecurrenceParams {
    /// Number of integration variables.
    pub n_vars: u32,
    pub beta: u32,
    pub lambda1: Q,
    /// Ignored for the Laguerre family.
    pub lambda2: Q,
    /// Current power of `|x − t|`, `0 ≤ α < β`.
    pub alpha: u32,
}

impl RecurrenceParams {
    pub fn new(n_vars: u32, beta: u32, lambda1: Q, lambda2: Q) -> Self {
        Self { n_vars, beta, lambda1, lambda2, alpha: 0 }
    }

    fn half_beta(&self) -> Q {
        Q::new(i64::from(self.beta), 2)
    }

    /// `(B_p, D_p)` of the Laguerre recurrence.
    pub fn laguerre_coeffs(&self, p: u32) -> (Q, Q) {
        let (n, p, a) = (qi(self.n_vars.into()), qi(p.into()), qi(self.alpha.into()));
        let hb = self.half_beta();
        let b = (p - n) * (self.lambda1 + a + 1 + hb * (n - p - 1));
        let d = p * (hb * (n - p) + a + 1);
        (b, d)
    }

    /// `(A_p, B_p, D_p, E_p)` of the Jacobi recurrence.
    pub fn jacobi_coeffs(&self, p: u32) -> (Q, Q, Q, Q) {
        let (n, p, a) = (qi(self.n_vars.into()), qi(p.into()), qi(self.alpha.into()));
        let hb = self.half_beta();
        let beta = qi(self.beta.into());
        let l1 = self.lambda1;
        let l2 = self.lambda2;
        let big_a = (n - p) * (l1 + l2 + beta * (n - p - 1) + (a + 1) * 2);
        let big_b = (p - n) * (l1 + a + 1 + hb * (n - p - 1));
        let big_d = p * (hb * (n - p) + a + 1);
        let big_e = l1 + l2 + 1 + hb * (n * 2 - p - 2) + (a + 1);
        (big_a, big_b, big_d, big_e)
    }
}

/// One step `L_p, L_{p−1} → L_{p+1}` of the Laguerre recurrence.
pub fn laguerre_step(
    lp: &LaguerreExpansion,
    lpm1: &LaguerreExpansion,
    params: &RecurrenceParams,
    p: u32,
) -> LaguerreExpansion {
    assert!(p < params.n_vars);
    let (b, d) = params.laguerre_coeffs(p);
    let lead = params.half_beta() * qi((params.n_vars - p).into());
    let mut out = lp.mul_x_pow(qi(1)).scale(&ExactScalar::from_q(lead));
    out.add_scaled(lp, &ExactScalar::from_q(b));
    out.add_assign(&lp.differentiate().mul_x_pow(qi(1)));
    if !d.is_zero() {
        out.add_scaled(&lpm1.mul_x_pow(qi(1)), &ExactScalar::from_q(-d));
    }
    out.scale(&ExactScalar::from_q(lead.recip()))
}

/// One step `J_p, J_{p−1} → J_{p+1}` of the Jacobi recurrence.
pub fn jacobi_step(
    jp: &JacobiExpansion,
    jpm1: &JacobiExpansion,
    params: &RecurrenceParams,
    p: u32,
) -> JacobiExpansion {
    assert!(p < params.n_vars);
    let (a, b, d, e) = params.jacobi_coeffs(p);
    assert!(!e.is_zero(), "E_p vanished");
    let x = |c: Q, k: usize| Poly::monomial(ExactScalar::from_q(c), k);
    // x(x−1) = x² − x
    let x_xm1 = x(qi(1), 2).add(&x(qi(-1), 1));
    let linear = x(a, 1).add(&Poly::constant(ExactScalar::from_q(b)));
    let mut out = jp.mul_poly(&linear);
    out = out.sub(&jp.differentiate().mul_poly(&x_xm1));
    if !d.is_zero() {
        out = out.add(&jpm1.mul_poly(&x_xm1.scale(&ExactScalar::from_q(d))));
    }
    let lead = qi((params.n_vars - p).into()) * e;
    out.scale(&ExactScalar::from_q(lead.recip()))
}

/// Expansion families the recurrence can run on.
pub trait SweepFamily: Expansion {
    fn step(cur: &Self, prev: &Self, params: &RecurrenceParams, p: u32) -> Self;
    /// Multiply by the ensemble weight.
    fn mul_weight(&self, params: &RecurrenceParams) -> Self;
}

impl SweepFamily for LaguerreExpansion {
    fn step(cur: &Self, prev: &Self, params: &RecurrenceParams, p: u32) -> Self {
        laguerre_step(cur, prev, params, p)
    }

    fn mul_weight(&self, params: &RecurrenceParams) -> Self {
        self.mul_x_pow(params.lambda1).mul_exp(Q::new(params.beta.into(), 2))
    }
}

impl SweepFamily for JacobiExpansion {
    fn step(cur: &Self, prev: &Self, params: &RecurrenceParams, p: u32) -> Self {
        jacobi_step(cur, prev, params, p)
    }

    fn mul_weight(&self, params: &RecurrenceParams) -> Self {
        self.mul_x_pow(params.lambda1)
            .mul_one_minus_x_pow(params.lambda2)
    }
}

/// Run `β` passes of `p = 0..N−1` on a seed proportional to the gap
/// probability `E_N(n;(x,b))` and multiply by the weight. The result is
/// proportional to `f_{N+1}(n+1; x)`.
pub fn full_sweep<E: SweepFamily>(seed: &E, params: &RecurrenceParams) -> E {
    let mut cur = seed.clone();
    for alpha in 0..params.beta {
        let pr = RecurrenceParams { alpha, ..*params };
        let mut prev = E::zero();
        for p in 0..params.n_vars {
            let next = E::step(&cur, &prev, &pr, p);
            prev = std::mem::replace(&mut cur, next);
        }
    }
    cur.mul_weight(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::symfunc::LaguerreKey;

    fn one() -> ExactScalar {
        ExactScalar::one()
    }

    #[test]
    fn laguerre_single_step() {
        let params = RecurrenceParams::new(1, 2, qi(0), qi(0));
        let l0 = LaguerreExpansion::constant(one()).add(&LaguerreExpansion::term(
            ExactScalar::from_int(-1),
            qi(0),
            qi(1),
        ));
        let l1 = laguerre_step(&l0, &LaguerreExpansion::zero(), &params, 0);
        // ∫₀ˣ e^(−t)(x − t) dt = x − 1 + e^(−x)
        let expected = LaguerreExpansion::from_terms([
            (LaguerreKey::plain(qi(1), qi(0)), one()),
            (LaguerreKey::plain(qi(0), qi(0)), ExactScalar::from_int(-1)),
            (LaguerreKey::plain(qi(0), qi(1)), one()),
        ]);
        assert_eq!(l1, expected);
        let junk = LaguerreExpansion::term(ExactScalar::from_int(7), qi(3), qi(2));
        assert_eq!(laguerre_step(&l0, &junk, &params, 0), expected);
    }

    #[test]
    fn jacobi_single_step() {
        let params = RecurrenceParams::new(1, 1, qi(0), qi(0));
        assert_eq!(params.jacobi_coeffs(0), (qi(2), qi(-1), qi(0), qi(2)));
        let j0 = JacobiExpansion::term(one(), qi(1), qi(0));
        let j1 = jacobi_step(&j0, &JacobiExpansion::zero(), &params, 0);
        // ∫₀ˣ (x − t) dt = x²/2
        assert_eq!(j1, JacobiExpansion::term(ExactScalar::from_q(q(1, 2)), qi(2), qi(0)));
    }

    #[test]
    fn coefficients_vanish_at_p_zero() {
        let params = RecurrenceParams::new(4, 3, q(-1, 2), qi(2));
        assert!(params.laguerre_coeffs(0).1.is_zero());
        assert!(params.jacobi_coeffs(0).2.is_zero());
    }

    #[test]
    fn steps_are_linear() {
        let params = RecurrenceParams { alpha: 1, ..RecurrenceParams::new(3, 2, qi(1), qi(2)) };
        let f = LaguerreExpansion::term(ExactScalar::from_int(2), qi(2), qi(1))
            .add(&LaguerreExpansion::constant(one()));
        let g = LaguerreExpansion::term(ExactScalar::from_int(-3), qi(1), q(1, 2));
        let c = ExactScalar::from_q(q(-7, 5));
        assert_eq!(
            laguerre_step(&f.scale(&c), &g.scale(&c), &params, 1),
            laguerre_step(&f, &g, &params, 1).scale(&c)
        );
        let fj = JacobiExpansion::term(one(), qi(2), qi(1));
        let gj = JacobiExpansion::term(ExactScalar::from_int(4), qi(1), qi(3));
        assert_eq!(
            jacobi_step(&fj.scale(&c), &gj.scale(&c), &params, 2),
            jacobi_step(&fj, &gj, &params, 2).scale(&c)
        );
    }

    #[test]
    fn sweep_gives_second_order_statistics() {
        let params = RecurrenceParams::new(1, 2, qi(0), qi(0));
        // E_1(0) = 1 − e^(−x) → f_2(1) ∝ e^(−x)(x² − 2x + 2) − 2e^(−2x)
        let seed = LaguerreExpansion::constant(one())
            .add(&LaguerreExpansion::term(ExactScalar::from_int(-1), qi(0), qi(1)));
        let raw = full_sweep(&seed, &params);
        let norm = raw.integrate_from_zero().unwrap().limit_at_endpoint().unwrap();
        let f = raw.scale(&norm.inv().unwrap());
        let expected = LaguerreExpansion::from_terms([
            (LaguerreKey::plain(qi(2), qi(1)), one()),
            (LaguerreKey::plain(qi(1), qi(1)), ExactScalar::from_int(-2)),
            (LaguerreKey::plain(qi(0), qi(1)), ExactScalar::from_int(2)),
            (LaguerreKey::plain(qi(0), qi(2)), ExactScalar::from_int(-2)),
        ]);
        assert_eq!(f, expected);

        // E_1(1) = e^(−x) → f_2(2) = 2 e^(−2x)
        let raw = full_sweep(&LaguerreExpansion::term(one(), qi(0), qi(1)), &params);
        let norm = raw.integrate_from_zero().unwrap().limit_at_endpoint().unwrap();
        let f = raw.scale(&norm.inv().unwrap());
        assert_eq!(f, LaguerreExpansion::term(ExactScalar::from_int(2), qi(0), qi(2)));
    }
}
