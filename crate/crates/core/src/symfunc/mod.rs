//! Exact function algebra used by the recurrences.
//!
//! Three representations cover every closed form that occurs:
//! [`LaguerreExpansion`] on `(0, ∞)`, [`JacobiExpansion`] on `(0, 1)` and
//! [`PiecewisePower`] for the fixed-trace and conductance results.

mod jacobi;
mod laguerre;
mod piecewise;
pub mod poly;

use std::fmt::Debug;

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::Result;
use crate::scalar::{digits_to_bits, ExactScalar, Q};

pub use jacobi::JacobiExpansion;
pub use laguerre::{LaguerreExpansion, LaguerreKey};
pub use piecewise::{Collapsed, Interval, PiecewisePower, PwTerm, Step};

/// Operations shared by the two expansion families.
pub trait Expansion: Clone + PartialEq + Debug + Send + Sync + Sized {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: &ExactScalar) -> Self;
    /// Multiply by `x^a`.
    fn mul_x_pow(&self, a: Q) -> Self;
    fn differentiate(&self) -> Self;
    /// Antiderivative vanishing at `x = 0`.
    fn integrate_from_zero(&self) -> Result<Self>;
    /// Limit at the right end of the domain (`∞` or `1`).
    fn limit_at_endpoint(&self) -> Result<ExactScalar>;
    /// Limit at `x → 0⁺`.
    fn value_at_zero(&self) -> Result<ExactScalar>;
    /// Value at a rational point with relative error at most `10^(2−digits)`.
    fn eval(&self, x: &Rational, digits: u32) -> Float;
    fn eval_f64(&self, x: f64) -> f64;
    /// True when every coefficient is a plain rational.
    fn is_rational(&self) -> bool;
    fn num_terms(&self) -> usize;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&ExactScalar::from_int(-1)))
    }

    fn neg(&self) -> Self {
        self.scale(&ExactScalar::from_int(-1))
    }

    fn constant(c: ExactScalar) -> Self;
}

/// Evaluate a sum with enough working precision that cancellation between
/// terms cannot eat into the requested `digits`. The closure receives a bit
/// precision and returns `(Σ terms, Σ |terms|)`.
pub(crate) fn eval_guarded<F>(digits: u32, mut f: F) -> Float
where
    F: FnMut(u32) -> (Float, Float),
{
    let mut working = digits + 10;
    let cap = digits.saturating_mul(8) + 400;
    loop {
        let bits = digits_to_bits(working);
        let (sum, sumabs) = f(bits);
        if sumabs.is_zero() || !sum.is_finite() {
            return sum;
        }
        if sum.is_zero() {
            if working >= cap {
                return sum;
            }
            working = (working * 2).min(cap);
            continue;
        }
        let ratio = Float::with_val(64, &sumabs / Float::with_val(sum.prec(), sum.abs_ref()));
        let loss = ratio.log10().to_f64().max(0.0).ceil() as u32;
        if working >= digits + loss + 5 || working >= cap {
            return sum;
        }
        working = (digits + loss + 15).max(working + 10).min(cap);
    }
}

/// `x^a` for a rational exponent at `bits` precision, `x > 0`.
pub(crate) fn float_pow(x: &Float, a: Q, bits: u32) -> Float {
    if a.is_integer() {
        let k = a.to_integer();
        if let Ok(k) = i32::try_from(k) {
            return Float::with_val(bits, x.pow(k));
        }
    }
    if *a.denom() == 2 {
        let r = Float::with_val(bits, x.sqrt_ref());
        return Float::with_val(bits, (&r).pow(*a.numer() as i32));
    }
    let e = Float::with_val(bits, *a.numer()) / Float::with_val(bits, *a.denom());
    Float::with_val(bits, x.pow(&e))
}

pub(crate) fn q_to_float(v: Q, bits: u32) -> Float {
    Float::with_val(bits, *v.numer()) / Float::with_val(bits, *v.denom())
}

pub(crate) fn q_to_f64(v: Q) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}
