use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rug::{Float, Rational};

use super::poly::{canonical_blocks, Block, Poly};
use super::{eval_guarded, float_pow, q_to_f64, q_to_float};
use crate::error::{Error, Result};
use crate::scalar::{fmt_q, q_to_rational, ExactScalar, Q};

/// Heaviside factor attached to a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    Always,
    /// `Θ(v − r)`
    Above(Q),
    /// `Θ(r − v)`
    Below(Q),
}

impl Step {
    pub fn active(self, v: Q) -> bool {
        match self {
            Step::Always => true,
            Step::Above(r) => v > r,
            Step::Below(r) => v < r,
        }
    }

    pub fn point(self) -> Option<Q> {
        match self {
            Step::Always => None,
            Step::Above(r) | Step::Below(r) => Some(r),
        }
    }
}

/// `c · v^a · (σ(v − q))^e · step`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PwTerm {
    pub c: ExactScalar,
    pub a: Q,
    pub q: Q,
    pub sigma: i8,
    pub e: Q,
    pub step: Step,
}

impl PwTerm {
    pub fn new(c: ExactScalar, a: Q, q: Q, sigma: i8, e: Q, step: Step) -> Self {
        assert!(sigma == 1 || sigma == -1);
        if e.is_zero() {
            Self { c, a, q: Q::zero(), sigma: 1, e, step }
        } else {
            Self { c, a, q, sigma, e, step }
        }
    }

    /// Plain power `c · v^a · step`.
    pub fn power(c: ExactScalar, a: Q, step: Step) -> Self {
        Self::new(c, a, Q::zero(), 1, Q::zero(), step)
    }
}

/// Finite sum of [`PwTerm`]s on the support `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewisePower {
    pub terms: Vec<PwTerm>,
    pub lo: Q,
    pub hi: Q,
}

/// Canonical form of a piecewise function on one open interval: a sum of
/// plain powers plus two-point blocks keyed by `(q, σ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Collapsed {
    pub plain: BTreeMap<Q, ExactScalar>,
    pub blocks: BTreeMap<(Q, i8), Vec<Block>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
    pub body: Collapsed,
}

impl Collapsed {
    pub fn is_zero(&self) -> bool {
        self.plain.is_empty() && self.blocks.is_empty()
    }

    fn from_terms<'a>(terms: impl IntoIterator<Item = &'a PwTerm>) -> Self {
        let mut plain: BTreeMap<Q, ExactScalar> = BTreeMap::new();
        let mut two_point: BTreeMap<(Q, i8), Vec<(Q, Q, ExactScalar)>> = BTreeMap::new();
        let mut add_plain = |a: Q, c: ExactScalar| {
            let slot = plain.entry(a).or_default();
            *slot += &c;
        };
        for t in terms {
            if t.e.is_zero() {
                add_plain(t.a, t.c.clone());
            } else if t.q.is_zero() {
                assert!(t.sigma == 1, "(−v)^e on the positive axis");
                add_plain(t.a + t.e, t.c.clone());
            } else if t.e.is_integer() && t.e > Q::zero() {
                let k = t.e.to_integer() as u32;
                let p = Poly::shifted_power(&q_to_rational(t.q), t.sigma, k);
                for (j, pc) in p.0.iter().enumerate() {
                    add_plain(t.a + j as i64, &t.c * pc);
                }
            } else {
                two_point
                    .entry((t.q, t.sigma))
                    .or_default()
                    .push((t.a, t.e, t.c.clone()));
            }
        }
        plain.retain(|_, c| !c.is_zero());
        let blocks = two_point
            .into_iter()
            .map(|((q, s), ts)| ((q, s), canonical_blocks(q, s, ts)))
            .filter(|(_, b)| !b.is_empty())
            .collect();
        Collapsed { plain, blocks }
    }

    /// Exact value at a rational point (half-integer exponents only).
    pub fn eval_exact(&self, v: Q) -> Result<ExactScalar> {
        let vr = q_to_rational(v);
        let mut acc = ExactScalar::zero();
        for (a, c) in &self.plain {
            acc += &(c * &pow_exact(v, *a)?);
        }
        for ((q, sigma), blocks) in &self.blocks {
            let w = (v - q) * Q::from_integer(i64::from(*sigma));
            for b in blocks {
                let val = &(&pow_exact(v, b.a)? * &pow_exact(w, b.e)?) * &b.poly.eval_exact(&vr);
                acc += &val;
            }
        }
        Ok(acc)
    }

    /// Exact antiderivative evaluated between `lo` and `hi`.
    pub fn integral_exact(&self, lo: Q, hi: Q) -> Result<ExactScalar> {
        let mut acc = ExactScalar::zero();
        for (a, c) in &self.plain {
            if *a == Q::from_integer(-1) {
                return Err(Error::Unsupported("logarithmic antiderivative".into()));
            }
            let inv = q_to_rational(Q::one() / (a + 1));
            let diff = &pow_exact(hi, a + 1)? - &pow_exact(lo, a + 1)?;
            acc += &(c * &diff.scale(&inv));
        }
        for ((q, sigma), blocks) in &self.blocks {
            let s = Q::from_integer(i64::from(*sigma));
            for b in blocks {
                if !(b.a.is_integer() && b.a >= Q::zero()) {
                    return Err(Error::Unsupported(format!(
                        "integral of v^({}) times a shifted power",
                        fmt_q(b.a)
                    )));
                }
                // substitute v = q + σw and integrate in w
                let r = b.poly.shift(b.a.to_integer() as usize);
                let lin = Poly(vec![ExactScalar::from_q(*q), ExactScalar::from_q(s)]);
                let mut in_w = Poly::zero();
                for c in r.0.iter().rev() {
                    in_w = in_w.mul(&lin).add(&Poly::constant(c.clone()));
                }
                let (w_lo, w_hi) = ((lo - q) * s, (hi - q) * s);
                for (j, c) in in_w.0.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let ex = b.e + j as i64 + 1;
                    let diff = &pow_exact(w_hi, ex)? - &pow_exact(w_lo, ex)?;
                    acc += &(c * &diff.scale(&q_to_rational(s / ex)));
                }
            }
        }
        Ok(acc)
    }

    fn fmt_with(&self, var: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            Ok(())
        };
        for (a, c) in &self.plain {
            sep(f)?;
            write!(f, "({c})*{var}^({})", fmt_q(*a))?;
        }
        for ((q, sigma), blocks) in &self.blocks {
            let base = if *sigma > 0 {
                format!("({var}-{})", fmt_q(*q))
            } else {
                format!("({}-{var})", fmt_q(*q))
            };
            for b in blocks {
                sep(f)?;
                write!(f, "{var}^({})*{base}^({})*[", fmt_q(b.a), fmt_q(b.e))?;
                for (k, c) in b.poly.0.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "({c})*{var}^{k}")?;
                }
                write!(f, "]")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `v^a` for rational `v ≥ 0` and half-integer `a`.
fn pow_exact(v: Q, a: Q) -> Result<ExactScalar> {
    if a.is_zero() {
        return Ok(ExactScalar::one());
    }
    if v.is_zero() {
        return if a > Q::zero() {
            Ok(ExactScalar::zero())
        } else {
            Err(Error::DivergentLimit { term: format!("0^({})", fmt_q(a)) })
        };
    }
    if v < Q::zero() {
        return Err(Error::Invalid(format!("power of a negative base {}", fmt_q(v))));
    }
    if !(a.is_integer() || *a.denom() == 2) {
        return Err(Error::Unsupported(format!("exact power with exponent {}", fmt_q(a))));
    }
    Ok(ExactScalar::pow_half(&q_to_rational(v), (a * 2).to_integer()))
}

impl PiecewisePower {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo < hi);
        Self { terms: Vec::new(), lo, hi }
    }

    pub fn with_terms(lo: Q, hi: Q, terms: Vec<PwTerm>) -> Self {
        let mut out = Self::new(lo, hi);
        out.terms = terms.into_iter().filter(|t| !t.c.is_zero()).collect();
        out
    }

    pub fn push(&mut self, t: PwTerm) {
        if !t.c.is_zero() {
            self.terms.push(t);
        }
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| PwTerm { c: &t.c * c, ..t.clone() })
            .filter(|t| !t.c.is_zero())
            .collect();
        Self { terms, ..*self }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.lo == other.lo && self.hi == other.hi, "support mismatch");
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    pub fn mul_power(&self, a: Q) -> Self {
        let terms = self.terms.iter().map(|t| PwTerm { a: t.a + a, ..t.clone() }).collect();
        Self { terms, ..*self }
    }

    /// Derivative away from the breakpoints (jumps are not represented).
    pub fn differentiate(&self) -> Self {
        let mut out = Self::new(self.lo, self.hi);
        for t in &self.terms {
            if !t.a.is_zero() {
                out.push(PwTerm { c: &t.c * &ExactScalar::from_q(t.a), a: t.a - 1, ..t.clone() });
            }
            if !t.e.is_zero() {
                let c = &t.c * &ExactScalar::from_q(t.e * i64::from(t.sigma));
                out.push(PwTerm::new(c, t.a, t.q, t.sigma, t.e - 1, t.step));
            }
        }
        out
    }

    /// Support endpoints and every step point inside the support, sorted.
    pub fn breakpoints(&self) -> Vec<Q> {
        let mut pts = vec![self.lo, self.hi];
        for t in &self.terms {
            if let Some(r) = t.step.point() {
                if r > self.lo && r < self.hi {
                    pts.push(r);
                }
            }
        }
        pts.sort();
        pts.dedup();
        pts
    }

    fn active_at(&self, probe: Q) -> impl Iterator<Item = &PwTerm> {
        self.terms.iter().filter(move |t| t.step.active(probe))
    }

    /// Canonical body on each interval between consecutive breakpoints of
    /// `points` (which must include the support endpoints).
    pub fn collapse_on(&self, points: &[Q]) -> Vec<Interval> {
        points
            .windows(2)
            .map(|w| {
                let mid = (w[0] + w[1]) / 2;
                Interval {
                    lo: w[0],
                    hi: w[1],
                    body: Collapsed::from_terms(self.active_at(mid)),
                }
            })
            .collect()
    }

    pub fn collapse(&self) -> Vec<Interval> {
        self.collapse_on(&self.breakpoints())
    }

    /// Equality as functions, interval by interval, in canonical form.
    pub fn structurally_equal(&self, other: &Self) -> bool {
        if self.lo != other.lo || self.hi != other.hi {
            return false;
        }
        let mut pts = self.breakpoints();
        pts.extend(other.breakpoints());
        pts.sort();
        pts.dedup();
        self.collapse_on(&pts) == other.collapse_on(&pts)
    }

    /// Merge adjacent intervals with identical bodies.
    pub fn collapse_merged(&self) -> Vec<Interval> {
        let mut out: Vec<Interval> = Vec::new();
        for iv in self.collapse() {
            match out.last_mut() {
                Some(last) if last.body == iv.body => last.hi = iv.hi,
                _ => out.push(iv),
            }
        }
        out
    }

    fn interval_index(&self, pts: &[Q], v: Q) -> usize {
        pts.windows(2)
            .position(|w| v > w[0] && v <= w[1])
            .unwrap_or(0)
    }

    /// Exact value; at a breakpoint the left-sided limit is returned.
    pub fn eval_exact(&self, v: Q) -> Result<ExactScalar> {
        self.left_limit(v)
    }

    pub fn left_limit(&self, v: Q) -> Result<ExactScalar> {
        let pts = self.breakpoints();
        let i = self.interval_index(&pts, v);
        let mid = (pts[i] + pts[i + 1]) / 2;
        Collapsed::from_terms(self.active_at(mid)).eval_exact(v)
    }

    pub fn right_limit(&self, v: Q) -> Result<ExactScalar> {
        let pts = self.breakpoints();
        let i = pts
            .windows(2)
            .position(|w| v >= w[0] && v < w[1])
            .unwrap_or(pts.len() - 2);
        let mid = (pts[i] + pts[i + 1]) / 2;
        Collapsed::from_terms(self.active_at(mid)).eval_exact(v)
    }

    /// `∫` over the whole support, exactly.
    pub fn integral_exact(&self) -> Result<ExactScalar> {
        let mut acc = ExactScalar::zero();
        for iv in self.collapse() {
            acc += &iv.body.integral_exact(iv.lo, iv.hi)?;
        }
        Ok(acc)
    }

    fn eval_float_probe(&self, v: &Rational, probe: Q, digits: u32) -> Float {
        eval_guarded(digits, |bits| {
            let vf = Float::with_val(bits, v);
            let mut sum = Float::with_val(bits, 0);
            let mut sumabs = Float::with_val(bits, 0);
            for t in self.active_at(probe) {
                let mut x = t.c.to_float(bits);
                if !t.a.is_zero() {
                    x *= float_pow(&vf, t.a, bits);
                }
                if !t.e.is_zero() {
                    let w = Float::with_val(bits, &vf - q_to_float(t.q, bits)) * i32::from(t.sigma);
                    if w.is_sign_negative() && !w.is_zero() {
                        continue;
                    }
                    x *= float_pow(&w, t.e, bits);
                }
                sumabs += Float::with_val(bits, x.abs_ref());
                sum += &x;
            }
            (sum, sumabs)
        })
    }

    /// Value at a rational point (left limit at breakpoints).
    pub fn eval(&self, v: &Rational, digits: u32) -> Float {
        let pts = self.breakpoints();
        let vq = crate::scalar::rational_to_q(v);
        let probe = match vq {
            Some(vq) => {
                let i = self.interval_index(&pts, vq);
                (pts[i] + pts[i + 1]) / 2
            }
            None => {
                let approx = v.to_f64();
                let i = pts
                    .windows(2)
                    .position(|w| approx > q_to_f64(w[0]) && approx <= q_to_f64(w[1]))
                    .unwrap_or(0);
                (pts[i] + pts[i + 1]) / 2
            }
        };
        self.eval_float_probe(v, probe, digits)
    }

    /// One-sided values at `v` from the left and right.
    pub fn eval_sides(&self, v: Q, digits: u32) -> (Float, Float) {
        let pts = self.breakpoints();
        let vr = q_to_rational(v);
        let left = {
            let i = self.interval_index(&pts, v);
            self.eval_float_probe(&vr, (pts[i] + pts[i + 1]) / 2, digits)
        };
        let right = {
            let i = pts
                .windows(2)
                .position(|w| v >= w[0] && v < w[1])
                .unwrap_or(pts.len() - 2);
            self.eval_float_probe(&vr, (pts[i] + pts[i + 1]) / 2, digits)
        };
        (left, right)
    }

    pub fn eval_f64(&self, v: f64) -> f64 {
        let pts = self.breakpoints();
        let i = pts
            .windows(2)
            .position(|w| v > q_to_f64(w[0]) && v <= q_to_f64(w[1]))
            .unwrap_or(0);
        let probe = (pts[i] + pts[i + 1]) / 2;
        let mut sum = 0.0;
        for t in self.active_at(probe) {
            let mut x = t.c.to_f64() * v.powf(q_to_f64(t.a));
            if !t.e.is_zero() {
                let w = (v - q_to_f64(t.q)) * f64::from(t.sigma);
                x *= w.max(0.0).powf(q_to_f64(t.e));
            }
            sum += x;
        }
        sum
    }

    /// Per-interval rendering in the variable `var`.
    pub fn display_with(&self, var: &str) -> String {
        struct Show<'a>(&'a Collapsed, &'a str);
        impl fmt::Display for Show<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(self.1, f)
            }
        }
        let mut lines = Vec::new();
        for iv in self.collapse_merged() {
            lines.push(format!(
                "{} < {var} < {}: {}",
                fmt_q(iv.lo),
                fmt_q(iv.hi),
                Show(&iv.body, var)
            ));
        }
        lines.join("\n")
    }

    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|t| t.c.is_rational())
    }
}

impl fmt::Display for PiecewisePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn r(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_q(q(n, d))
    }

    /// The conductance density for three channels on each side, as printed
    /// in the literature, used here purely as a shape fixture.
    fn fixture() -> PiecewisePower {
        let mut p = PiecewisePower::new(qi(0), qi(3));
        p.push(PwTerm::power(r(6, 7), q(7, 2), Step::Below(qi(1))));
        for (c, a) in [(35, 3), (-175, 2), (273, 1), (-125, 0)] {
            p.push(PwTerm::power(r(3 * c, 28), qi(a), Step::Above(qi(1))));
        }
        p.push(PwTerm::new(r(-24, 28), qi(1), qi(2), 1, q(5, 2), Step::Above(qi(2))));
        p.push(PwTerm::new(r(-120, 28), qi(0), qi(2), 1, q(5, 2), Step::Above(qi(2))));
        p
    }

    #[test]
    fn breakpoints_and_collapse() {
        let p = fixture();
        assert_eq!(p.breakpoints(), vec![qi(0), qi(1), qi(2), qi(3)]);
        let ivs = p.collapse();
        assert_eq!(ivs.len(), 3);
        assert!(ivs[2].body.blocks.contains_key(&(qi(2), 1)));
        assert_eq!(p.integral_exact().unwrap(), ExactScalar::one());
    }

    #[test]
    fn equality_ignores_spelling() {
        let p = fixture();
        // split one polynomial term into two pieces
        let mut other = p.clone();
        other.terms[1] = PwTerm::power(r(3 * 35, 56), qi(3), Step::Above(qi(1)));
        other.push(PwTerm::power(r(3 * 35, 56), qi(3), Step::Above(qi(1))));
        assert!(p.structurally_equal(&other));
        other.push(PwTerm::power(r(1, 1000), qi(0), Step::Above(q(5, 2))));
        assert!(!p.structurally_equal(&other));
    }

    #[test]
    fn continuity_of_fixture() {
        let p = fixture();
        for b in [qi(1), qi(2)] {
            assert_eq!(p.left_limit(b).unwrap(), p.right_limit(b).unwrap());
        }
    }

    #[test]
    fn float_and_exact_agree() {
        let p = fixture();
        for v in [q(1, 2), q(3, 2), q(5, 2)] {
            let exact = p.eval_exact(v).unwrap().to_float(200);
            let fl = p.eval(&q_to_rational(v), 40);
            assert!(Float::with_val(200, &exact - &fl).abs() < 1e-38);
            assert!((p.eval_f64(q_to_f64(v)) - exact.to_f64()).abs() < 1e-12);
        }
    }
}
