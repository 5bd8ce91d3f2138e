//! Dense univariate polynomials over [`ExactScalar`] and the canonical
//! "two-point" form `v^a · (σ(v−q))^e · P(v)` with `P(0) ≠ 0`, `P(q) ≠ 0`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rug::Rational;

use crate::scalar::{frac, q_to_rational, ExactScalar, Q};

/// Coefficients in increasing degree, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly(pub Vec<ExactScalar>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: ExactScalar) -> Self {
        Poly(vec![c]).trimmed()
    }

    pub fn monomial(c: ExactScalar, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![ExactScalar::zero(); k + 1];
        v[k] = c;
        Poly(v)
    }

    /// `(σ(v − q))^k` expanded in powers of `v`.
    pub fn shifted_power(q: &Rational, sigma: i8, k: u32) -> Self {
        let mut out = Poly::constant(ExactScalar::one());
        let lin = Poly(vec![
            ExactScalar::from_rational(Rational::from(-q) * i32::from(sigma)),
            ExactScalar::from_int(i64::from(sigma)),
        ])
        .trimmed();
        for _ in 0..k {
            out = out.mul(&lin);
        }
        out
    }

    pub fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> ExactScalar {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            match (self.0.get(k), other.0.get(k)) {
                (Some(a), Some(b)) => v.push(a + b),
                (Some(a), None) => v.push(a.clone()),
                (None, Some(b)) => v.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        Poly(v).trimmed()
    }

    pub fn add_assign(&mut self, other: &Poly) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), ExactScalar::zero());
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
        let t = std::mem::take(self).trimmed();
        *self = t;
    }

    pub fn scale(&self, c: &ExactScalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|x| x * c).collect()).trimmed()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![ExactScalar::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += &(a * b);
                }
            }
        }
        Poly(v).trimmed()
    }

    /// Multiply by `v^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![ExactScalar::zero(); k];
        v.extend(self.0.iter().cloned());
        Poly(v)
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&Rational::from(k as u64)))
                .collect(),
        )
        .trimmed()
    }

    pub fn eval_exact(&self, v: &Rational) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        let vs = ExactScalar::from_rational(v.clone());
        for c in self.0.iter().rev() {
            acc = &(&acc * &vs) + c;
        }
        acc
    }

    /// Quotient by `(v − q)`, assuming the division is exact.
    pub fn div_linear(&self, q: &Rational) -> Poly {
        let n = self.0.len();
        if n <= 1 {
            return Poly::zero();
        }
        let qs = ExactScalar::from_rational(q.clone());
        let mut r = vec![ExactScalar::zero(); n - 1];
        r[n - 2] = self.0[n - 1].clone();
        for k in (1..n - 1).rev() {
            r[k - 1] = &self.0[k] + &(&r[k] * &qs);
        }
        Poly(r).trimmed()
    }
}

/// One canonical block `v^a · (σ(v−q))^e · P(v)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub a: Q,
    pub e: Q,
    pub poly: Poly,
}

impl Block {
    /// Expanded terms `(a + k, e, p_k)`.
    pub fn terms(&self) -> impl Iterator<Item = (Q, Q, &ExactScalar)> + '_ {
        self.poly
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.a + Q::from_integer(k as i64), self.e, c))
    }
}

/// Canonicalize `Σ c · v^a · (σ(v−q))^e` into blocks, one per class
/// `(a mod 1, e mod 1)`, each with `P(0) ≠ 0` and `P(q) ≠ 0`. Blocks are
/// ordered by class; `q` must be nonzero.
pub fn canonical_blocks<I>(q: Q, sigma: i8, terms: I) -> Vec<Block>
where
    I: IntoIterator<Item = (Q, Q, ExactScalar)>,
{
    assert!(!q.is_zero(), "two-point form needs a nonzero second point");
    let mut classes: BTreeMap<(Q, Q), Vec<(Q, Q, ExactScalar)>> = BTreeMap::new();
    for (a, e, c) in terms {
        if !c.is_zero() {
            classes.entry((frac(a), frac(e))).or_default().push((a, e, c));
        }
    }
    let qr = q_to_rational(q);
    let mut out = Vec::new();
    for (_, members) in classes {
        let a0 = members.iter().map(|t| t.0).min().unwrap();
        let e0 = members.iter().map(|t| t.1).min().unwrap();
        let mut powers: BTreeMap<u32, Poly> = BTreeMap::new();
        let mut poly = Poly::zero();
        for (a, e, c) in members {
            let da = (a - a0).to_integer() as usize;
            let de = (e - e0).to_integer() as u32;
            let w = powers
                .entry(de)
                .or_insert_with(|| Poly::shifted_power(&qr, sigma, de));
            poly.add_assign(&w.scale(&c).shift(da));
        }
        if let Some(b) = strip(a0, e0, poly, &qr, sigma) {
            out.push(b);
        }
    }
    out
}

/// Move roots at `0` and `q` out of `P` into the exponents.
pub fn strip(mut a: Q, mut e: Q, mut poly: Poly, q: &Rational, sigma: i8) -> Option<Block> {
    if poly.is_zero() {
        return None;
    }
    let lead = poly.0.iter().take_while(|c| c.is_zero()).count();
    if lead > 0 {
        poly = Poly(poly.0[lead..].to_vec());
        a += Q::from_integer(lead as i64);
    }
    while poly.eval_exact(q).is_zero() {
        // P = (v − q) R = σ · (σ(v − q)) · R
        poly = poly.div_linear(q);
        if sigma < 0 {
            poly = poly.scale(&ExactScalar::from_int(-1));
        }
        e += Q::from_integer(1);
    }
    Some(Block { a, e, poly })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn c(n: i64) -> ExactScalar {
        ExactScalar::from_int(n)
    }

    #[test]
    fn division_by_linear_factor() {
        // (v−2)(v+3) = v² + v − 6
        let p = Poly(vec![c(-6), c(1), c(1)]);
        let r = p.div_linear(&Rational::from(2));
        assert_eq!(r, Poly(vec![c(3), c(1)]));
    }

    #[test]
    fn canonical_form_absorbs_factors() {
        // x(1−x) − x(1−x)² = x²(1−x)
        let blocks = canonical_blocks(
            qi(1),
            -1,
            vec![(qi(1), qi(1), c(1)), (qi(1), qi(2), c(-1))],
        );
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].a, qi(2));
        assert_eq!(blocks[0].e, qi(1));
        assert_eq!(blocks[0].poly, Poly(vec![c(1)]));
    }

    #[test]
    fn classes_are_separate() {
        let blocks = canonical_blocks(
            qi(1),
            -1,
            vec![(q(1, 2), qi(0), c(1)), (qi(0), q(1, 2), c(1)), (qi(3), qi(0), c(0))],
        );
        assert_eq!(blocks.len(), 2);
    }

    #[test]
    fn same_function_different_spelling() {
        // (1−x)^2 written two ways
        let a = canonical_blocks(qi(1), -1, vec![(qi(0), qi(2), c(1))]);
        let b = canonical_blocks(
            qi(1),
            -1,
            vec![(qi(0), qi(0), c(1)), (qi(1), qi(0), c(-2)), (qi(2), qi(0), c(1))],
        );
        assert_eq!(a, b);
    }
}
