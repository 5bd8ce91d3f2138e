use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rug::{Float, Rational};

use super::poly::{canonical_blocks, strip, Block, Poly};
use super::{eval_guarded, float_pow, q_to_f64, Expansion};
use crate::error::{Error, Result};
use crate::scalar::{binomial, digits_to_bits, fmt_q, frac, q_to_rational, qi, ExactScalar, Q};

/// Finite sum `Σ c · x^a (1−x)^b` on `(0, 1)`.
///
/// Stored canonically as blocks `x^a (1−x)^b P(x)`, one per class
/// `(a mod 1, b mod 1)`, with `P(0) ≠ 0` and `P(1) ≠ 0`. Since the basis
/// `x^a (1−x)^b` is redundant this is what makes equality structural.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct JacobiExpansion {
    blocks: Vec<Block>,
}

fn one() -> Rational {
    Rational::from(1)
}

impl JacobiExpansion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (Q, Q, ExactScalar)>>(terms: I) -> Self {
        Self {
            blocks: canonical_blocks(qi(1), -1, terms),
        }
    }

    /// `c · x^a (1−x)^b`.
    pub fn term(c: ExactScalar, a: Q, b: Q) -> Self {
        Self::from_terms([(a, b, c)])
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Expanded `(a, b, c)` triples in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Q, Q, &ExactScalar)> {
        self.blocks.iter().flat_map(Block::terms)
    }

    fn raw_terms(&self) -> Vec<(Q, Q, ExactScalar)> {
        self.terms().map(|(a, b, c)| (a, b, c.clone())).collect()
    }

    fn from_blocks(blocks: Vec<Block>) -> Self {
        let mut by_class: BTreeMap<(Q, Q), Vec<Block>> = BTreeMap::new();
        for b in blocks {
            by_class.entry((frac(b.a), frac(b.e))).or_default().push(b);
        }
        let mut out = Vec::new();
        for (_, group) in by_class {
            if group.len() == 1 {
                out.extend(group);
                continue;
            }
            let a0 = group.iter().map(|b| b.a).min().unwrap();
            let e0 = group.iter().map(|b| b.e).min().unwrap();
            let mut poly = Poly::zero();
            for b in group {
                let da = (b.a - a0).to_integer() as usize;
                let de = (b.e - e0).to_integer() as u32;
                poly.add_assign(&b.poly.mul(&Poly::shifted_power(&one(), -1, de)).shift(da));
            }
            out.extend(strip(a0, e0, poly, &one(), -1));
        }
        Self { blocks: out }
    }

    /// Multiply by a polynomial in `x`.
    pub fn mul_poly(&self, p: &Poly) -> Self {
        Self::from_blocks(
            self.blocks
                .iter()
                .filter_map(|b| strip(b.a, b.e, b.poly.mul(p), &one(), -1))
                .collect(),
        )
    }

    /// Multiply by `(1−x)^b`.
    pub fn mul_one_minus_x_pow(&self, b: Q) -> Self {
        Self::from_blocks(
            self.blocks
                .iter()
                .map(|bl| Block {
                    e: bl.e + b,
                    ..bl.clone()
                })
                .collect(),
        )
    }

    /// Substitute `x → 1 − x`.
    pub fn reflect(&self) -> Self {
        Self::from_terms(self.terms().map(|(a, b, c)| (b, a, c.clone())))
    }

    fn fmt_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, b, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*x^({})*(1-x)^({})", fmt_q(a), fmt_q(b))?;
        }
        Ok(())
    }
}

impl fmt::Display for JacobiExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_terms(f)
    }
}

impl Expansion for JacobiExpansion {
    fn zero() -> Self {
        Self::new()
    }

    fn constant(c: ExactScalar) -> Self {
        Self::term(c, Q::zero(), Q::zero())
    }

    fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let mut all = self.blocks.clone();
        all.extend(other.blocks.iter().cloned());
        Self::from_blocks(all)
    }

    fn scale(&self, c: &ExactScalar) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Self {
            blocks: self
                .blocks
                .iter()
                .map(|b| Block {
                    poly: b.poly.scale(c),
                    ..b.clone()
                })
                .collect(),
        }
    }

    fn mul_x_pow(&self, a: Q) -> Self {
        Self::from_blocks(
            self.blocks
                .iter()
                .map(|bl| Block {
                    a: bl.a + a,
                    ..bl.clone()
                })
                .collect(),
        )
    }

    fn differentiate(&self) -> Self {
        // d/dx x^a (1−x)^b P = x^(a−1) (1−x)^(b−1) [a(1−x)P − b x P + x(1−x)P']
        let mut out = Vec::new();
        for bl in &self.blocks {
            let a = ExactScalar::from_q(bl.a);
            let b = ExactScalar::from_q(bl.e);
            let one_minus_x = Poly(vec![ExactScalar::one(), ExactScalar::from_int(-1)]);
            let x = Poly::monomial(ExactScalar::one(), 1);
            let x_one_minus_x = x.mul(&one_minus_x);
            let mut p = bl.poly.mul(&one_minus_x).scale(&a);
            p.add_assign(&bl.poly.mul(&x).scale(&(-&b)));
            p.add_assign(&bl.poly.derivative().mul(&x_one_minus_x));
            out.extend(strip(bl.a - 1, bl.e - 1, p, &one(), -1));
        }
        Self::from_blocks(out)
    }

    fn integrate_from_zero(&self) -> Result<Self> {
        let mut raw: Vec<(Q, Q, ExactScalar)> = Vec::new();
        for (a, b, c) in self.raw_terms() {
            let shown = || format!("x^({})*(1-x)^({})", fmt_q(a), fmt_q(b));
            if a <= qi(-1) {
                return Err(Error::IntegrabilityViolation { term: shown() });
            }
            if b.is_integer() && b >= Q::zero() {
                // ∫₀ˣ y^a (1−y)^b dy = Σ_p (−1)^p C(b,p) x^(a+p+1)/(a+p+1)
                let bb = b.to_integer() as u32;
                for p in 0..=bb {
                    let mut coef = Rational::from(binomial(bb, p));
                    if p % 2 == 1 {
                        coef = -coef;
                    }
                    let e = a + i64::from(p) + 1;
                    coef /= q_to_rational(e);
                    raw.push((e, Q::zero(), c.scale(&coef)));
                }
            } else if a.is_integer() && a >= Q::zero() {
                // ∫₀ˣ y^r (1−y)^b dy = B̃(r,b) − Σ_p (−1)^p C(r,p) (1−x)^(b+p+1)/(b+p+1)
                if b <= qi(-1) {
                    return Err(Error::IntegrabilityViolation { term: shown() });
                }
                let r = a.to_integer() as u32;
                let mut total = Rational::new();
                for p in 0..=r {
                    let mut coef = Rational::from(binomial(r, p));
                    if p % 2 == 1 {
                        coef = -coef;
                    }
                    let e = b + i64::from(p) + 1;
                    coef /= q_to_rational(e);
                    total += &coef;
                    raw.push((Q::zero(), e, c.scale(&(-coef))));
                }
                raw.push((Q::zero(), Q::zero(), c.scale(&total)));
            } else {
                return Err(Error::Unsupported(format!(
                    "neither exponent of {} is a non-negative integer",
                    shown()
                )));
            }
        }
        Ok(Self::from_terms(raw))
    }

    fn limit_at_endpoint(&self) -> Result<ExactScalar> {
        let mut acc = ExactScalar::zero();
        for bl in &self.blocks {
            if bl.e > Q::zero() {
                continue;
            }
            if bl.e.is_zero() {
                acc += &bl.poly.eval_exact(&one());
                continue;
            }
            return Err(Error::DivergentLimit {
                term: format!("(1-x)^({})", fmt_q(bl.e)),
            });
        }
        Ok(acc)
    }

    fn value_at_zero(&self) -> Result<ExactScalar> {
        let mut acc = ExactScalar::zero();
        for bl in &self.blocks {
            if bl.a > Q::zero() {
                continue;
            }
            if bl.a.is_zero() {
                acc += &bl.poly.coeff(0);
                continue;
            }
            return Err(Error::DivergentLimit {
                term: format!("x^({})", fmt_q(bl.a)),
            });
        }
        Ok(acc)
    }

    fn eval(&self, x: &Rational, digits: u32) -> Float {
        let bits = digits_to_bits(digits);
        let endpoint = if x.is_zero() {
            Some(self.value_at_zero())
        } else if *x == 1 {
            Some(self.limit_at_endpoint())
        } else {
            None
        };
        if let Some(v) = endpoint {
            return match v {
                Ok(v) => v.to_float(bits),
                Err(_) => Float::with_val(bits, rug::float::Special::Nan),
            };
        }
        eval_guarded(digits, |bits| {
            let xf = Float::with_val(bits, x);
            let yf = Float::with_val(bits, 1 - x.clone());
            let mut sum = Float::with_val(bits, 0);
            let mut sumabs = Float::with_val(bits, 0);
            for (a, b, c) in self.terms() {
                let mut t = c.to_float(bits);
                t *= float_pow(&xf, a, bits);
                t *= float_pow(&yf, b, bits);
                sumabs += Float::with_val(bits, t.abs_ref());
                sum += &t;
            }
            (sum, sumabs)
        })
    }

    fn eval_f64(&self, x: f64) -> f64 {
        self.terms()
            .map(|(a, b, c)| c.to_f64() * x.powf(q_to_f64(a)) * (1.0 - x).powf(q_to_f64(b)))
            .sum()
    }

    fn is_rational(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.poly.0.iter().all(ExactScalar::is_rational))
    }

    fn num_terms(&self) -> usize {
        self.terms().count()
    }
}

impl JacobiExpansion {
    /// Number of blocks, i.e. distinct exponent classes.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_one(&self) -> bool {
        self.blocks.len() == 1
            && self.blocks[0].a.is_zero()
            && self.blocks[0].e.is_zero()
            && self.blocks[0].poly.0.len() == 1
            && self.blocks[0].poly.0[0] == ExactScalar::one()
    }
}
