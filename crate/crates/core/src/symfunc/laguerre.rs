use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rug::{Float, Rational};

use super::{eval_guarded, float_pow, q_to_f64, q_to_float, Expansion};
use crate::error::{Error, Result};
use crate::scalar::{
    fmt_q, gamma_exact, gamma_ratio, is_half_odd, q, q_to_rational, qi, rational_pow, ExactScalar,
    Q,
};

/// Shape of one term `x^a · e^(−s x) · erf(√(u x))^δ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaguerreKey {
    pub erf: bool,
    pub s: Q,
    /// Zero unless `erf` is set.
    pub u: Q,
    pub a: Q,
}

impl LaguerreKey {
    pub fn plain(a: Q, s: Q) -> Self {
        Self { erf: false, s, u: Q::zero(), a }
    }

    pub fn with_erf(a: Q, s: Q, u: Q) -> Self {
        assert!(u > Q::zero(), "erf rate must be positive");
        Self { erf: true, s, u, a }
    }
}

impl fmt::Display for LaguerreKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^({})", fmt_q(self.a))?;
        if !self.s.is_zero() {
            write!(f, "*exp(-({})*x)", fmt_q(self.s))?;
        }
        if self.erf {
            write!(f, "*erf(sqrt(({})*x))", fmt_q(self.u))?;
        }
        Ok(())
    }
}

/// Finite sum `Σ c · x^a · e^(−s x) · erf(√(u x))^δ` on `(0, ∞)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaguerreExpansion {
    terms: BTreeMap<LaguerreKey, ExactScalar>,
}

impl LaguerreExpansion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (LaguerreKey, ExactScalar)>>(terms: I) -> Self {
        let mut out = Self::new();
        for (k, c) in terms {
            out.add_term(k, &c);
        }
        out
    }

    /// `c · x^a · e^(−s x)`.
    pub fn term(c: ExactScalar, a: Q, s: Q) -> Self {
        Self::from_terms([(LaguerreKey::plain(a, s), c)])
    }

    /// `c · x^a · e^(−s x) · erf(√(u x))`.
    pub fn erf_term(c: ExactScalar, a: Q, s: Q, u: Q) -> Self {
        Self::from_terms([(LaguerreKey::with_erf(a, s, u), c)])
    }

    pub fn add_term(&mut self, key: LaguerreKey, c: &ExactScalar) {
        if c.is_zero() {
            return;
        }
        debug_assert!(key.erf || key.u.is_zero());
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, c) in &other.terms {
            self.add_term(*k, c);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &ExactScalar) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(*k, &(v * c));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LaguerreKey, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &LaguerreKey) -> ExactScalar {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    /// Multiply by `e^(−s x)`.
    pub fn mul_exp(&self, s: Q) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (LaguerreKey { s: k.s + s, ..*k }, c.clone()))
                .collect(),
        }
    }

    /// Terms grouped by their transcendental factor `(δ, s, u)`, each group
    /// listed as `(a, c)` pairs.
    pub fn groups(&self) -> BTreeMap<(bool, Q, Q), Vec<(Q, ExactScalar)>> {
        let mut out: BTreeMap<(bool, Q, Q), Vec<(Q, ExactScalar)>> = BTreeMap::new();
        for (k, c) in &self.terms {
            out.entry((k.erf, k.s, k.u)).or_default().push((k.a, c.clone()));
        }
        out
    }

    pub fn has_erf(&self) -> bool {
        self.terms.keys().any(|k| k.erf)
    }

    /// All distinct erf rates present.
    pub fn erf_rates(&self) -> Vec<Q> {
        let mut v: Vec<Q> = self.terms.keys().filter(|k| k.erf).map(|k| k.u).collect();
        v.dedup();
        v.sort();
        v.dedup();
        v
    }

    /// Substitute `x → λ x` for a positive rational `λ`.
    pub fn rescale_argument(&self, lambda: Q) -> Self {
        assert!(lambda > Q::zero());
        let lr = q_to_rational(lambda);
        let mut out = Self::new();
        for (k, c) in &self.terms {
            assert!(k.a.is_integer() || is_half_odd(k.a), "unsupported exponent");
            let factor = ExactScalar::pow_half(&lr, (k.a * 2).to_integer());
            let key = LaguerreKey {
                erf: k.erf,
                s: k.s * lambda,
                u: k.u * lambda,
                a: k.a,
            };
            out.add_term(key, &(c * &factor));
        }
        out
    }

    fn integrate_plain(&self, out: &mut Self) -> Result<()> {
        for (k, c) in &self.terms {
            debug_assert!(!k.erf);
            if k.a <= qi(-1) {
                return Err(Error::IntegrabilityViolation { term: k.to_string() });
            }
            if k.s.is_zero() {
                let inv = q_to_rational(Q::one() / (k.a + 1));
                out.add_term(LaguerreKey::plain(k.a + 1, Q::zero()), &c.scale(&inv));
            } else if k.s < Q::zero() {
                return Err(Error::NonElementaryIntegral { term: k.to_string() });
            } else if k.a.is_integer() {
                // ∫₀ˣ t^r e^(−st) dt = r!/s^(r+1) · (1 − e^(−sx) Σ_{k≤r} (sx)^k/k!)
                let r = k.a.to_integer() as u32;
                let s = q_to_rational(k.s);
                let mut fact = Rational::from(1);
                for j in 1..=r {
                    fact *= j;
                }
                let lead = &fact / rational_pow(&s, i64::from(r) + 1) ;
                out.add_term(LaguerreKey::plain(Q::zero(), Q::zero()), &c.scale(&lead));
                let mut kfact = Rational::from(1);
                for j in 0..=r {
                    if j > 0 {
                        kfact *= j;
                    }
                    let coeff = (&lead * rational_pow(&s, i64::from(j))) / &kfact;
                    out.add_term(
                        LaguerreKey::plain(qi(i64::from(j)), k.s),
                        &c.scale(&(-coeff)),
                    );
                }
            } else if is_half_odd(k.a) {
                // ∫₀ˣ t^(m−1/2) e^(−st) dt
                //   = Γ(m+1/2) s^(−m−1/2) [erf(√(sx)) − e^(−sx) Σ_{k<m} (sx)^(k+1/2)/Γ(k+3/2)]
                let m = (k.a + q(1, 2)).to_integer();
                let g = q_to_rational(k.a + 1);
                let s = q_to_rational(k.s);
                let gamma = gamma_exact(k.a + 1)?;
                let lead = &gamma * &ExactScalar::pow_half(&s, -(2 * m + 1));
                out.add_term(LaguerreKey::with_erf(Q::zero(), Q::zero(), k.s), &(c * &lead));
                for j in 0..m {
                    let ratio = gamma_ratio(&g, (m - 1 - j) as u32)?;
                    let coeff = ratio * rational_pow(&s, j - m);
                    out.add_term(
                        LaguerreKey::plain(qi(j) + q(1, 2), k.s),
                        &c.scale(&(-coeff)),
                    );
                }
            } else {
                return Err(Error::NonElementaryIntegral { term: k.to_string() });
            }
        }
        Ok(())
    }

    fn fmt_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{k}")?;
        }
        Ok(())
    }
}

impl fmt::Display for LaguerreExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_terms(f)
    }
}

impl Expansion for LaguerreExpansion {
    fn zero() -> Self {
        Self::new()
    }

    fn constant(c: ExactScalar) -> Self {
        Self::term(c, Q::zero(), Q::zero())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    fn scale(&self, c: &ExactScalar) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        let mut out = Self::new();
        for (k, v) in &self.terms {
            out.add_term(*k, &(v * c));
        }
        out
    }

    fn mul_x_pow(&self, a: Q) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (LaguerreKey { a: k.a + a, ..*k }, c.clone()))
                .collect(),
        }
    }

    fn differentiate(&self) -> Self {
        let mut out = Self::new();
        for (k, c) in &self.terms {
            if !k.a.is_zero() {
                out.add_term(LaguerreKey { a: k.a - 1, ..*k }, &c.scale_q(k.a));
            }
            if !k.s.is_zero() {
                out.add_term(*k, &c.scale_q(-k.s));
            }
            if k.erf {
                // d/dx erf(√(ux)) = √(u/π) x^(−1/2) e^(−ux)
                let d = &ExactScalar::sqrt_rational(&q_to_rational(k.u))
                    * &ExactScalar::pi_pow_half(-1);
                out.add_term(LaguerreKey::plain(k.a - q(1, 2), k.s + k.u), &(c * &d));
            }
        }
        out
    }

    fn integrate_from_zero(&self) -> Result<Self> {
        let mut out = Self::new();
        let mut plain = Self::new();
        let mut chains: BTreeMap<(Q, Q), BTreeMap<Q, ExactScalar>> = BTreeMap::new();
        for (k, c) in &self.terms {
            if !k.erf {
                plain.add_term(*k, c);
                continue;
            }
            if k.a <= q(-3, 2) {
                return Err(Error::IntegrabilityViolation { term: k.to_string() });
            }
            if k.s < Q::zero() || k.a == qi(-1) {
                return Err(Error::NonElementaryIntegral { term: k.to_string() });
            }
            if k.s.is_zero() {
                // by parts: x^(a+1) erf/(a+1) − (√(u/π)/(a+1)) ∫ t^(a+1/2) e^(−ut)
                let inv = q_to_rational(Q::one() / (k.a + 1));
                out.add_term(LaguerreKey { a: k.a + 1, ..*k }, &c.scale(&inv));
                let d = &ExactScalar::sqrt_rational(&q_to_rational(k.u))
                    * &ExactScalar::pi_pow_half(-1);
                plain.add_term(
                    LaguerreKey::plain(k.a + q(1, 2), k.u),
                    &(&(c * &d).scale(&inv) * &ExactScalar::from_int(-1)),
                );
            } else {
                let chain = chains.entry((k.s, k.u)).or_default();
                let slot = chain.entry(k.a).or_default();
                *slot += c;
            }
        }
        // x^a e^(−sx) erf(√(ux)): one integration by parts lowers a by one
        // and spawns an erf-free term with rate s + u.
        for ((s, u), mut chain) in chains {
            let inv_s = q_to_rational(Q::one() / s);
            let d = &ExactScalar::sqrt_rational(&q_to_rational(u)) * &ExactScalar::pi_pow_half(-1);
            while let Some((a, c)) = chain.pop_last() {
                if c.is_zero() {
                    continue;
                }
                let key = LaguerreKey::with_erf(a, s, u);
                if a < Q::zero() {
                    return Err(Error::NonElementaryIntegral { term: key.to_string() });
                }
                let cs = c.scale(&inv_s);
                out.add_term(key, &(-&cs));
                if !a.is_zero() {
                    let slot = chain.entry(a - 1).or_default();
                    *slot += &cs.scale_q(a);
                }
                plain.add_term(LaguerreKey::plain(a - q(1, 2), s + u), &(&cs * &d));
            }
        }
        plain.integrate_plain(&mut out)?;
        Ok(out)
    }

    fn limit_at_endpoint(&self) -> Result<ExactScalar> {
        let mut acc = ExactScalar::zero();
        for (k, c) in &self.terms {
            if k.s > Q::zero() || (k.s.is_zero() && k.a < Q::zero()) {
                continue;
            }
            if k.s.is_zero() && k.a.is_zero() {
                acc += c;
                continue;
            }
            return Err(Error::DivergentLimit { term: k.to_string() });
        }
        Ok(acc)
    }

    fn value_at_zero(&self) -> Result<ExactScalar> {
        let mut acc = ExactScalar::zero();
        for (k, c) in &self.terms {
            if k.erf {
                // erf(√(ux)) ~ 2√(u/π) x^(1/2)
                if k.a > q(-1, 2) {
                    continue;
                }
                if k.a == q(-1, 2) {
                    let v = &ExactScalar::sqrt_rational(&q_to_rational(k.u))
                        * &ExactScalar::pi_pow_half(-1);
                    acc += &(c * &v.scale(&Rational::from(2)));
                    continue;
                }
            } else {
                if k.a > Q::zero() {
                    continue;
                }
                if k.a.is_zero() {
                    acc += c;
                    continue;
                }
            }
            return Err(Error::DivergentLimit { term: k.to_string() });
        }
        Ok(acc)
    }

    fn eval(&self, x: &Rational, digits: u32) -> Float {
        if x.is_zero() {
            let bits = crate::scalar::digits_to_bits(digits);
            return match self.value_at_zero() {
                Ok(v) => v.to_float(bits),
                Err(_) => Float::with_val(bits, rug::float::Special::Nan),
            };
        }
        eval_guarded(digits, |bits| {
            let xf = Float::with_val(bits, x);
            let mut sum = Float::with_val(bits, 0);
            let mut sumabs = Float::with_val(bits, 0);
            for (k, c) in &self.terms {
                let mut t = c.to_float(bits);
                t *= float_pow(&xf, k.a, bits);
                if !k.s.is_zero() {
                    let arg = Float::with_val(bits, -(q_to_float(k.s, bits) * &xf));
                    t *= arg.exp();
                }
                if k.erf {
                    let arg = Float::with_val(bits, q_to_float(k.u, bits) * &xf).sqrt();
                    t *= arg.erf();
                }
                sumabs += Float::with_val(bits, t.abs_ref());
                sum += &t;
            }
            (sum, sumabs)
        })
    }

    fn eval_f64(&self, x: f64) -> f64 {
        let mut sum = 0.0;
        for (k, c) in &self.terms {
            let mut t = c.to_f64() * x.powf(q_to_f64(k.a));
            if !k.s.is_zero() {
                t *= (-q_to_f64(k.s) * x).exp();
            }
            if k.erf {
                t *= libm::erf((q_to_f64(k.u) * x).sqrt());
            }
            sum += t;
        }
        sum
    }

    fn is_rational(&self) -> bool {
        self.terms.values().all(ExactScalar::is_rational)
    }

    fn num_terms(&self) -> usize {
        self.terms.len()
    }
}
