//! Direct numerical integration of the joint eigenvalue density for small
//! `N`. Each integral runs over an ordered region so the Vandermonde factor
//! is smooth inside it.

use num_traits::ToPrimitive;

use crate::crosschecks::quad::{integrate, integrate_to_infinity};
use crate::crosschecks::CheckRecord;
use crate::error::{Error, Result};
use crate::marginals::{compute_table, EnsembleSpec, Family, Ordering};
use crate::scalar::Q;

const REL_TOL: f64 = 1e-12;

/// One block of ordered variables `hi > v₁ > v₂ > … > lo`.
#[derive(Clone, Copy, Debug)]
struct Block {
    lo: f64,
    hi: f64,
    count: usize,
}

struct Density {
    family: Family,
    beta: f64,
    l1: f64,
    l2: f64,
}

impl Density {
    fn new(spec: &EnsembleSpec) -> Self {
        let f = |v: Q| v.to_f64().unwrap();
        Self { family: spec.family, beta: f64::from(spec.beta), l1: f(spec.lambda1), l2: f(spec.lambda2) }
    }

    fn top(&self) -> f64 {
        match self.family {
            Family::Laguerre => f64::INFINITY,
            Family::Jacobi => 1.0,
        }
    }

    fn eval(&self, v: &[f64]) -> f64 {
        let mut p = 1.0;
        for (i, &x) in v.iter().enumerate() {
            p *= match self.family {
                Family::Laguerre => x.powf(self.l1) * (-0.5 * self.beta * x).exp(),
                Family::Jacobi => x.powf(self.l1) * (1.0 - x).powf(self.l2),
            };
            for &y in &v[i + 1..] {
                p *= (x - y).abs().powf(self.beta);
            }
        }
        p
    }

    fn nested(&self, blocks: &[Block], vars: &mut Vec<f64>, level: usize, within: usize, prev: f64) -> f64 {
        let Some(block) = blocks.get(level) else {
            return self.eval(vars);
        };
        if within == block.count {
            return self.nested(blocks, vars, level + 1, 0, f64::NAN);
        }
        let hi = if within == 0 { block.hi } else { prev };
        let mut inner = |t: f64| {
            vars.push(t);
            let v = self.nested(blocks, vars, level, within + 1, t);
            vars.pop();
            v
        };
        if hi.is_infinite() {
            integrate_to_infinity(&mut inner, block.lo, 0.0, REL_TOL)
        } else {
            integrate(&mut inner, block.lo, hi, 0.0, REL_TOL)
        }
    }

    fn over(&self, blocks: &[Block]) -> f64 {
        let mut vars = Vec::new();
        self.nested(blocks, &mut vars, 0, 0, f64::NAN)
    }
}

/// `F_N(n;x)` for `n = 1..=N`, each as the probability that at most `n−1`
/// eigenvalues exceed `x`.
pub fn brute_force_row(spec: &EnsembleSpec, big_n: u32, x: f64) -> Result<Vec<f64>> {
    if big_n == 0 || big_n > 4 {
        return Err(Error::Invalid(format!("brute force needs 1 ≤ N ≤ 4, got N={big_n}")));
    }
    let d = Density::new(spec);
    let top = d.top();
    if !(x > 0.0 && x < top) {
        return Err(Error::Invalid(format!("x = {x} outside the support")));
    }
    let big_n = big_n as usize;
    let z = d.over(&[Block { lo: 0.0, hi: top, count: big_n }]);
    let mut total = 0.0;
    let mut row = Vec::with_capacity(big_n);
    for k in 0..big_n {
        let blocks = [Block { lo: x, hi: top, count: k }, Block { lo: 0.0, hi: x, count: big_n - k }];
        total += d.over(&blocks);
        row.push(total / z);
    }
    Ok(row)
}

pub fn brute_force_cdf(spec: &EnsembleSpec, big_n: u32, n: u32, x: f64) -> Result<f64> {
    if n == 0 || n > big_n {
        return Err(Error::Invalid(format!("need 1 ≤ n ≤ N, got N={big_n}, n={n}")));
    }
    Ok(brute_force_row(spec, big_n, x)?[n as usize - 1])
}

/// Compares the recursion's `F_N(n;x)` with the quadrature at each `x`,
/// for every `n ≤ N ≤ nmax`.
pub fn compare_with_recursion(spec: EnsembleSpec, nmax: u32, xs: &[f64], tol: f64) -> Result<Vec<CheckRecord>> {
    let table = compute_table(spec, nmax, Ordering::RowMajor)?;
    let mut out = Vec::new();
    for big_n in 1..=nmax {
        for &x in xs {
            let row = brute_force_row(&spec, big_n, x)?;
            for (n, numeric) in (1..=big_n).zip(row) {
                let exact = table.cdf_f64(big_n, n, x);
                let diff = (exact - numeric).abs();
                out.push(CheckRecord::new(
                    format!("brute-force {spec} N={big_n} n={n} x={x}"),
                    diff < tol,
                    format!("recursion {exact:.15e}, quadrature {numeric:.15e}, |diff| {diff:.2e}"),
                ));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    #[test]
    fn single_exponential() {
        // N = 1, β = 2, λ₁ = 0: density e^{−x}
        let spec = EnsembleSpec::laguerre(2, qi(0)).unwrap();
        let v = brute_force_cdf(&spec, 1, 1, 1.5).unwrap();
        assert!((v - (1.0 - (-1.5f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn two_uniform_points() {
        // Jacobi λ = 0, β = 0 is excluded, so use β = 1: density ∝ |x−y| on the square
        // largest ≤ x: x³, smallest ≤ x: 1 − (1−x)³
        let spec = EnsembleSpec::jacobi(1, qi(0), qi(0)).unwrap();
        let x = 0.3;
        assert!((brute_force_cdf(&spec, 2, 1, x).unwrap() - x * x * x).abs() < 1e-12);
        let want = 1.0 - (1.0f64 - x).powi(3);
        assert!((brute_force_cdf(&spec, 2, 2, x).unwrap() - want).abs() < 1e-12);
    }
}
