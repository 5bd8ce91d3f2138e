//! Monte Carlo eigenvalue samplers for Wishart (Laguerre) and MANOVA
//! (Jacobi) matrices at `β ∈ {1, 2}`.
//!
//! Trials are drawn in blocks of [`BLOCK`]; block `k` uses ChaCha8 seeded
//! with `seed` on stream `k`, so results do not depend on thread count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::marginals::{EnsembleSpec, Family};
use crate::scalar::Q;

pub const BLOCK: usize = 1000;

/// Number of rows `n` with `λ = (β/2)(n − N + 1) − 1`.
pub fn rows_for(lambda: Q, beta: u32, big_n: u32) -> Result<usize> {
    let n = (lambda + 1) * 2 / i64::from(beta) + i64::from(big_n) - 1;
    if !n.is_integer() || n.to_integer() < i64::from(big_n) {
        return Err(Error::RegimeUnsupported(format!(
            "lambda = {lambda} at beta = {beta}, N = {big_n} needs a non-integer or too small sample size"
        )));
    }
    Ok(n.to_integer() as usize)
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize, beta: u32) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        if beta == 1 {
            Complex64::new(rng.sample(StandardNormal), 0.0)
        } else {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Complex64::new(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal))
        }
    })
}

fn sorted_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

struct Plan {
    family: Family,
    beta: u32,
    big_n: usize,
    n1: usize,
    n2: usize,
}

impl Plan {
    fn trial(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let x = gaussian(rng, self.n1, self.big_n, self.beta);
        let w1 = x.adjoint() * &x;
        match self.family {
            Family::Laguerre => sorted_eigenvalues(w1),
            Family::Jacobi => {
                let y = gaussian(rng, self.n2, self.big_n, self.beta);
                let w2 = y.adjoint() * &y;
                let total = &w1 + w2;
                let l = total.cholesky().expect("Wishart sum is positive definite").unpack();
                let m = l.solve_lower_triangular(&w1).expect("triangular solve");
                let inner = l.solve_lower_triangular(&m.adjoint()).expect("triangular solve");
                sorted_eigenvalues(inner.adjoint())
            }
        }
    }
}

/// `count` independent draws of the ordered eigenvalues (largest first).
pub fn sample_eigenvalues(spec: &EnsembleSpec, big_n: u32, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if !(spec.beta == 1 || spec.beta == 2) {
        return Err(Error::RegimeUnsupported(format!("sampling needs beta in {{1, 2}}, got {}", spec.beta)));
    }
    let n1 = rows_for(spec.lambda1, spec.beta, big_n)?;
    let n2 = match spec.family {
        Family::Laguerre => 0,
        Family::Jacobi => rows_for(spec.lambda2, spec.beta, big_n)?,
    };
    let plan = Plan { family: spec.family, beta: spec.beta, big_n: big_n as usize, n1, n2 };
    let blocks = count.div_ceil(BLOCK);
    let out: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let take = BLOCK.min(count - b * BLOCK);
            (0..take).map(|_| plan.trial(&mut rng)).collect::<Vec<_>>()
        })
        .collect();
    Ok(out)
}

/// Draws for one order statistic, `n = 1` being the largest.
pub fn column(draws: &[Vec<f64>], n: u32) -> Vec<f64> {
    draws.iter().map(|v| v[n as usize - 1]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    #[test]
    fn sample_size_from_lambda() {
        assert_eq!(rows_for(qi(0), 1, 3).unwrap(), 4);
        assert_eq!(rows_for(q(-1, 2), 1, 3).unwrap(), 3);
        assert_eq!(rows_for(qi(1), 2, 2).unwrap(), 3);
        assert!(rows_for(q(1, 2), 2, 2).is_err());
        assert!(rows_for(q(-1, 2), 1, 1).is_ok());
    }

    #[test]
    fn reproducible_and_ordered() {
        let spec = EnsembleSpec::jacobi(2, qi(1), qi(0)).unwrap();
        let a = sample_eigenvalues(&spec, 3, 2500, 7).unwrap();
        let b = sample_eigenvalues(&spec, 3, 2500, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2500);
        for v in &a {
            assert!(v.windows(2).all(|w| w[0] >= w[1]));
            assert!(v.iter().all(|&x| x > 0.0 && x < 1.0));
        }
    }

    #[test]
    fn wishart_trace_mean() {
        // E tr W = n1 N for unit-variance entries
        let spec = EnsembleSpec::laguerre(1, qi(1)).unwrap();
        let n1 = rows_for(spec.lambda1, 1, 2).unwrap();
        let draws = sample_eigenvalues(&spec, 2, 20_000, 3).unwrap();
        let mean: f64 = draws.iter().map(|v| v.iter().sum::<f64>()).sum::<f64>() / draws.len() as f64;
        assert!((mean - (2 * n1) as f64).abs() < 0.15, "{mean}");
    }
}
