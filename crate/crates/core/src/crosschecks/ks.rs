//! One-sample Kolmogorov–Smirnov comparison of sampled order statistics
//! with the exact marginal distributions.

use crate::crosschecks::sampling::{column, sample_eigenvalues};
use crate::crosschecks::CheckRecord;
use crate::error::Result;
use crate::marginals::{compute_table, EnsembleSpec, Ordering};

/// Critical constant for `√n D`; 1.63 is the 1% level of the limiting
/// Kolmogorov distribution.
pub const KS_CONSTANT: f64 = 1.63;

/// `sup |F(x) − F_emp(x)|` over the sample.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

pub fn ks_bound(n: usize) -> f64 {
    KS_CONSTANT / (n as f64).sqrt()
}

/// Samples `count` matrices and tests every order statistic for `N ≤ nmax`.
pub fn ks_check(spec: EnsembleSpec, nmax: u32, count: usize, seed: u64) -> Result<Vec<CheckRecord>> {
    let table = compute_table(spec, nmax, Ordering::RowMajor)?;
    let mut out = Vec::new();
    for big_n in 1..=nmax {
        let draws = sample_eigenvalues(&spec, big_n, count, seed.wrapping_add(u64::from(big_n)))?;
        for n in 1..=big_n {
            let col = column(&draws, n);
            let d = ks_statistic(&col, |x| table.cdf_f64(big_n, n, x));
            let bound = ks_bound(count);
            out.push(CheckRecord::new(
                format!("ks {spec} N={big_n} n={n}"),
                d < bound,
                format!("D = {d:.5}, bound {bound:.5} (5% level {:.5})", 1.358 / (count as f64).sqrt()),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_statistic() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_statistic(&xs, |x| x);
        assert!((d - 0.005).abs() < 1e-12);
        let d = ks_statistic(&xs, |x| x * x);
        assert!(d > 0.2);
    }
}
