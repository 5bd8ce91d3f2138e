//! Odd-size orthogonal Laguerre ensembles against symplectic ones: the
//! `2n`-th largest of `2N+1` eigenvalues at `β = 1, λ₁ = (a−1)/2` has the
//! law of the `n`-th largest of `N` at `β = 4, λ₁ = a+1` with the argument
//! halved.

use crate::crosschecks::CheckRecord;
use crate::error::Result;
use crate::marginals::{compute_laguerre, EnsembleSpec, Ordering};
use crate::scalar::{q, Q};

/// Compares both sides structurally for `1 ≤ n ≤ N ≤ nse`.
pub fn odd_even_check(a: i64, nse: u32) -> Result<Vec<CheckRecord>> {
    let goe = EnsembleSpec::laguerre(1, q(a - 1, 2))?;
    let gse = EnsembleSpec::laguerre(4, Q::from_integer(a + 1))?;
    let odd = compute_laguerre(goe, 2 * nse + 1, Ordering::RowMajor, None)?;
    let sym = compute_laguerre(gse, nse, Ordering::RowMajor, None)?;
    let mut out = Vec::new();
    for big_n in 1..=nse {
        for n in 1..=big_n {
            let lhs = odd.big_f(2 * big_n + 1, 2 * n);
            let rhs = sym.big_f(big_n, n).rescale_argument(q(1, 2));
            let ok = lhs == rhs;
            let detail = if ok { String::from("identical") } else { format!("{lhs}  vs  {rhs}") };
            out.push(CheckRecord::new(format!("oe-se a={a} N={big_n} n={n}"), ok, detail));
        }
    }
    Ok(out)
}
