//! `F_N(1;x)` for `β = 1` Laguerre as a Pfaffian of incomplete-gamma
//! entries, normalized by its `x → ∞` limit.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::crosschecks::CheckRecord;
use crate::error::{Error, Result};
use crate::marginals::{compute_laguerre, EnsembleSpec, Ordering};
use crate::scalar::{digits_to_bits, fmt_q, is_half_odd, q_to_rational, Q};
use crate::symfunc::Expansion;

/// Regularized lower incomplete gamma `P(l;x)` for integer or half-integer
/// `l ≥ 0`, as the finite sum `1 − e^{−x}Σ x^k/k!` or
/// `erf(√x) − e^{−x}Σ x^{k+1/2}/Γ(k+3/2)`.
pub fn regularized_p(l: Q, x: &Float, bits: u32) -> Float {
    assert!(l >= Q::from_integer(0), "P(l;x) needs l ≥ 0");
    let ex = Float::with_val(bits, -x).exp();
    if l.is_integer() {
        let m = l.to_integer();
        let mut term = Float::with_val(bits, 1);
        let mut sum = Float::with_val(bits, 0);
        for k in 0..m {
            if k > 0 {
                term *= x;
                term /= k as u32;
            }
            sum += &term;
        }
        Float::with_val(bits, 1) - ex * sum
    } else {
        assert!(is_half_odd(l));
        let m = (l - Q::new(1, 2)).to_integer();
        let sx = Float::with_val(bits, x.sqrt_ref());
        // x^{1/2}/Γ(3/2), then ×x/(k+3/2)
        let mut term = Float::with_val(bits, &sx * 2u32) / Float::with_val(bits, Constant::Pi).sqrt();
        let mut sum = Float::with_val(bits, 0);
        for k in 0..m {
            if k > 0 {
                term *= x;
                term /= Float::with_val(bits, k) + 0.5f64;
            }
            sum += &term;
        }
        sx.erf() - ex * sum
    }
}

pub type Matrix = Vec<Vec<Float>>;

/// Pfaffian by skew-symmetric elimination with pivoting.
pub fn pfaffian(a: &Matrix) -> Result<Float> {
    let n = a.len();
    if n % 2 == 1 {
        return Err(Error::Invalid("Pfaffian of an odd-dimensional matrix".into()));
    }
    if n == 0 {
        return Ok(Float::with_val(64, 1));
    }
    let bits = a[0][0].prec();
    let mut m = a.clone();
    let mut pf = Float::with_val(bits, 1);
    for k in (0..n - 1).step_by(2) {
        let kp = (k + 1..n)
            .max_by(|&i, &j| {
                let (x, y) = (Float::with_val(bits, m[i][k].abs_ref()), Float::with_val(bits, m[j][k].abs_ref()));
                x.partial_cmp(&y).unwrap()
            })
            .unwrap();
        if kp != k + 1 {
            m.swap(k + 1, kp);
            for row in m.iter_mut() {
                row.swap(k + 1, kp);
            }
            pf = -pf;
        }
        if m[k + 1][k].is_zero() {
            return Ok(Float::with_val(bits, 0));
        }
        let piv = m[k][k + 1].clone();
        pf *= &piv;
        if k + 2 < n {
            let tau: Vec<Float> = (k + 2..n).map(|j| Float::with_val(bits, &m[k][j] / &piv)).collect();
            let col: Vec<Float> = (k + 2..n).map(|i| m[i][k + 1].clone()).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    let upd = Float::with_val(bits, &tau[ii] * &col[jj]) - Float::with_val(bits, &col[ii] * &tau[jj]);
                    m[i][j] += upd;
                }
            }
        }
    }
    Ok(pf)
}

/// Pfaffian by expansion along the first row; exponential cost, used for
/// small matrices and to validate [`pfaffian`].
pub fn pfaffian_expand(a: &Matrix) -> Result<Float> {
    let n = a.len();
    if n % 2 == 1 {
        return Err(Error::Invalid("Pfaffian of an odd-dimensional matrix".into()));
    }
    let idx: Vec<usize> = (0..n).collect();
    let bits = if n == 0 { 64 } else { a[0][0].prec() };
    Ok(expand(a, &idx, bits))
}

fn expand(a: &Matrix, idx: &[usize], bits: u32) -> Float {
    if idx.is_empty() {
        return Float::with_val(bits, 1);
    }
    let first = idx[0];
    let mut acc = Float::with_val(bits, 0);
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let rest: Vec<usize> = idx.iter().copied().filter(|&k| k != first && k != j).collect();
        let term = Float::with_val(bits, &a[first][j] * expand(a, &rest, bits));
        if pos % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(a: &Matrix) -> Float {
    let n = a.len();
    let bits = if n == 0 { 64 } else { a[0][0].prec() };
    let mut m = a.clone();
    let mut det = Float::with_val(bits, 1);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| {
                Float::with_val(bits, m[i][k].abs_ref())
                    .partial_cmp(&Float::with_val(bits, m[j][k].abs_ref()))
                    .unwrap()
            })
            .unwrap();
        if m[p][k].is_zero() {
            return Float::with_val(bits, 0);
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= &m[k][k];
        for i in k + 1..n {
            let f = Float::with_val(bits, &m[i][k] / &m[k][k]);
            for j in k..n {
                let d = Float::with_val(bits, &f * &m[k][j]);
                m[i][j] -= d;
            }
        }
    }
    det
}

/// Skew matrix whose Pfaffian is proportional to `F_N(1;x)`, or its
/// `x → ∞` limit when `x` is `None` (every `P → 1`, every `r → 0`).
pub fn assemble(big_n: usize, alpha: Q, x: Option<&Float>, bits: u32) -> Matrix {
    let fl = |v: Q| Float::with_val(bits, q_to_rational(v));
    let gamma = |v: Q| fl(v).gamma();
    let pow2 = |v: Q| Float::with_val(bits, 2).pow(fl(v));
    let at = |l: usize| alpha + l as i64;
    let pfun = |l: Q, arg: Option<&Float>| match arg {
        Some(v) => regularized_p(l, v, bits),
        None => Float::with_val(bits, 1),
    };
    let half_x = x.map(|v| Float::with_val(bits, v / 2u32));
    let p: Vec<Float> = (0..=big_n)
        .map(|l| if l == 0 { Float::with_val(bits, 0) } else { pfun(at(l), half_x.as_ref()) })
        .collect();
    let r = |l: usize| match &half_x {
        None => Float::with_val(bits, 0),
        Some(h) => {
            let e = Float::with_val(bits, -h).exp();
            let pw = Float::with_val(bits, h.pow(fl(at(l))));
            e * pw / gamma(at(l + 1))
        }
    };
    let q_l = |l: usize| {
        let t = alpha * 2 + l as i64;
        gamma(t) / pow2(t) * pfun(t, x)
    };
    let dim = if big_n.is_multiple_of(2) { big_n } else { big_n + 1 };
    let mut a = vec![vec![Float::with_val(bits, 0); dim]; dim];
    for i in 1..=big_n {
        let mut acc = Float::with_val(bits, 0);
        let gi = gamma(at(i));
        for k in 1..=big_n - i {
            let l = i + k - 1;
            let lhs = Float::with_val(bits, &p[i] * r(l));
            let rhs = q_l(i + l) * 2u32 / Float::with_val(bits, &gi * gamma(at(l + 1)));
            acc += rhs - lhs;
            a[i - 1][i + k - 1] = acc.clone();
            a[i + k - 1][i - 1] = Float::with_val(bits, -&acc);
        }
    }
    if big_n % 2 == 1 {
        let c = Float::with_val(bits, 1) / (pow2(at(big_n + 1)) * gamma(at(big_n + 1)));
        for i in 1..=big_n {
            let v = Float::with_val(bits, &c * &p[i]);
            a[i - 1][big_n] = v.clone();
            a[big_n][i - 1] = -v;
        }
    }
    a
}

/// `F_N(1;x)` for `β = 1`, `λ₁ = α`, at `digits` significant digits.
pub fn pfaffian_cdf(big_n: usize, alpha: Q, x: &Rational, digits: u32) -> Result<Float> {
    if big_n == 0 {
        return Err(Error::Invalid("N must be positive".into()));
    }
    if alpha <= Q::from_integer(-1) || !(alpha.is_integer() || is_half_odd(alpha)) {
        return Err(Error::Invalid("alpha must be an integer or half-integer above -1".into()));
    }
    let bits = digits_to_bits(2 * digits);
    let xf = Float::with_val(bits, x);
    let top = pfaffian(&assemble(big_n, alpha, Some(&xf), bits))?;
    let limit = pfaffian(&assemble(big_n, alpha, None, bits))?;
    if limit.is_zero() {
        return Err(Error::Numerical("Pfaffian normalization vanished".into()));
    }
    Ok(Float::with_val(digits_to_bits(digits), top / limit))
}

/// Compares [`pfaffian_cdf`] with the recursion's `F_N(1;x)` for
/// `2 ≤ N ≤ nmax` at each `x`, to absolute tolerance `10^{−tol_digits}`.
pub fn compare_with_recursion(
    alpha: Q,
    nmax: u32,
    xs: &[Rational],
    digits: u32,
    tol_digits: u32,
) -> Result<Vec<CheckRecord>> {
    let spec = EnsembleSpec::laguerre(1, alpha)?;
    let table = compute_laguerre(spec, nmax, Ordering::RowMajor, None)?;
    let bits = digits_to_bits(2 * digits);
    let tol = Float::with_val(bits, 10).pow(-(tol_digits as i32));
    let mut out = Vec::new();
    for big_n in 2..=nmax {
        let f = table.big_f(big_n, 1);
        for x in xs {
            let got = pfaffian_cdf(big_n as usize, alpha, x, digits)?;
            let want = f.eval(x, digits);
            let diff = Float::with_val(bits, &got - &want).abs();
            out.push(CheckRecord::new(
                format!("pfaffian alpha={} N={big_n} x={x}", fmt_q(alpha)),
                diff < tol,
                format!("|diff| = {}", diff.to_string_radix(10, Some(3))),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn f(v: f64) -> Float {
        Float::with_val(200, v)
    }

    #[test]
    fn small_pfaffians() {
        let a = vec![vec![f(0.0), f(3.0)], vec![f(-3.0), f(0.0)]];
        assert_eq!(pfaffian(&a).unwrap(), 3.0);
        let z = f(0.0);
        let b = vec![
            vec![z.clone(), f(2.0), z.clone(), z.clone()],
            vec![f(-2.0), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), z.clone(), f(5.0)],
            vec![z.clone(), z.clone(), f(-5.0), z.clone()],
        ];
        assert_eq!(pfaffian(&b).unwrap(), 10.0);
        assert_eq!(pfaffian_expand(&b).unwrap(), 10.0);
        assert!(pfaffian(&vec![vec![f(0.0)]]).is_err());
    }

    #[test]
    fn pfaffian_squared_is_determinant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 4, 6, 8] {
            let mut a = vec![vec![f(0.0); n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    a[i][j] = f(v);
                    a[j][i] = f(-v);
                }
            }
            let pf = pfaffian(&a).unwrap();
            let pe = pfaffian_expand(&a).unwrap();
            let det = determinant(&a);
            let sq = Float::with_val(200, &pf * &pf);
            let rel = Float::with_val(200, &sq - &det).abs() / det.clone().abs();
            assert!(rel < 1e-50, "n={n}");
            assert!(Float::with_val(200, &pf - &pe).abs() < 1e-50);
        }
    }

    #[test]
    fn incomplete_gamma_values() {
        let x = f(1.0);
        assert_eq!(regularized_p(q(0, 1), &x, 200), 1.0);
        let p1 = regularized_p(q(1, 1), &x, 200);
        assert!((p1 - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((regularized_p(q(1, 2), &x, 200) - libm::erf(1.0)).abs() < 1e-15);
        // erf(1) − e^{−1}/Γ(3/2)
        let want = libm::erf(1.0) - (-1.0f64).exp() / (std::f64::consts::PI.sqrt() / 2.0);
        assert!((regularized_p(q(3, 2), &x, 200) - want).abs() < 1e-15);
    }

    #[test]
    fn single_eigenvalue() {
        // N = 1, α = 1/2: F = P(3/2; x/2)
        let x = Rational::from(3);
        let v = pfaffian_cdf(1, q(1, 2), &x, 30).unwrap();
        let want = regularized_p(q(3, 2), &Float::with_val(200, 1.5), 200);
        assert!(Float::with_val(200, &v - &want).abs() < 1e-28);
    }
}
