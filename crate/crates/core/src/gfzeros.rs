//! Zeros of the gap-probability generating function
//! `Ξ_N(z;x) = Σ_n z^n E_N(n;(x,b))`, whether they all lie on the negative
//! real axis, and log-concavity of its coefficients.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::marginals::Table;
use crate::scalar::{digits_to_bits, q_to_rational, ExactScalar, Q};
use crate::symfunc::PiecewisePower;

const MAX_ITER: usize = 1000;

/// `Σ c_n z^n` with `c_n = E_N(n;(x0,b))`, held at twice the reporting precision.
#[derive(Clone, Debug)]
pub struct XiPolynomial {
    pub x0: Rational,
    pub coeffs: Vec<Float>,
    /// Reporting precision in decimal digits.
    pub digits: u32,
}

fn ten_pow(bits: u32, e: i32) -> Float {
    Float::with_val(bits, 10).pow(e)
}

impl XiPolynomial {
    /// From `E_N(0..=N; x0)`, each accurate to twice the reporting precision
    /// relative to its own size.
    pub fn from_gaps(x0: Rational, gaps: Vec<Float>, digits: u32) -> Result<Self> {
        let bits = digits_to_bits(2 * digits);
        let coeffs = gaps.into_iter().map(|g| Float::with_val(bits, g)).collect();
        let xi = Self { x0, coeffs, digits };
        xi.validate()?;
        Ok(xi)
    }

    /// Index of the highest non-zero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    fn bits(&self) -> u32 {
        digits_to_bits(2 * self.digits)
    }

    fn validate(&self) -> Result<()> {
        let bits = self.bits();
        let tol = ten_pow(bits, 5 - self.digits as i32);
        let mut sum = Float::with_val(bits, 0);
        for (n, c) in self.coeffs.iter().enumerate() {
            if *c < -tol.clone() {
                return Err(Error::Numerical(format!("E_N({n}) = {c} is negative at x = {}", self.x0)));
            }
            sum += c;
        }
        if Float::with_val(bits, &sum - 1u32).abs() > tol {
            return Err(Error::Numerical(format!("gap probabilities sum to {sum} at x = {}", self.x0)));
        }
        Ok(())
    }

    /// Coefficients are relatively accurate, so only exact zeros are dropped.
    fn is_negligible(&self, c: &Float) -> bool {
        c.is_zero()
    }

    pub fn eval(&self, z: &Complex) -> Complex {
        horner(&self.coeffs, z)
    }

    /// `log E_{n+1} + log E_{n−1} ≤ 2 log E_n` in the multiplicative form
    /// `E_{n+1}E_{n−1} ≤ E_n²(1 + 10^{5−P})`, over the block of positive
    /// coefficients.
    pub fn log_concave(&self) -> bool {
        let bits = self.bits();
        let slack = Float::with_val(bits, 1u32 + ten_pow(bits, 5 - self.digits as i32));
        let pos: Vec<&Float> = self.coeffs.iter().filter(|c| !self.is_negligible(c)).collect();
        pos.windows(3).all(|w| {
            let lhs = Float::with_val(bits, w[2] * w[0]);
            let rhs = Float::with_val(bits, w[1] * w[1]) * &slack;
            lhs <= rhs
        })
    }
}

/// `Ξ_N(z;x0)` from a marginal table.
pub fn build_xi(table: &Table, big_n: u32, x0: &Rational, digits: u32) -> Result<XiPolynomial> {
    if big_n == 0 || big_n > table.nmax() {
        return Err(Error::Invalid(format!("row N = {big_n} not in table")));
    }
    let gaps = (0..=big_n).map(|k| table.gap_value(big_n, k, x0, 2 * digits)).collect();
    XiPolynomial::from_gaps(x0.clone(), gaps, digits)
}

/// `Ξ_N(z;x0)` for the fixed-trace ensemble from its row of distributions.
pub fn build_fixed_trace_xi(row: &[PiecewisePower], x0: Q, digits: u32) -> Result<XiPolynomial> {
    let bits = digits_to_bits(2 * digits);
    let mut cdf = vec![ExactScalar::zero()];
    for f in row {
        cdf.push(f.left_limit(x0)?);
    }
    cdf.push(ExactScalar::one());
    // exact differences keep tiny gaps meaningful
    let gaps = cdf.windows(2).map(|w| (&w[1] - &w[0]).to_float(bits)).collect();
    XiPolynomial::from_gaps(q_to_rational(x0), gaps, digits)
}

fn horner(coeffs: &[Float], z: &Complex) -> Complex {
    let prec = z.prec();
    let mut acc = Complex::with_val(prec, 0);
    for c in coeffs.iter().rev() {
        acc *= z;
        acc += c;
    }
    acc
}

fn horner_with_derivative(coeffs: &[Float], z: &Complex) -> (Complex, Complex) {
    let prec = z.prec();
    let mut p = Complex::with_val(prec, 0);
    let mut d = Complex::with_val(prec, 0);
    for c in coeffs.iter().rev() {
        d *= z;
        d += &p;
        p *= z;
        p += c;
    }
    (p, d)
}

fn cabs(z: &Complex, bits: u32) -> Float {
    Float::with_val(bits, z.abs_ref())
}

/// Companion-matrix eigenvalues in `f64`, nudged apart and away from zero.
fn initial_guesses(coeffs: &[Float], bits: u32) -> Vec<Complex> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].to_f64();
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i].to_f64() / lead;
    }
    let eig = comp.complex_eigenvalues();
    let finite = eig.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    let scale = (coeffs[0].to_f64().abs() / lead.abs()).powf(1.0 / n as f64);
    (0..n)
        .map(|k| {
            // rotate slightly so real roots do not start exactly on the axis
            let angle = 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let (mut re, mut im) = if finite { (eig[k].re, eig[k].im) } else { (0.0, 0.0) };
            let mag = (re * re + im * im).sqrt();
            let r = if mag > 0.0 { mag * 1e-3 } else if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
            re += r * angle.cos();
            im += r * angle.sin();
            Complex::with_val(bits, (re, im))
        })
        .collect()
}

/// All roots of `Σ c_n z^n` by Aberth iteration at `bits` precision; zero
/// roots from vanishing low-order coefficients are returned exactly.
fn aberth(coeffs: &[Float], bits: u32, stop: &Float) -> Result<Vec<Complex>> {
    let n = coeffs.len() - 1;
    let mut z = initial_guesses(coeffs, bits);
    for _ in 0..MAX_ITER {
        let mut worst = Float::with_val(bits, 0);
        for k in 0..n {
            let (p, d) = horner_with_derivative(coeffs, &z[k]);
            if p.is_zero() {
                continue;
            }
            let w = Complex::with_val(bits, &p / &d);
            let mut s = Complex::with_val(bits, 0);
            for j in 0..n {
                if j != k {
                    let diff = Complex::with_val(bits, &z[k] - &z[j]);
                    s += diff.recip();
                }
            }
            let denom = Complex::with_val(bits, 1u32 - Complex::with_val(bits, &w * &s));
            let step = Complex::with_val(bits, &w / &denom);
            let rel = cabs(&step, bits) / (cabs(&z[k], bits) + ten_pow(bits, -(bits as i32) / 4));
            if rel > worst {
                worst = rel;
            }
            z[k] -= step;
        }
        if worst < *stop {
            return Ok(z);
        }
    }
    Err(Error::Numerical(format!("Aberth iteration did not converge for degree {n}")))
}

/// Roots of `Ξ`, polished by Newton's method; each satisfies
/// `|Ξ(z)| < 10^{10−P} Σ|c_n||z|^n`.
pub fn find_zeros(xi: &XiPolynomial) -> Result<Vec<Complex>> {
    let bits = xi.bits();
    let mut coeffs = xi.coeffs.clone();
    while coeffs.len() > 1 && xi.is_negligible(coeffs.last().unwrap()) {
        coeffs.pop();
    }
    let zero_roots = coeffs.iter().take_while(|c| xi.is_negligible(c)).count();
    let reduced = &coeffs[zero_roots..];
    let mut roots: Vec<Complex> = (0..zero_roots).map(|_| Complex::with_val(bits, 0)).collect();
    if reduced.len() >= 2 {
        let stop = ten_pow(bits, 5 - 2 * xi.digits as i32);
        let found = if reduced.len() == 2 {
            vec![Complex::with_val(bits, -Float::with_val(bits, &reduced[0] / &reduced[1]))]
        } else {
            aberth(reduced, bits, &stop)?
        };
        for mut r in found {
            for _ in 0..3 {
                let (p, d) = horner_with_derivative(reduced, &r);
                if p.is_zero() || d.is_zero() {
                    break;
                }
                r -= Complex::with_val(bits, &p / &d);
            }
            roots.push(r);
        }
    }
    let tol = ten_pow(bits, 10 - xi.digits as i32);
    for r in &roots {
        let res = cabs(&horner(&coeffs, r), bits);
        let modulus = cabs(r, bits);
        let abs_coeffs: Vec<Float> = coeffs.iter().map(|c| Float::with_val(bits, c.abs_ref())).collect();
        let scale = cabs(&horner(&abs_coeffs, &Complex::with_val(bits, &modulus)), bits);
        if !res.is_zero() && res >= Float::with_val(bits, &scale * &tol) {
            return Err(Error::Numerical(format!("root {r} has residual {res} against scale {scale}")));
        }
    }
    roots.sort_by(|a, b| a.real().partial_cmp(b.real()).unwrap().then(a.imag().partial_cmp(b.imag()).unwrap()));
    Ok(roots)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootClass {
    NegativeReal,
    Zero,
    /// Off the negative real axis; the conjecture says this should not happen.
    Investigate,
}

/// Negative real if `|Im| < 10^{10−P}(1+|Re|)` and `Re < 0`.
pub fn classify(z: &Complex, digits: u32) -> RootClass {
    if z.is_zero() {
        return RootClass::Zero;
    }
    let bits = z.prec().0;
    let re = z.real();
    let tol = Float::with_val(bits, 1u32 + Float::with_val(bits, re.abs_ref())) * ten_pow(bits, 10 - digits as i32);
    if Float::with_val(bits, z.imag().abs_ref()) < tol && *re < 0 {
        RootClass::NegativeReal
    } else {
        RootClass::Investigate
    }
}

/// `|c_N Π z_i − (−1)^d c_0|` relative to `c_0`, over the trimmed polynomial.
pub fn vieta_defect(xi: &XiPolynomial, roots: &[Complex]) -> Float {
    let bits = xi.bits();
    let nonzero: Vec<&Complex> = roots.iter().filter(|r| !r.is_zero()).collect();
    let Some(lead) = xi.coeffs.iter().rev().find(|c| !xi.is_negligible(c)) else {
        return Float::with_val(bits, 0);
    };
    let Some(c0) = xi.coeffs.iter().find(|c| !xi.is_negligible(c)) else {
        return Float::with_val(bits, 0);
    };
    let mut prod = Complex::with_val(bits, lead);
    for r in &nonzero {
        prod *= *r;
    }
    let sign = if nonzero.len().is_multiple_of(2) { 1 } else { -1 };
    let target = Float::with_val(bits, c0 * sign);
    cabs(&Complex::with_val(bits, &prod - &target), bits) / Float::with_val(bits, target.abs_ref())
}

/// Largest distance between matched roots of two root lists, relative to
/// `1 + |z|`. Roots are matched greedily.
pub fn root_set_distance(a: &[Complex], b: &[Complex], bits: u32) -> Float {
    if a.len() != b.len() {
        return Float::with_val(bits, f64::INFINITY);
    }
    let mut used = vec![false; b.len()];
    let mut worst = Float::with_val(bits, 0);
    for za in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, zb)| (j, cabs(&Complex::with_val(bits, za - zb), bits)))
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        used[j] = true;
        let rel = d / (Float::with_val(bits, 1u32) + cabs(za, bits));
        if rel > worst {
            worst = rel;
        }
    }
    worst
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub x0: Rational,
    pub roots: Vec<(Complex, RootClass)>,
    pub log_concave: bool,
}

impl ScanRow {
    pub fn violations(&self) -> usize {
        self.roots.iter().filter(|(_, c)| *c == RootClass::Investigate).count()
    }
}

/// Roots of `Ξ_N(·;x)` at each grid point, classified.
pub fn negativity_scan(table: &Table, big_n: u32, grid: &[Rational], digits: u32) -> Result<Vec<ScanRow>> {
    grid.par_iter()
        .map(|x0| {
            let xi = build_xi(table, big_n, x0, digits)?;
            let roots = find_zeros(&xi)?;
            Ok(ScanRow {
                x0: x0.clone(),
                roots: roots.into_iter().map(|z| {
                    let c = classify(&z, digits);
                    (z, c)
                }).collect(),
                log_concave: xi.log_concave(),
            })
        })
        .collect()
}

/// `x0,re,im,class,log_concave` with one line per root.
pub fn scan_csv(rows: &[ScanRow], digits: u32) -> String {
    let mut out = String::from("x0,re,im,class,log_concave\n");
    for row in rows {
        for (z, class) in &row.roots {
            let class = serde_json::to_value(class).unwrap();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                row.x0,
                z.real().to_string_radix(10, Some(digits as usize)),
                z.imag().to_string_radix(10, Some(digits as usize)),
                class.as_str().unwrap(),
                row.log_concave
            );
        }
    }
    out
}
