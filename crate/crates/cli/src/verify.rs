//! Built-in verification suites, shared by `betaorder verify` and the
//! acceptance test target.

use std::collections::BTreeMap;
use std::time::Instant;

use betaorder::crosschecks::{bruteforce, ks, oese, pfaffian, CheckRecord};
use betaorder::fixedtrace::{conductance_pdf, fixed_trace_row};
use betaorder::gfzeros::{build_xi, classify, find_zeros, RootClass};
use betaorder::marginals::{compute_laguerre, compute_table, largest_shape_polynomials, EnsembleSpec, Ordering};
use betaorder::scalar::{q, q_to_rational, qi};
use betaorder::symfunc::{PiecewisePower, PwTerm, Step};
use betaorder::{ExactScalar, Q};
use num_traits::Zero;
use rayon::prelude::*;
use rug::{Float, Rational};
use serde::Serialize;

use crate::args::Suite;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    /// Findings that do not fail the suite but deserve a look.
    pub investigate: Vec<String>,
    #[serde(skip)]
    pub seconds: f64,
}

pub const SUITES: [Suite; 11] = [
    Suite::HalfIntegerLargestThree,
    Suite::HalfIntegerLargestFour,
    Suite::Conductance,
    Suite::FixedTrace,
    Suite::GfZeros,
    Suite::Pfaffian,
    Suite::OddEven,
    Suite::BruteForce,
    Suite::Properties,
    Suite::MonteCarlo,
    Suite::NegativityScan,
];

pub fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::All => "all",
        Suite::HalfIntegerLargestThree => "half-integer-largest-three",
        Suite::HalfIntegerLargestFour => "half-integer-largest-four",
        Suite::Conductance => "conductance",
        Suite::FixedTrace => "fixed-trace",
        Suite::GfZeros => "gf-zeros",
        Suite::Pfaffian => "pfaffian",
        Suite::OddEven => "odd-even",
        Suite::BruteForce => "brute-force",
        Suite::Properties => "properties",
        Suite::MonteCarlo => "monte-carlo",
        Suite::NegativityScan => "negativity-scan",
    }
}

/// Runs one suite; errors inside a suite become failed checks.
pub fn run_suite(s: Suite) -> SuiteReport {
    let id = SUITES.iter().position(|&x| x == s).map_or(0, |i| i as u32 + 1);
    let start = Instant::now();
    let mut investigate = Vec::new();
    let result = match s {
        Suite::All => Ok(Vec::new()),
        Suite::HalfIntegerLargestThree => largest_three(),
        Suite::HalfIntegerLargestFour => largest_four(),
        Suite::Conductance => conductance(),
        Suite::FixedTrace => fixed_trace(),
        Suite::GfZeros => gf_zeros(),
        Suite::Pfaffian => pfaffian_suite(),
        Suite::OddEven => odd_even(),
        Suite::BruteForce => brute_force(),
        Suite::Properties => properties(),
        Suite::MonteCarlo => monte_carlo(),
        Suite::NegativityScan => negativity(&mut investigate),
    };
    let checks = match result {
        Ok(c) => c,
        Err(e) => vec![CheckRecord::new("suite", false, e.to_string())],
    };
    SuiteReport {
        id,
        name: suite_name(s).to_string(),
        passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
        checks,
        investigate,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run(s: Suite) -> Vec<SuiteReport> {
    match s {
        Suite::All => SUITES.iter().map(|&x| run_suite(x)).collect(),
        other => vec![run_suite(other)],
    }
}

type Checks = betaorder::Result<Vec<CheckRecord>>;

fn s(text: &str) -> ExactScalar {
    text.parse().expect("reference scalar")
}

fn poly(cs: &[&str]) -> Vec<ExactScalar> {
    cs.iter().map(|c| s(c)).collect()
}

fn compare_shapes(
    got: BTreeMap<(u32, u32), Vec<ExactScalar>>,
    want: BTreeMap<(u32, u32), Vec<ExactScalar>>,
) -> Vec<CheckRecord> {
    let keys: std::collections::BTreeSet<_> = got.keys().chain(want.keys()).copied().collect();
    keys.into_iter()
        .map(|k| {
            let (g, w) = (got.get(&k), want.get(&k));
            let show = |v: Option<&Vec<ExactScalar>>| match v {
                None => "0".to_string(),
                Some(v) => v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
            };
            CheckRecord::new(format!("p({}, {})", k.0, k.1), g == w, format!("got [{}], want [{}]", show(g), show(w)))
        })
        .collect()
}

fn half_integer_shapes(nmax: u32) -> betaorder::Result<BTreeMap<(u32, u32), Vec<ExactScalar>>> {
    let spec = EnsembleSpec::laguerre(1, q(-1, 2))?;
    let t = compute_laguerre(spec, nmax, Ordering::RowMajor, None)?;
    largest_shape_polynomials(&t.big_f(nmax, 1), nmax).map_err(betaorder::Error::Numerical)
}

/// Largest of three, `β = 1`, `λ₁ = −1/2`: polynomial coefficients of each
/// `x^{l/2} e^{−lx/2}` (slot 1) and `erf`-carrying (slot 2) block.
fn largest_three() -> Checks {
    let mut want = BTreeMap::new();
    want.insert((1, 1), poly(&["1*sqrt(2)*pi^(-1/2)", "-1*sqrt(2)*pi^(-1/2)"]));
    want.insert((2, 1), poly(&["-1*sqrt(2)*pi^(-1/2)"]));
    want.insert((1, 2), poly(&["1"]));
    want.insert((2, 2), poly(&["-1", "-1"]));
    Ok(compare_shapes(half_integer_shapes(3)?, want))
}

/// Largest of four; the `x²` coefficient of the `(1, 2)` block is
/// `−√(π/2)/4`, and the `(3, 2)` block is absent.
fn largest_four() -> Checks {
    let r = "sqrt(2)*pi^(1/2)";
    let mut want = BTreeMap::new();
    want.insert((1, 1), poly(&["1"]));
    want.insert((2, 1), poly(&["-2", "-1/2", "-1/2", "-1/4"]));
    want.insert((3, 1), poly(&["1", "1/2"]));
    want.insert((1, 2), poly(&[&format!("-3/4*{r}"), &format!("1/2*{r}"), &format!("-1/8*{r}")]));
    want.insert((2, 2), poly(&[&format!("3/4*{r}"), &format!("1/4*{r}")]));
    Ok(compare_shapes(half_integer_shapes(4)?, want))
}

/// Adds `c·v^a·(σ(v−q))^e` restricted to `lo < v < hi`.
fn window(p: &mut PiecewisePower, c: ExactScalar, a: Q, shift: (Q, i8, Q), lo: Q, hi: Q) {
    let (qq, sigma, e) = shift;
    let start = if lo.is_zero() { Step::Always } else { Step::Above(lo) };
    p.push(PwTerm::new(c.clone(), a, qq, sigma, e, start));
    if hi < p.hi {
        p.push(PwTerm::new(-c, a, qq, sigma, e, Step::Above(hi)));
    }
}

fn r(n: i64, d: i64) -> ExactScalar {
    ExactScalar::from_q(q(n, d))
}

const PLAIN: (Q, i8, Q) = (Q::ZERO, 1, Q::ZERO);

/// Conductance density for three channels in each lead, `β = 1`.
pub fn conductance_three() -> PiecewisePower {
    let mut want = PiecewisePower::new(qi(0), qi(3));
    window(&mut want, r(6, 7), q(7, 2), PLAIN, qi(0), qi(1));
    for (c, a) in [(35, 3), (-175, 2), (273, 1), (-125, 0)] {
        window(&mut want, r(3 * c, 28), qi(a), PLAIN, qi(1), qi(3));
    }
    let sh = (qi(2), 1, q(5, 2));
    window(&mut want, r(-24, 28), qi(1), sh, qi(2), qi(3));
    window(&mut want, r(-120, 28), qi(0), sh, qi(2), qi(3));
    want
}

/// Conductance density for four channels in each lead, `β = 1`.
pub fn conductance_four() -> PiecewisePower {
    let c = q(5, 27456);
    let mut want = PiecewisePower::new(qi(0), qi(4));
    window(&mut want, ExactScalar::from_q(c * 429), qi(7), PLAIN, qi(0), qi(2));
    let sh = (qi(1), 1, q(9, 2));
    for (k, a) in [(6, 2), (-64, 1), (201, 0)] {
        window(&mut want, ExactScalar::from_q(c * -512 * k), qi(a), sh, qi(1), qi(2));
    }
    for (k, a) in [
        (429, 7),
        (-72072, 5),
        (672672, 4),
        (-2800512, 3),
        (6150144, 2),
        (-6935552, 1),
        (3158016, 0),
    ] {
        window(&mut want, ExactScalar::from_q(-c * k), qi(a), PLAIN, qi(2), qi(4));
    }
    let sh = (qi(3), 1, q(11, 2));
    for (k, a) in [(3, 1), (4, 0)] {
        window(&mut want, ExactScalar::from_q(c * 1024 * k), qi(a), sh, qi(3), qi(4));
    }
    want
}

fn conductance() -> Checks {
    let mut out = Vec::new();
    for (size, want) in [(3, conductance_three()), (4, conductance_four())] {
        let got = conductance_pdf(size, size, 1)?;
        let same = got.structurally_equal(&want);
        let detail = if same { "identical after per-interval collapse".to_string() } else { format!("got\n{got}") };
        out.push(CheckRecord::new(format!("conductance N1=N2={size}"), same, detail));
        let mass = got.integral_exact()?;
        out.push(CheckRecord::new(format!("conductance N1=N2={size} mass"), mass == ExactScalar::one(), mass.to_string()));
    }
    Ok(out)
}

/// Unit-trace largest of three, `β = 1`, `λ₁ = −1/2`.
pub fn fixed_trace_largest_three() -> PiecewisePower {
    let mut want = PiecewisePower::new(qi(0), qi(1));
    let (third, half, one) = (q(1, 3), q(1, 2), qi(1));
    for (c, a) in [(35, 1), (-175, 3), (273, 5), (-125, 7)] {
        window(&mut want, r(c, 8), q(a, 2), PLAIN, third, one);
    }
    // −(1−2x)^{5/2}(1+5x) on 1/3 < x < 1/2, with (1−2x)^{5/2} = 4√2 (1/2 − x)^{5/2}
    let k = s("-4*sqrt(2)");
    window(&mut want, k.clone(), qi(0), (half, -1, q(5, 2)), third, half);
    window(&mut want, &k * &r(5, 1), qi(1), (half, -1, q(5, 2)), third, half);
    want
}

fn fixed_trace() -> Checks {
    let mut out = Vec::new();
    let row = fixed_trace_row(EnsembleSpec::laguerre(1, q(-1, 2))?, 3)?;
    let same = row[0].structurally_equal(&fixed_trace_largest_three());
    out.push(CheckRecord::new("unit-trace largest of three", same, if same { "identical".into() } else { row[0].to_string() }));

    let bits = 400;
    let tol = Float::with_val(bits, Float::parse("1e-40").expect("literal"));
    let specs = [(1, qi(0), 4), (2, qi(1), 4), (3, qi(1), 3), (4, qi(0), 3), (1, qi(2), 5)];
    for (beta, l1, big_n) in specs {
        let spec = EnsembleSpec::laguerre(beta, l1)?;
        let row = fixed_trace_row(spec, big_n)?;
        for (i, cdf) in row.iter().enumerate() {
            let n = i as i64 + 1;
            let mut plateau = true;
            for k in 0..=10 {
                let x = q(1, n) + (qi(1) - q(1, n)) * q(k, 10);
                plateau &= cdf.right_limit(x)? == ExactScalar::one();
            }
            out.push(CheckRecord::new(format!("plateau {spec} N={big_n} n={n}"), plateau, "F = 1 on [1/n, 1]"));
            let mut worst = Float::with_val(bits, 0);
            for b in cdf.breakpoints() {
                if b > qi(0) && b < qi(1) {
                    let (lv, rv) = cdf.eval_sides(b, 50);
                    let d = Float::with_val(bits, &lv - &rv).abs();
                    if d > worst {
                        worst = d;
                    }
                }
            }
            out.push(CheckRecord::new(
                format!("continuity {spec} N={big_n} n={n}"),
                worst < tol,
                format!("largest jump {}", worst.to_string_radix(10, Some(3))),
            ));
        }
    }
    Ok(out)
}

fn gf_zeros() -> Checks {
    let cases = [
        (EnsembleSpec::jacobi(4, q(1, 2), qi(1))?, 2, Rational::from((1, 4)), vec![-4.026, -5.515e-4]),
        (EnsembleSpec::laguerre(1, qi(1))?, 3, Rational::from(4), vec![-12.71, -6.237e-1, -2.577e-2]),
    ];
    let mut out = Vec::new();
    for (spec, big_n, x, want) in cases {
        let t = compute_table(spec, big_n, Ordering::RowMajor)?;
        let xi = build_xi(&t, big_n, &x, 50)?;
        let roots = find_zeros(&xi)?;
        if roots.len() != want.len() {
            out.push(CheckRecord::new(format!("zeros {spec} N={big_n} x={x}"), false, format!("{} roots", roots.len())));
            continue;
        }
        for (z, w) in roots.iter().zip(&want) {
            let re = z.real().to_f64();
            // agreement to the four significant figures quoted
            let close = ((re - w) / w).abs() < 5e-4;
            let real = classify(z, 50) == RootClass::NegativeReal;
            out.push(CheckRecord::new(
                format!("zero {spec} N={big_n} x={x} near {w}"),
                close && real,
                z.real().to_string_radix(10, Some(12)),
            ));
        }
    }
    Ok(out)
}

fn pfaffian_suite() -> Checks {
    let xs: Vec<Rational> = [(1, 2), (1, 1), (2, 1), (5, 1)].iter().map(|&p| Rational::from(p)).collect();
    let mut out = Vec::new();
    for alpha in [q(-1, 2), q(1, 2)] {
        out.extend(pfaffian::compare_with_recursion(alpha, 6, &xs, 50, 40)?);
    }
    Ok(out)
}

fn odd_even() -> Checks {
    let mut out = Vec::new();
    for a in [0, 2] {
        out.extend(oese::odd_even_check(a, 3)?);
    }
    Ok(out)
}

fn brute_force() -> Checks {
    let mut cases = Vec::new();
    for l1 in [0, 2] {
        for beta in 1..=3 {
            cases.push((EnsembleSpec::laguerre(beta, qi(l1))?, vec![0.7, 2.5, 6.0]));
        }
    }
    for beta in 1..=2 {
        cases.push((EnsembleSpec::jacobi(beta, qi(2), qi(1))?, vec![0.2, 0.5, 0.85]));
    }
    let parts: Vec<Checks> =
        cases.into_par_iter().map(|(spec, xs)| bruteforce::compare_with_recursion(spec, 3, &xs, 1e-10)).collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Integer-regime ensembles with `β ≤ 3` used by the property suite.
pub fn property_specs() -> betaorder::Result<Vec<EnsembleSpec>> {
    let mut v = Vec::new();
    for beta in 1..=3 {
        for l1 in [0, 1, 2] {
            v.push(EnsembleSpec::laguerre(beta, qi(l1))?);
        }
        for (l1, l2) in [(0, 0), (1, 2), (2, 1)] {
            v.push(EnsembleSpec::jacobi(beta, qi(l1), qi(l2))?);
        }
    }
    Ok(v)
}

fn properties() -> Checks {
    let specs = property_specs()?;
    let parts: Vec<Checks> = specs
        .into_par_iter()
        .map(|spec| {
            let row = compute_table(spec, 6, Ordering::RowMajor)?;
            let anti = compute_table(spec, 6, Ordering::Antidiagonal)?;
            let bad = row.check();
            Ok(vec![
                CheckRecord::new(format!("invariants {spec} N<=6"), bad.is_empty(), bad.join("; ")),
                CheckRecord::new(format!("orderings agree {spec} N<=6"), row == anti, ""),
            ])
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Sampled ensembles and their seeds.
pub fn monte_carlo_specs() -> betaorder::Result<Vec<(EnsembleSpec, u64)>> {
    Ok(vec![
        (EnsembleSpec::laguerre(1, qi(0))?, 1000),
        (EnsembleSpec::laguerre(2, qi(1))?, 1001),
        (EnsembleSpec::jacobi(1, qi(0), qi(1))?, 1002),
        (EnsembleSpec::jacobi(2, qi(1), qi(0))?, 1003),
    ])
}

fn monte_carlo() -> Checks {
    let mut out = Vec::new();
    for (spec, seed) in monte_carlo_specs()? {
        out.extend(ks::ks_check(spec, 4, 100_000, seed)?);
    }
    Ok(out)
}

/// `(spec, grid)` pairs of the negativity scan: integer regimes, `β ≤ 4`,
/// `λ₁ ≤ 4`, four interior points per ensemble.
pub fn negativity_cases() -> betaorder::Result<Vec<EnsembleSpec>> {
    let mut v = Vec::new();
    for beta in 1..=4 {
        for l1 in 0..=4 {
            v.push(EnsembleSpec::laguerre(beta, qi(l1))?);
            v.push(EnsembleSpec::jacobi(beta, qi(l1), qi(1))?);
        }
    }
    Ok(v)
}

fn negativity(investigate: &mut Vec<String>) -> Checks {
    const NMAX: u32 = 8;
    const DIGITS: u32 = 30;
    let specs = negativity_cases()?;
    let parts: Vec<betaorder::Result<(Vec<CheckRecord>, Vec<String>)>> = specs
        .into_par_iter()
        .map(|spec| {
            let table = compute_table(spec, NMAX, Ordering::Wavefront)?;
            let mut checks = Vec::new();
            let mut flagged = Vec::new();
            for big_n in 1..=NMAX {
                let ext = spec.grid_extent(big_n);
                let grid: Vec<Rational> = (1..=4).map(|k| q_to_rational(ext * q(k, 5))).collect();
                let mut ok = true;
                let mut detail = String::new();
                let mut count = 0;
                for x in &grid {
                    match build_xi(&table, big_n, x, DIGITS).and_then(|xi| find_zeros(&xi)) {
                        Ok(roots) => {
                            count += roots.len();
                            for z in roots.iter().filter(|z| classify(z, DIGITS) == RootClass::Investigate) {
                                flagged.push(format!("investigate: {spec} N={big_n} x={x} root {z}"));
                            }
                        }
                        Err(e) => {
                            ok = false;
                            detail = format!("x={x}: {e}");
                        }
                    }
                }
                if ok {
                    detail = format!("{count} roots over 4 points");
                }
                checks.push(CheckRecord::new(format!("negativity {spec} N={big_n}"), ok, detail));
            }
            Ok((checks, flagged))
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        let (c, f) = p?;
        out.extend(c);
        investigate.extend(f);
    }
    Ok(out)
}

/// One line per suite.
pub fn summary_line(r: &SuiteReport) -> String {
    let failed = r.checks.iter().filter(|c| !c.passed).count();
    let mut line = format!(
        "[{}] {:>2} {:<28} {} checks, {} failed, {:.1}s",
        if r.passed { "PASS" } else { "FAIL" },
        r.id,
        r.name,
        r.checks.len(),
        failed,
        r.seconds
    );
    if !r.investigate.is_empty() {
        line.push_str(&format!(", {} to investigate", r.investigate.len()));
    }
    line
}
