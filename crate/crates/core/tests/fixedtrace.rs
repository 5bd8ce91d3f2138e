use betaorder::fixedtrace::{
    conductance_pdf, fixed_trace_mean, fixed_trace_row, g_function, inverse_laplace, FixedTraceSpec,
};
use betaorder::marginals::{compute_laguerre, EnsembleSpec, Ordering};
use betaorder::scalar::{q, q_to_rational, qi};
use betaorder::symfunc::{PiecewisePower, PwTerm, Step};
use betaorder::{ExactScalar, Q};
use num_traits::Zero;
use rug::ops::Pow;
use rug::{Float, Rational};

fn s(text: &str) -> ExactScalar {
    text.parse().unwrap()
}

fn r(n: i64, d: i64) -> ExactScalar {
    ExactScalar::from_q(q(n, d))
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

fn plain(e: Q) -> (Q, i8, Q) {
    (Q::zero(), 1, e)
}

#[test]
fn largest_of_three_under_unit_trace() {
    let spec = EnsembleSpec::laguerre(1, q(-1, 2)).unwrap();
    let row = fixed_trace_row(spec, 3).unwrap();
    let got = &row[0];

    let mut want = PiecewisePower::new(qi(0), qi(1));
    let (third, half, one) = (q(1, 3), q(1, 2), qi(1));
    for (c, a) in [(35, 1), (-175, 3), (273, 5), (-125, 7)] {
        window(&mut want, r(c, 8), q(a, 2), plain(Q::zero()), third, one);
    }
    // −(1−2x)^{5/2}(1+5x) on 1/3 < x < 1/2, with (1−2x)^{5/2} = 4√2 (1/2 − x)^{5/2}
    let k = s("-4*sqrt(2)");
    window(&mut want, k.clone(), qi(0), (half, -1, q(5, 2)), third, half);
    window(&mut want, &k * &r(5, 1), qi(1), (half, -1, q(5, 2)), third, half);
    assert!(got.structurally_equal(&want), "got\n{got}\nwant\n{want}");
}

#[test]
fn conductance_three_by_three() {
    let got = conductance_pdf(3, 3, 1).unwrap();
    let mut want = PiecewisePower::new(qi(0), qi(3));
    window(&mut want, r(6, 7), q(7, 2), plain(Q::zero()), qi(0), qi(1));
    for (c, a) in [(35, 3), (-175, 2), (273, 1), (-125, 0)] {
        window(&mut want, r(3 * c, 28), qi(a), plain(Q::zero()), qi(1), qi(3));
    }
    let sh = (qi(2), 1, q(5, 2));
    window(&mut want, r(-24, 28), qi(1), sh, qi(2), qi(3));
    window(&mut want, r(-120, 28), qi(0), sh, qi(2), qi(3));
    assert!(got.structurally_equal(&want), "got\n{got}\nwant\n{want}");
    assert_eq!(got.integral_exact().unwrap(), ExactScalar::one());
}

#[test]
fn conductance_four_by_four() {
    let got = conductance_pdf(4, 4, 1).unwrap();
    let c = q(5, 27456);
    let mut want = PiecewisePower::new(qi(0), qi(4));
    let (z, one, two, three, four) = (qi(0), qi(1), qi(2), qi(3), qi(4));
    window(&mut want, ExactScalar::from_q(c * 429), qi(7), plain(Q::zero()), z, two);
    let sh = (one, 1, q(9, 2));
    for (k, a) in [(6, 2), (-64, 1), (201, 0)] {
        window(&mut want, ExactScalar::from_q(c * -512 * k), qi(a), sh, one, two);
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
        window(&mut want, ExactScalar::from_q(-c * k), qi(a), plain(Q::zero()), two, four);
    }
    let sh = (three, 1, q(11, 2));
    for (k, a) in [(3, 1), (4, 0)] {
        window(&mut want, ExactScalar::from_q(c * 1024 * k), qi(a), sh, three, four);
    }
    assert!(got.structurally_equal(&want), "got\n{got}\nwant\n{want}");
}

#[test]
fn conductance_is_symmetric_and_normalized() {
    for (n1, n2, beta) in [(2, 4, 1), (2, 3, 2), (1, 3, 4), (3, 5, 1)] {
        let a = conductance_pdf(n1, n2, beta).unwrap();
        let b = conductance_pdf(n2, n1, beta).unwrap();
        assert!(a.structurally_equal(&b));
        assert_eq!(a.integral_exact().unwrap(), ExactScalar::one(), "{n1} {n2} {beta}");
        let n = n1.min(n2);
        for k in 1..40 {
            let g = Rational::from((i64::from(n) * k, 40));
            assert!(a.eval(&g, 30) >= -1e-25, "negative density at {g}");
        }
    }
}

#[test]
fn trace_density_vanishes_beyond_n() {
    let spec = EnsembleSpec::laguerre(1, q(1, 2)).unwrap();
    let big_n = 3;
    let t = compute_laguerre(spec, big_n, Ordering::RowMajor, None).unwrap();
    let ft = FixedTraceSpec::new(spec, big_n).unwrap();
    let h = inverse_laplace(&t.big_f(big_n, 1), 1, ft.gamma, qi(5)).unwrap();
    let last = h.collapse();
    for iv in last.iter().filter(|iv| iv.lo >= qi(3)) {
        assert!(iv.body.is_zero(), "nonzero on ({}, {})", iv.lo, iv.hi);
    }
}

#[test]
fn two_by_two_unit_trace() {
    // x₁ = max on (1/2, 1) with density ∝ (2x₁ − 1)² → F = (2x − 1)³
    let spec = EnsembleSpec::laguerre(2, qi(0)).unwrap();
    let row = fixed_trace_row(spec, 2).unwrap();
    for k in 1..20 {
        let x = q(k, 20);
        let want = if x <= q(1, 2) { Rational::new() } else { q_to_rational(x * 2 - 1).pow(3u32) };
        assert_eq!(row[0].left_limit(x).unwrap(), ExactScalar::from_rational(want));
    }
}

fn fixed_trace_invariants(spec: EnsembleSpec, big_n: u32) {
    let row = fixed_trace_row(spec, big_n).unwrap();
    for (i, cdf) in row.iter().enumerate() {
        let n = i as i64 + 1;
        for b in cdf.breakpoints() {
            if b > qi(0) && b < qi(1) {
                let (l, rr) = cdf.eval_sides(b, 40);
                let d = Float::with_val(200, &l - &rr).abs();
                assert!(d < 1e-35, "jump at {b} for n={n}");
            }
        }
        let mut prev = Float::with_val(128, 0);
        for k in 1..=20 {
            let v = cdf.eval(&Rational::from((k, 21)), 30);
            assert!(Float::with_val(128, &v - &prev) > -1e-25, "n={n} decreases");
            prev = v;
        }
        for k in 0..10 {
            let x = q(1, n) + (qi(1) - q(1, n)) * q(k, 10);
            assert_eq!(cdf.right_limit(x).unwrap(), ExactScalar::one(), "n={n} plateau at {x}");
        }
        if n == 1 {
            let mean = fixed_trace_mean(cdf);
            assert!(mean > 1.0 / big_n as f64 && mean < 1.0);
        }
    }
    // the smallest eigenvalue is at most 1/N, so nothing below 1/N for n = N,
    // and E_N(0;(x,1)) = F_N(1;x) vanishes for x < 1/N
    let e0 = &row[0];
    for k in 1..10 {
        let x = q(k, 10 * i64::from(big_n));
        assert!(e0.left_limit(x).unwrap().is_zero());
    }
}

#[test]
fn unit_trace_invariants() {
    fixed_trace_invariants(EnsembleSpec::laguerre(1, q(-1, 2)).unwrap(), 4);
    fixed_trace_invariants(EnsembleSpec::laguerre(3, qi(1)).unwrap(), 4);
    fixed_trace_invariants(EnsembleSpec::laguerre(3, q(5, 2)).unwrap(), 3);
    fixed_trace_invariants(EnsembleSpec::laguerre(2, qi(0)).unwrap(), 3);
}

/// `₂F₁(1/2, 1; p+1; z)` for `z < 0` via `(1−z)^{−1} ₂F₁(p+1/2, 1; p+1; z/(z−1))`.
fn hyp_half_one(p: u32, z: &Float, bits: u32) -> Float {
    let w = Float::with_val(bits, z / Float::with_val(bits, z - 1u32));
    let a = Float::with_val(bits, p) + 0.5f64;
    let c = Float::with_val(bits, p + 1);
    let mut term = Float::with_val(bits, 1);
    let mut sum = Float::with_val(bits, 1);
    for k in 0..10_000u32 {
        term *= Float::with_val(bits, &a + k);
        term /= Float::with_val(bits, &c + k);
        term *= &w;
        sum += &term;
        if term.clone().abs() < Float::with_val(bits, 10f64).pow(-60i32) {
            break;
        }
    }
    sum / Float::with_val(bits, 1u32 - Float::with_val(bits, z))
}

#[test]
fn g_matches_hypergeometric_form() {
    let bits = 256;
    let pi_sqrt = Float::with_val(bits, rug::float::Constant::Pi).sqrt();
    for p in 1..=3u32 {
        for (qq, tt) in [(q(0, 1), q(1, 3)), (q(1, 2), q(7, 5)), (q(1, 4), q(13, 7)), (q(2, 3), q(5, 2))] {
            let g = g_function(p, qq, qi(10));
            let got = g.eval(&q_to_rational(tt), 40);
            let d = Float::with_val(bits, q_to_rational(tt - qq));
            let gamma = Float::with_val(bits, Float::with_val(bits, p) + 0.5f64).gamma();
            let mut want = Float::with_val(bits, (&d).pow(Float::with_val(bits, p) - 0.5f64)) / gamma;
            if tt > qq + 1 {
                let d1 = Float::with_val(bits, &d - 1u32);
                let z = Float::with_val(bits, 1u32 - Float::with_val(bits, &d));
                let f = hyp_half_one(p, &z, bits);
                let fact = Float::with_val(bits, rug::Integer::from(rug::Integer::factorial(p)));
                want -= Float::with_val(bits, (&d1).pow(p)) * f / (pi_sqrt.clone() * fact);
            }
            let err = Float::with_val(bits, &got - &want).abs() / want.clone().abs();
            assert!(err < 1e-35, "p={p} q={qq} t={tt}: {got} vs {want}");
        }
    }
}

#[test]
fn g_satisfies_its_recurrence() {
    let p = 2u32;
    let pi_sqrt = Float::with_val(200, rug::float::Constant::Pi).sqrt();
    for (qq, tt) in [(q(1, 3), q(9, 4)), (q(3, 7), q(6, 5)), (q(0, 1), q(29, 10))] {
        let x = q_to_rational(tt);
        let g2 = g_function(p, qq, qi(10)).eval(&x, 40);
        let g1 = g_function(p - 1, qq, qi(10)).eval(&x, 40);
        let d = Float::with_val(200, q_to_rational(tt - qq));
        let mut rhs = Float::with_val(200, &d * &g1) / 1.5f64;
        if tt > qq + 1 {
            rhs += Float::with_val(200, &d - 1u32) / (pi_sqrt.clone() * 1.5f64);
        }
        let err = Float::with_val(200, &g2 - &rhs).abs();
        assert!(err < 1e-35, "q={qq} t={tt}");
    }
}
