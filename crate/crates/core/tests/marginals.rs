use std::collections::BTreeMap;

use betaorder::marginals::{
    check_density_structure, compute_laguerre, compute_table, largest_shape_polynomials,
    EnsembleSpec, Ordering, Table,
};
use betaorder::scalar::{q, qi};
use betaorder::symfunc::{Expansion, LaguerreExpansion};
use betaorder::ExactScalar;

fn s(text: &str) -> ExactScalar {
    text.parse().unwrap()
}

fn poly(cs: &[&str]) -> Vec<ExactScalar> {
    cs.iter().map(|c| s(c)).collect()
}

fn half_integer_largest(nmax: u32) -> BTreeMap<(u32, u32), Vec<ExactScalar>> {
    let spec = EnsembleSpec::laguerre(1, q(-1, 2)).unwrap();
    let t = compute_laguerre(spec, nmax, Ordering::RowMajor, None).unwrap();
    assert!(t.warnings.is_empty(), "{:?}", t.warnings);
    largest_shape_polynomials(&t.big_f(nmax, 1), nmax).unwrap()
}

#[test]
fn largest_of_three_half_integer() {
    let got = half_integer_largest(3);
    let mut want = BTreeMap::new();
    want.insert((1, 1), poly(&["1*sqrt(2)*pi^(-1/2)", "-1*sqrt(2)*pi^(-1/2)"]));
    want.insert((2, 1), poly(&["-1*sqrt(2)*pi^(-1/2)"]));
    want.insert((1, 2), poly(&["1"]));
    want.insert((2, 2), poly(&["-1", "-1"]));
    assert_eq!(got, want);
}

#[test]
fn largest_of_four_half_integer() {
    let got = half_integer_largest(4);
    let mut want = BTreeMap::new();
    want.insert((1, 1), poly(&["1"]));
    want.insert((2, 1), poly(&["-2", "-1/2", "-1/2", "-1/4"]));
    want.insert((3, 1), poly(&["1", "1/2"]));
    let r = "sqrt(2)*pi^(1/2)";
    // √(π/2)(−3/2 + x − x²/4); the leading −x²/4 is forced by F ≥ 0 near 0
    want.insert(
        (1, 2),
        poly(&[&format!("-3/4*{r}"), &format!("1/2*{r}"), &format!("-1/8*{r}")]),
    );
    want.insert((2, 2), poly(&[&format!("3/4*{r}"), &format!("1/4*{r}")]));
    // p_{3,2} = 0: no √x erf e^{−5x/2} terms at all
    assert_eq!(got, want);
}

#[test]
fn second_largest_of_three_is_incomplete_gamma() {
    // λ₁ = (a−1)/2 for a ∈ {0, 2}: F_3(2;x) = γ(a+2, x)/Γ(a+2)
    for a in [0i64, 2] {
        let spec = EnsembleSpec::laguerre(1, q(a - 1, 2)).unwrap();
        let t = compute_laguerre(spec, 3, Ordering::Antidiagonal, None).unwrap();
        let k = a + 1;
        let density = LaguerreExpansion::term(ExactScalar::one(), qi(k), qi(1));
        let mut fact = 1i64;
        for i in 1..=k {
            fact *= i;
        }
        let want = density
            .scale(&ExactScalar::from_q(q(1, fact)))
            .integrate_from_zero()
            .unwrap();
        assert_eq!(t.big_f(3, 2), want, "a = {a}");
    }
}

#[test]
fn even_beta_density_structure() {
    for spec in [
        EnsembleSpec::laguerre(2, qi(1)).unwrap(),
        EnsembleSpec::laguerre(4, qi(0)).unwrap(),
        EnsembleSpec::jacobi(2, q(1, 2), qi(2)).unwrap(),
        EnsembleSpec::jacobi(4, qi(1), q(-1, 2)).unwrap(),
    ] {
        let t = compute_table(spec, 4, Ordering::RowMajor).unwrap();
        for big_n in 1..=4 {
            check_density_structure(&t, big_n).unwrap_or_else(|e| panic!("{spec} N={big_n}: {e}"));
        }
    }
}

#[test]
fn tables_satisfy_all_invariants() {
    for spec in [
        EnsembleSpec::laguerre(1, qi(0)).unwrap(),
        EnsembleSpec::laguerre(2, qi(2)).unwrap(),
        EnsembleSpec::laguerre(3, q(1, 2)).unwrap(),
        EnsembleSpec::jacobi(1, qi(0), qi(0)).unwrap(),
        EnsembleSpec::jacobi(3, q(-1, 2), qi(1)).unwrap(),
    ] {
        let t = compute_table(spec, 5, Ordering::Wavefront).unwrap();
        let bad = t.check();
        assert!(bad.is_empty(), "{spec}: {bad:?}");
        if let Table::Laguerre(lt) = &t {
            if spec.lambda1.is_integer() {
                assert!(lt.big_f(5, 1).is_rational());
            }
        }
    }
}

#[test]
fn largest_of_four_with_x_squared_over_two_goes_negative() {
    use betaorder::symfunc::LaguerreKey;
    let spec = EnsembleSpec::laguerre(1, q(-1, 2)).unwrap();
    let t = compute_laguerre(spec, 4, Ordering::RowMajor, None).unwrap();
    let f = t.big_f(4, 1);
    let key = LaguerreKey::with_erf(q(5, 2), q(1, 2), q(1, 2));
    let extra = s("-1/8*sqrt(2)*pi^(1/2)");
    let mut alt = f.clone();
    alt.add_term(key, &extra);
    let x = rug::Rational::from((1, 1000));
    assert!(f.eval(&x, 30) > 0);
    assert!(alt.eval(&x, 30) < 0);
}
