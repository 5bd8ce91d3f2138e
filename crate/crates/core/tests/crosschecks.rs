use betaorder::crosschecks::pfaffian::compare_with_recursion;
use betaorder::scalar::q;
use rug::Rational;

#[test]
fn pfaffian_matches_recursion() {
    let xs: Vec<Rational> = [(1, 2), (1, 1), (2, 1), (5, 1)].iter().map(|&p| Rational::from(p)).collect();
    for alpha in [q(-1, 2), q(1, 2)] {
        for r in compare_with_recursion(alpha, 6, &xs, 50, 40).unwrap() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}

#[test]
fn quadrature_matches_recursion() {
    use betaorder::crosschecks::bruteforce;
    use betaorder::marginals::EnsembleSpec;
    use betaorder::scalar::qi;
    let mut specs = Vec::new();
    for l1 in [0, 2] {
        for beta in 1..=3 {
            specs.push((EnsembleSpec::laguerre(beta, qi(l1)).unwrap(), vec![0.7, 2.5, 6.0]));
        }
    }
    for beta in 1..=2 {
        specs.push((EnsembleSpec::jacobi(beta, qi(2), qi(1)).unwrap(), vec![0.2, 0.5, 0.85]));
    }
    for (spec, xs) in specs {
        for r in bruteforce::compare_with_recursion(spec, 3, &xs, 1e-10).unwrap() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}

#[test]
fn tricomi_form_matches_recursion() {
    for r in betaorder::crosschecks::tricomi::compare_with_recursion(5).unwrap() {
        assert!(r.passed, "{}: {}", r.name, r.detail);
    }
}

#[test]
fn odd_orthogonal_matches_symplectic() {
    for a in [0, 2] {
        for r in betaorder::crosschecks::oese::odd_even_check(a, 3).unwrap() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}

#[test]
fn samples_follow_exact_marginals() {
    use betaorder::crosschecks::ks::ks_check;
    use betaorder::marginals::EnsembleSpec;
    use betaorder::scalar::qi;
    let specs = [
        EnsembleSpec::laguerre(1, qi(0)).unwrap(),
        EnsembleSpec::laguerre(2, qi(1)).unwrap(),
        EnsembleSpec::jacobi(1, qi(0), qi(1)).unwrap(),
        EnsembleSpec::jacobi(2, qi(1), qi(0)).unwrap(),
    ];
    for (i, spec) in specs.into_iter().enumerate() {
        for r in ks_check(spec, 4, 100_000, 1000 + i as u64).unwrap() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
