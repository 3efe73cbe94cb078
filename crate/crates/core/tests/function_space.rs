use num_complex::Complex64;

use revineq_core::bounds::{Certificate, TheoremId};
use revineq_core::function_space::{
    eta_norm, fold_weights, gauss_legendre_rule, integral_certificate, read_sampled_csv,
    validate_weight, weighted_inner, write_sampled_csv, IntegralKind, SampledFunction,
    WeightFunction,
};
use revineq_core::{Error, Tolerances, Vector};

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn doubling_nodes_leaves_polynomial_integrals_unchanged() {
    let eta = WeightFunction::polynomial(vec![0.0, 2.0]);
    let f = |t: f64| {
        Vector::complex(&[
            Complex64::new(t.powi(3), 1.0 - t),
            Complex64::new(2.0 * t, t * t),
        ])
        .unwrap()
    };
    let g =
        |t: f64| Vector::complex(&[Complex64::new(1.0, t), Complex64::new(t.powi(2), -t)]).unwrap();
    let mut values = Vec::new();
    for n in [8, 16, 32, 64] {
        let rule = gauss_legendre_rule(n, 0.0, 1.0).unwrap();
        let fs = SampledFunction::from_fn(&rule, f).unwrap();
        let gs = SampledFunction::from_fn(&rule, g).unwrap();
        values.push(weighted_inner(&fs, &gs, &eta, &rule).unwrap());
    }
    for w in values.windows(2) {
        assert!((w[0] - w[1]).norm() < 1e-10);
    }
}

#[test]
fn weighted_inner_obeys_cauchy_schwarz_and_parallelogram() {
    let rule = gauss_legendre_rule(16, -1.0, 2.0).unwrap();
    let eta = WeightFunction::uniform(-1.0, 2.0);
    let f = SampledFunction::from_fn(&rule, |t| Vector::real(&[t.sin(), t * t]).unwrap()).unwrap();
    let g = SampledFunction::from_fn(&rule, |t| Vector::real(&[1.0, t.cos()]).unwrap()).unwrap();
    let ip = weighted_inner(&f, &g, &eta, &rule).unwrap().norm();
    let (nf, ng) = (
        eta_norm(&f, &eta, &rule).unwrap(),
        eta_norm(&g, &eta, &rule).unwrap(),
    );
    assert!(ip <= nf * ng * (1.0 + 1e-12));
    let sum = SampledFunction::sum(&[f.clone(), g.clone()]).unwrap();
    let neg_g = SampledFunction::new(g.values().iter().map(|v| -v).collect()).unwrap();
    let diff = SampledFunction::sum(&[f, neg_g]).unwrap();
    let lhs = eta_norm(&sum, &eta, &rule).unwrap().powi(2)
        + eta_norm(&diff, &eta, &rule).unwrap().powi(2);
    assert!((lhs - 2.0 * (nf * nf + ng * ng)).abs() < 1e-12);
}

#[test]
fn folded_vectors_reproduce_the_integral_norms() {
    let rule = gauss_legendre_rule(12, 0.0, 1.0).unwrap();
    let eta = WeightFunction::polynomial(vec![0.0, 2.0]);
    let f = SampledFunction::from_fn(&rule, |t| Vector::real(&[1.0 + t, -t]).unwrap()).unwrap();
    let folded = fold_weights(&f, &eta, &rule).unwrap();
    assert!((folded.norm() - eta_norm(&f, &eta, &rule).unwrap()).abs() < 1e-14);
}

#[test]
fn ball_certificate_on_nearby_functions() {
    let rule = gauss_legendre_rule(32, 0.0, 1.0).unwrap();
    let eta = WeightFunction::uniform(0.0, 1.0);
    let g = SampledFunction::constant(&rule, &Vector::real(&[1.0, 0.0]).unwrap());
    let fs: Vec<_> = [0.3, -0.2, 0.1]
        .iter()
        .map(|s| {
            SampledFunction::from_fn(&rule, |t| {
                Vector::real(&[1.0 + s * t, s * (1.0 - t)]).unwrap()
            })
            .unwrap()
        })
        .collect();
    let kind = IntegralKind::Ball { rho: 0.5 };
    let (report, cert) = integral_certificate(&kind, &fs, &g, &eta, &rule, &tol()).unwrap();
    assert!(report.overall);
    let Certificate::Multiplicative(c) = cert else {
        panic!("expected a multiplicative certificate")
    };
    assert_eq!(c.theorem_id, TheoremId::P61);
    assert!(c.holds);
    assert!((c.constant - 0.75f64.sqrt()).abs() < 1e-15);
}

#[test]
fn hypothesis_and_weight_errors() {
    let rule = gauss_legendre_rule(8, 0.0, 1.0).unwrap();
    let eta = WeightFunction::uniform(0.0, 1.0);
    let g = SampledFunction::constant(&rule, &Vector::real(&[2.0]).unwrap());
    let f = SampledFunction::constant(&rule, &Vector::real(&[2.0]).unwrap());
    let kind = IntegralKind::Ball { rho: 0.5 };
    // g is not normalized
    let err = integral_certificate(&kind, &[f], &g, &eta, &rule, &tol());
    assert!(matches!(err, Err(Error::Precondition(_))));

    let bad = WeightFunction::polynomial(vec![-1.0, 1.0]);
    assert!(matches!(
        validate_weight(&bad, &rule, &tol()),
        Err(Error::Precondition(_))
    ));
    let unnormalized = WeightFunction::polynomial(vec![3.0]);
    let report = validate_weight(&unnormalized, &rule, &tol()).unwrap();
    assert!(!report.normalized);
    let fixed = unnormalized.renormalized(&rule).unwrap();
    assert!(validate_weight(&fixed, &rule, &tol()).unwrap().normalized);
}

#[test]
fn csv_files_round_trip_exactly() {
    let rule = gauss_legendre_rule(9, 0.0, 1.0).unwrap();
    let f = SampledFunction::from_fn(&rule, |t| {
        Vector::complex(&[Complex64::new(t.exp(), -t / 3.0)]).unwrap()
    })
    .unwrap();
    let mut buf = Vec::new();
    write_sampled_csv(&mut buf, &rule, &f).unwrap();
    let (ts, back) = read_sampled_csv(buf.as_slice()).unwrap();
    assert_eq!(ts, rule.nodes);
    assert_eq!(back, f);
}
