use num_complex::Complex64;
use proptest::prelude::*;

use revineq_core::bounds::{am_gm_gap, ball_constant, bracket_constant, TheoremId};
use revineq_core::conditions::{bracket_ball_equivalent, check_ball, check_bracket, check_dm};
use revineq_core::harness::{derive_stream, sample_instance, SampleSpec};
use revineq_core::{Field, Tolerances, Vector};

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Real), Just(Field::Complex)]
}

fn vector(field: Field, dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), dim).prop_map(move |c| {
        let comps = c
            .into_iter()
            .map(|(re, im)| match field {
                Field::Real => Complex64::new(re, 0.0),
                Field::Complex => Complex64::new(re, im),
            })
            .collect();
        Vector::new(field, comps).unwrap()
    })
}

/// Two vectors of one field and dimension.
fn pair() -> impl Strategy<Value = (Vector, Vector)> {
    (field(), 1..8usize).prop_flat_map(|(f, d)| (vector(f, d), vector(f, d)))
}

fn triple() -> impl Strategy<Value = (Vector, Vector, Vector)> {
    (field(), 1..6usize).prop_flat_map(|(f, d)| (vector(f, d), vector(f, d), vector(f, d)))
}

fn unit(v: &Vector) -> Option<Vector> {
    v.normalized(1e-3)
}

proptest! {
    #[test]
    fn cauchy_schwarz((u, v) in pair()) {
        let lhs = u.inner(&v).unwrap().norm();
        let rhs = u.norm() * v.norm();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn triangle((u, v) in pair()) {
        prop_assert!((&u + &v).norm() <= (u.norm() + v.norm()) * (1.0 + 1e-12));
    }

    #[test]
    fn parallelogram((u, v) in pair()) {
        let lhs = (&u + &v).norm_sqr() + (&u - &v).norm_sqr();
        let rhs = 2.0 * u.norm_sqr() + 2.0 * v.norm_sqr();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn homogeneity_and_conjugate_symmetry((u, v) in pair(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let c = match u.field() {
            Field::Real => Complex64::new(re, 0.0),
            Field::Complex => Complex64::new(re, im),
        };
        let scaled = u.scale(c);
        prop_assert!((scaled.norm() - c.norm() * u.norm()).abs() <= 1e-12 * u.norm().max(1.0) * 3.0);
        let uv = u.inner(&v).unwrap();
        let vu = v.inner(&u).unwrap();
        prop_assert!((uv - vu.conj()).norm() <= 1e-12 * (u.norm() * v.norm()).max(1.0));
        let cuv = scaled.inner(&v).unwrap();
        prop_assert!((cuv - c * uv).norm() <= 1e-11 * (u.norm() * v.norm()).max(1.0));
    }

    #[test]
    fn bracket_and_ball_forms_agree((x, z, big_z) in triple()) {
        let eq = bracket_ball_equivalent(&x, &z, &big_z, &Tolerances::default()).unwrap();
        prop_assert!(eq.agree() || eq.near_boundary, "{eq:?}");
    }

    #[test]
    fn ball_implies_ratio((v, a) in pair(), rho in 0.01..0.99f64, frac in 0.0..1.05f64) {
        let (Some(a), Some(v)) = (unit(&a), unit(&v)) else { return Ok(()) };
        let mut x = a.clone();
        x.add_scaled(rho * frac, &v);
        let tol = Tolerances::default();
        let ball = check_ball(&[x.clone()], &a, rho, &tol).unwrap();
        if ball.overall {
            let dm = check_dm(&[x], &a, ball_constant(rho), &tol).unwrap();
            prop_assert!(dm.overall);
        }
    }

    #[test]
    fn bracket_implies_ratio(
        (v, a) in pair(),
        m in 0.05..3.0f64,
        w in 0.0..5.0f64,
        frac in 0.0..1.05f64,
    ) {
        let (Some(a), Some(v)) = (unit(&a), unit(&v)) else { return Ok(()) };
        let big_m = m + w;
        let mut x = a.scale_real((m + big_m) / 2.0);
        x.add_scaled(frac * (big_m - m) / 2.0, &v);
        let tol = Tolerances::default();
        let bracket = check_bracket(&[x.clone()], &a, m, big_m, &tol).unwrap();
        if bracket.overall {
            let dm = check_dm(&[x], &a, bracket_constant(m, big_m), &tol).unwrap();
            prop_assert!(dm.overall);
        }
    }

    #[test]
    fn sampled_instances_are_certified(
        seed in any::<u64>(),
        k in 0..TheoremId::CAMPAIGN.len(),
        f in field(),
        dim in 1..7usize,
        n in 1..6usize,
        witness in any::<bool>(),
    ) {
        let spec = SampleSpec {
            theorem: TheoremId::CAMPAIGN[k],
            field: f,
            dim,
            n,
            family_size: (1, 3),
            rho: (0.05, 0.95),
            bracket: None,
            witness,
        };
        let mut rng = derive_stream(seed, &["proptest".into()]);
        let inst = sample_instance(&spec, &mut rng).unwrap();
        let ev = inst.evaluate(&Tolerances::default()).unwrap();
        prop_assert!(ev.hypothesis.overall);
        prop_assert!(!ev.is_violation(), "{:?}", ev.certificate);
    }

    #[test]
    fn am_gm_gap_is_the_square_difference(p in 0.0..1e3f64, q in 0.0..1e3f64, alpha in 1e-3..1e3f64) {
        let gap = am_gm_gap(p, q, alpha).unwrap();
        prop_assert!(gap >= 0.0);
        let expanded = p / alpha + q * alpha - 2.0 * (p * q).sqrt();
        let scale = p / alpha + q * alpha;
        prop_assert!((gap - expanded).abs() <= 1e-12 * scale.max(1.0));
    }
}
