//! Random instances that satisfy a theorem's hypothesis by construction.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{
    gaussian_vector, int_in, log_uniform, random_orthonormal, random_real_orthogonal_unit,
    random_unit, uniform, uniform_in_ball,
};
use crate::bounds::TheoremId;
use crate::conditions;
use crate::error::{Error, Result};
use crate::instance::{HypothesisParams, Instance};
use crate::space::{Field, OrthonormalFamily, Vector};
use crate::witnesses::{self, MultiAxisKind, Spread};

/// Attempts per vector before a sample is declared infeasible.
pub const REJECTION_CAP: usize = 10_000;

/// Shape and parameter ranges for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub theorem: TheoremId,
    pub field: Field,
    pub dim: usize,
    /// Number of vectors; the Schwarz reverses always use 2.
    pub n: usize,
    /// Inclusive range for the orthonormal family size, clipped to `dim`.
    pub family_size: (usize, usize),
    /// Radius / ratio range; a point range fixes the value.
    pub rho: (f64, f64),
    /// Fixed `(m, M)`, or `None` to draw one per sample.
    pub bracket: Option<(f64, f64)>,
    /// Build an equality witness instead of a random instance when possible.
    pub witness: bool,
}

/// Draws an instance for `spec`. Infeasible parameter choices come back as
/// [`Error::Infeasible`].
pub fn sample_instance<R: Rng + ?Sized>(spec: &SampleSpec, rng: &mut R) -> Result<Instance> {
    let n = match spec.theorem {
        TheoremId::P51 | TheoremId::P52 => 2,
        _ => spec.n,
    };
    if n == 0 || spec.dim == 0 {
        return Err(Error::Usage("need n >= 1 and dim >= 1".into()));
    }
    if spec.witness {
        if let Some(inst) = sample_witness(spec, n.max(2), rng) {
            return Ok(inst);
        }
    }
    sample_random(spec, n, rng)
}

fn draw_rho<R: Rng + ?Sized>(spec: &SampleSpec, rng: &mut R) -> f64 {
    uniform(rng, spec.rho.0, spec.rho.1)
}

fn draw_bracket<R: Rng + ?Sized>(spec: &SampleSpec, rng: &mut R) -> (f64, f64) {
    spec.bracket.unwrap_or_else(|| {
        let m = log_uniform(rng, 0.1, 10.0);
        (m, m * (1.0 + log_uniform(rng, 0.01, 20.0)))
    })
}

fn draw_family<R: Rng + ?Sized>(spec: &SampleSpec, rng: &mut R) -> OrthonormalFamily {
    let hi = spec.family_size.1.min(spec.dim).max(1);
    let lo = spec.family_size.0.clamp(1, hi);
    let m = int_in(rng, (lo, hi));
    random_orthonormal(rng, spec.field, spec.dim, m)
}

fn single(theorem: TheoremId, xs: Vec<Vector>, a: Vector, params: HypothesisParams) -> Instance {
    Instance {
        theorem,
        xs,
        anchor: Some(a),
        family: None,
        params,
    }
}

fn multi(
    theorem: TheoremId,
    xs: Vec<Vector>,
    family: OrthonormalFamily,
    params: HypothesisParams,
) -> Instance {
    Instance {
        theorem,
        xs,
        anchor: None,
        family: Some(family),
        params,
    }
}

/// Uniform draws from balls around `center` of radius shrinking
/// geometrically from `r0` to `safe`, a radius whose ball lies inside the
/// target set, until `accept` holds.
fn shrink_reject<R: Rng + ?Sized>(
    rng: &mut R,
    center: &Vector,
    r0: f64,
    safe: f64,
    accept: impl Fn(&Vector) -> bool,
) -> Result<Vector> {
    let mut excess = r0 - safe;
    for _ in 0..REJECTION_CAP {
        let x = uniform_in_ball(rng, center, safe + excess);
        if accept(&x) {
            return Ok(x);
        }
        excess *= 0.9;
    }
    Err(Error::Infeasible(format!(
        "no admissible vector within {REJECTION_CAP} attempts"
    )))
}

/// `s (cos t a + sin t w)` with `w` a random unit vector real-orthogonal to
/// `a`, `t` uniform in `[0, t_max]`, `s` log-uniform.
fn cone_vector<R: Rng + ?Sized>(rng: &mut R, a: &Vector, t_max: f64) -> Vector {
    let s = log_uniform(rng, 0.1, 10.0);
    let t = uniform(rng, 0.0, t_max);
    let mut x = a.scale_real(s * t.cos());
    if let Some(w) = random_real_orthogonal_unit(rng, a.field(), a.dim(), std::slice::from_ref(a)) {
        x.add_scaled(s * t.sin(), &w);
    }
    x
}

fn sample_random<R: Rng + ?Sized>(spec: &SampleSpec, n: usize, rng: &mut R) -> Result<Instance> {
    use TheoremId as T;
    let (field, dim) = (spec.field, spec.dim);
    Ok(match spec.theorem {
        T::Dm => {
            let a = random_unit(rng, field, dim);
            let r = draw_rho(spec, rng);
            let xs = (0..n).map(|_| cone_vector(rng, &a, r.acos())).collect();
            single(T::Dm, xs, a, HypothesisParams::Ratio { r: Some(r) })
        }
        T::DmOrtho => {
            let fam = draw_family(spec, rng);
            let xs = (0..n)
                .map(|_| {
                    let mut x = Vector::zeros(field, dim);
                    for a in fam.members() {
                        x.add_scaled(uniform(rng, 0.2, 1.0), a);
                    }
                    if let Some(w) = random_real_orthogonal_unit(rng, field, dim, fam.members()) {
                        x.add_scaled(uniform(rng, 0.0, 1.5), &w);
                    }
                    x.scale_real(log_uniform(rng, 0.1, 10.0))
                })
                .collect();
            multi(
                T::DmOrtho,
                xs,
                fam,
                HypothesisParams::RatioFamily { r: None },
            )
        }
        T::T21 | T::T41 | T::P51 => {
            let a = random_unit(rng, field, dim);
            let rho = draw_rho(spec, rng);
            let xs = (0..n).map(|_| uniform_in_ball(rng, &a, rho)).collect();
            single(spec.theorem, xs, a, HypothesisParams::Ball { rho })
        }
        T::T22 => {
            let fam = draw_family(spec, rng);
            let m = fam.size() as f64;
            let floor = (1.0 - 1.0 / m).sqrt();
            let (lo, hi) = spec.rho;
            let rho: Vec<f64> = if lo == hi {
                conditions::multi_ball_prescreen(&vec![lo; fam.size()])?;
                if lo <= floor {
                    return Err(Error::Infeasible(format!(
                        "rho = {lo} does not exceed sqrt(1 - 1/m) = {floor}; the balls have no common interior point"
                    )));
                }
                vec![lo; fam.size()]
            } else {
                let lo = lo.max(floor + 1e-6);
                if lo >= hi {
                    return Err(Error::Infeasible(format!(
                        "rho range ends below sqrt(1 - 1/m) = {floor} for family size {m}"
                    )));
                }
                (0..fam.size()).map(|_| uniform(rng, lo, hi)).collect()
            };
            // s/m lies at distance sqrt(1 - 1/m) from every a_k
            let center = fam.sum().scale_real(1.0 / m);
            let safe = rho.iter().fold(f64::INFINITY, |acc, r| acc.min(r - floor));
            let r0 = rho.iter().fold(0.0f64, |acc, r| acc.max(*r)) + floor;
            let xs = (0..n)
                .map(|_| {
                    shrink_reject(rng, &center, r0, safe, |x| {
                        fam.members()
                            .iter()
                            .zip(&rho)
                            .all(|(a, r)| x.distance(a).unwrap() <= *r)
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            multi(T::T22, xs, fam, HypothesisParams::BallFamily { rho })
        }
        T::T23 | T::T23Additive | T::T42 | T::P52 => {
            let a = random_unit(rng, field, dim);
            let (m, big_m) = draw_bracket(spec, rng);
            let center = a.scale_real((m + big_m) / 2.0);
            let xs = (0..n)
                .map(|_| uniform_in_ball(rng, &center, (big_m - m) / 2.0))
                .collect();
            single(spec.theorem, xs, a, HypothesisParams::Bracket { m, big_m })
        }
        T::T24 => {
            let fam = draw_family(spec, rng);
            let mf = fam.size() as f64;
            // x0 = tau s; margin_k = r_k - ||x0 - c_k a_k||
            let (axes, tau): (Vec<(f64, f64)>, f64) = match spec.bracket {
                Some((m, big_m)) => {
                    let c = (m + big_m) / 2.0;
                    (vec![(m, big_m); fam.size()], c / mf)
                }
                None => {
                    let gamma = log_uniform(rng, 0.2, 5.0);
                    let axes = (0..fam.size())
                        .map(|_| {
                            let p = uniform(rng, 0.05, 0.9);
                            let q = 1.0 + (mf - 1.0) / (1.0 - p) + uniform(rng, 0.05, 3.0);
                            (gamma * p, gamma * q)
                        })
                        .collect();
                    (axes, gamma)
                }
            };
            let safe = axes.iter().fold(f64::INFINITY, |acc, (mu, big_m)| {
                let (c, r) = ((mu + big_m) / 2.0, (big_m - mu) / 2.0);
                let dist = ((mf - 1.0) * tau * tau + (tau - c) * (tau - c)).sqrt();
                acc.min(r - dist)
            });
            if safe.is_nan() || safe <= 0.0 {
                return Err(Error::Infeasible(format!(
                    "the per-axis brackets have no common interior point for family size {}",
                    fam.size()
                )));
            }
            let center = fam.sum().scale_real(tau);
            let r0 = axes
                .iter()
                .fold(0.0f64, |acc, (mu, big_m)| acc.max(big_m - mu));
            let xs = (0..n)
                .map(|_| {
                    shrink_reject(rng, &center, r0, safe, |x| {
                        fam.members().iter().zip(&axes).all(|(a, (mu, big_m))| {
                            let mut hi = a.scale_real(*big_m);
                            hi.add_scaled(-1.0, x);
                            let mut lo = x.clone();
                            lo.add_scaled(-mu, a);
                            hi.re_inner(&lo).unwrap() >= 0.0
                        })
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            multi(T::T24, xs, fam, HypothesisParams::BracketFamily { axes })
        }
        T::T31 => {
            let e = random_unit(rng, field, dim);
            let xs: Vec<Vector> = (0..n)
                .map(|_| {
                    let mut x = gaussian_vector(rng, field, dim);
                    x.add_scaled(uniform(rng, 0.0, 3.0), &e);
                    x
                })
                .collect();
            let params = if rng.random::<bool>() {
                HypothesisParams::Slacks { k: None }
            } else {
                let tol = crate::space::Tolerances::default();
                let k = conditions::minimal_additive_slacks(&xs, &e, &tol)?
                    .into_iter()
                    .map(|k| k + uniform(rng, 0.0, 0.5))
                    .collect();
                HypothesisParams::Slacks { k: Some(k) }
            };
            single(T::T31, xs, e, params)
        }
        T::T32 => {
            let fam = draw_family(spec, rng);
            let s = fam.sum();
            let xs = (0..n)
                .map(|_| {
                    let mut x = gaussian_vector(rng, field, dim);
                    x.add_scaled(uniform(rng, 0.0, 3.0), &s);
                    x
                })
                .collect();
            multi(
                T::T32,
                xs,
                fam,
                HypothesisParams::SlackMatrix { matrix: None },
            )
        }
        T::T43 => {
            let e = random_unit(rng, field, dim);
            let r: Vec<f64> = (0..n).map(|_| uniform(rng, 0.05, 2.0)).collect();
            let xs = r.iter().map(|ri| uniform_in_ball(rng, &e, *ri)).collect();
            single(T::T43, xs, e, HypothesisParams::Radii { r })
        }
        T::T44 => {
            let e = random_unit(rng, field, dim);
            let brackets: Vec<(f64, f64)> = (0..n).map(|_| draw_bracket(spec, rng)).collect();
            let xs = brackets
                .iter()
                .map(|(m, big_m)| {
                    uniform_in_ball(rng, &e.scale_real((m + big_m) / 2.0), (big_m - m) / 2.0)
                })
                .collect();
            single(T::T44, xs, e, HypothesisParams::Brackets { brackets })
        }
        T::P61 | T::P62 => {
            return Err(Error::Usage(format!(
                "{} is an integral theorem; use the integral campaign",
                spec.theorem
            )))
        }
    })
}

/// Unit directions summing to zero, real-orthogonal to `anchors`.
fn random_spread<R: Rng + ?Sized>(
    rng: &mut R,
    field: Field,
    dim: usize,
    anchors: &[Vector],
    n: usize,
) -> Option<Spread> {
    let e = random_real_orthogonal_unit(rng, field, dim, anchors)?;
    if n.is_multiple_of(2) {
        return Spread::pairs(&e, n / 2).ok();
    }
    let mut basis = anchors.to_vec();
    basis.push(e.clone());
    let u = random_real_orthogonal_unit(rng, field, dim, &basis)?;
    Spread::polygon(&e, &u, n).ok()
}

/// Smallest `q = M/m` with `4 m_f q <= (1 + q)^2`.
fn min_bracket_ratio(family_size: usize) -> f64 {
    let b = 2.0 * family_size as f64 - 1.0;
    b + (b * b - 1.0).max(0.0).sqrt()
}

fn sample_witness<R: Rng + ?Sized>(spec: &SampleSpec, n: usize, rng: &mut R) -> Option<Instance> {
    use TheoremId as T;
    let (field, dim) = (spec.field, spec.dim);
    let anchored = |rng: &mut R| {
        let a = random_unit(rng, field, dim);
        let spread = random_spread(rng, field, dim, std::slice::from_ref(&a), n)?;
        Some((a, spread))
    };
    let built = match spec.theorem {
        T::Dm => {
            let (a, spread) = anchored(rng)?;
            witnesses::dm_equality(&a, &spread, draw_rho(spec, rng))
        }
        T::DmOrtho => {
            let fam = draw_family(spec, rng);
            let spread = random_spread(rng, field, dim, fam.members(), n)?;
            let c: Vec<f64> = (0..fam.size()).map(|_| uniform(rng, 0.2, 1.0)).collect();
            let t = uniform(rng, 0.0, 1.0);
            let norm = (c.iter().map(|x| x * x).sum::<f64>() + t * t).sqrt();
            let r: Vec<f64> = c.iter().map(|x| x / norm).collect();
            witnesses::dm_ortho_equality(&fam, &spread, &r)
        }
        T::T21 | T::T41 | T::P51 => {
            let (a, spread) = anchored(rng)?;
            let rho = draw_rho(spec, rng);
            match spec.theorem {
                T::T21 => witnesses::t21_equality(&a, &spread, rho),
                T::T41 => witnesses::t41_equality(&a, &spread, rho),
                _ => witnesses::p51_equality_pair(&a, &spread.directions()[0], rho),
            }
        }
        T::T22 => {
            let fam = draw_family(spec, rng);
            let spread = random_spread(rng, field, dim, fam.members(), n)?;
            let floor = (1.0 - 1.0 / fam.size() as f64).sqrt();
            let lo = spec.rho.0.max(floor);
            if lo > spec.rho.1 {
                return None;
            }
            let rho = uniform(rng, lo, spec.rho.1);
            witnesses::multi_axis_equality(&fam, &spread, &MultiAxisKind::Ball { rho })
        }
        T::T23 | T::T23Additive | T::T42 | T::P52 => {
            let (a, spread) = anchored(rng)?;
            let (m, big_m) = draw_bracket(spec, rng);
            match spec.theorem {
                T::T23 => witnesses::t23_equality(&a, &spread, m, big_m),
                T::T23Additive => witnesses::t23_additive_equality(&a, &spread, m, big_m),
                T::T42 => witnesses::t42_equality(&a, &spread, m, big_m),
                _ => witnesses::p52_equality_pair(&a, &spread.directions()[0], m, big_m),
            }
        }
        T::T24 => {
            let fam = draw_family(spec, rng);
            let spread = random_spread(rng, field, dim, fam.members(), n)?;
            let (m, big_m) = spec.bracket.unwrap_or_else(|| {
                let m = log_uniform(rng, 0.1, 10.0);
                (
                    m,
                    m * (min_bracket_ratio(fam.size()) + uniform(rng, 0.1, 5.0)),
                )
            });
            witnesses::multi_axis_equality(&fam, &spread, &MultiAxisKind::Bracket { m, big_m })
        }
        T::T31 => {
            let e = random_unit(rng, field, dim);
            let parts: Vec<Vector> = (0..n)
                .map(|_| {
                    let mut x = gaussian_vector(rng, field, dim);
                    x.add_scaled(uniform(rng, 0.5, 3.0), &e);
                    x
                })
                .collect();
            witnesses::t31_equality_family(&e, &parts)
        }
        T::T32 => {
            let fam = draw_family(spec, rng);
            let s = fam.sum();
            let parts: Vec<Vector> = (0..n)
                .map(|_| {
                    let mut x = gaussian_vector(rng, field, dim);
                    x.add_scaled(uniform(rng, 0.5, 3.0), &s);
                    x
                })
                .collect();
            witnesses::t32_equality_family(&fam, &parts)
        }
        T::T43 => {
            let (e, spread) = anchored(rng)?;
            witnesses::t43_equality(&e, &spread, uniform(rng, 0.05, std::f64::consts::SQRT_2))
        }
        T::T44 => {
            let (e, spread) = anchored(rng)?;
            let (m, big_m) = draw_bracket(spec, rng);
            witnesses::t44_equality(&e, &spread, m, big_m)
        }
        T::P61 | T::P62 => return None,
    };
    built.ok().map(|w| w.instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::rng::derive_stream;
    use crate::space::Tolerances;

    fn spec(theorem: TheoremId, field: Field, dim: usize, n: usize, witness: bool) -> SampleSpec {
        SampleSpec {
            theorem,
            field,
            dim,
            n,
            family_size: (1, 4),
            rho: (0.05, 0.95),
            bracket: None,
            witness,
        }
    }

    #[test]
    fn every_sample_passes_its_hypothesis() {
        let tol = Tolerances::default();
        for theorem in TheoremId::CAMPAIGN
            .into_iter()
            .chain([TheoremId::T23Additive])
        {
            for (k, field) in [Field::Real, Field::Complex].into_iter().enumerate() {
                for i in 0..200u64 {
                    let mut rng = derive_stream(9, &[theorem.as_str().into(), i.into(), k.into()]);
                    let dim = 1 + (i as usize % 6);
                    let n = 1 + (i as usize % 5);
                    let s = spec(theorem, field, dim, n, i % 3 == 0);
                    let inst = match sample_instance(&s, &mut rng) {
                        Ok(inst) => inst,
                        Err(Error::Infeasible(_)) => continue,
                        Err(e) => panic!("{theorem}: {e}"),
                    };
                    let ev = inst.evaluate(&tol).unwrap();
                    assert!(
                        ev.hypothesis.overall,
                        "{theorem} sample {i}: {:?}",
                        ev.hypothesis
                    );
                    assert!(ev.certificate.holds(), "{theorem} sample {i}");
                }
            }
        }
    }

    #[test]
    fn witness_samples_attain_equality() {
        let tol = Tolerances::default();
        for theorem in TheoremId::CAMPAIGN {
            let mut rng = derive_stream(3, &[theorem.as_str().into()]);
            let s = spec(theorem, Field::Complex, 6, 3, true);
            let inst = sample_instance(&s, &mut rng).unwrap();
            let ev = inst.evaluate(&tol).unwrap();
            assert!(
                ev.certificate.relative_slack(&tol).abs() < 1e-10,
                "{theorem}: {}",
                ev.certificate.relative_slack(&tol)
            );
        }
    }

    #[test]
    fn infeasible_multi_ball_is_reported() {
        let mut rng = derive_stream(4, &[]);
        let mut s = spec(TheoremId::T22, Field::Real, 5, 2, false);
        s.family_size = (3, 3);
        s.rho = (0.1, 0.1);
        assert!(matches!(
            sample_instance(&s, &mut rng),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn bracket_ratio_bound() {
        for mf in 1..6 {
            let q = min_bracket_ratio(mf);
            assert!((4.0 * mf as f64 * q - (1.0 + q) * (1.0 + q)).abs() < 1e-9);
        }
    }
}
