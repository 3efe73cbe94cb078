//! Side-by-side certificates on one vector family, and the identities that
//! link a single-anchor theorem to its orthonormal-family version.

use serde::{Deserialize, Serialize};

use crate::bounds::{Certificate, TheoremId};
use crate::error::Result;
use crate::instance::{HypothesisParams, Instance};
use crate::space::{validate_orthonormal, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    pub theorem_id: TheoremId,
    pub hypothesis_holds: bool,
    pub relative_slack: f64,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyFlag {
    pub name: String,
    pub holds: bool,
    /// Largest absolute difference between the compared quantities.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Tightest (smallest relative slack) first.
    pub ranking: Vec<Ranked>,
    pub consistency: Vec<ConsistencyFlag>,
}

/// The family-size-one version of a single-anchor instance: T2.1 as T2.2,
/// T2.3 as T2.4, T3.1 as T3.2, DM as DM_ORTHO.
pub fn specialize(inst: &Instance) -> Result<Option<Instance>> {
    let Some(a) = &inst.anchor else {
        return Ok(None);
    };
    let (theorem, params) = match (&inst.theorem, &inst.params) {
        (TheoremId::T21, HypothesisParams::Ball { rho }) => (
            TheoremId::T22,
            HypothesisParams::BallFamily { rho: vec![*rho] },
        ),
        (TheoremId::T23, HypothesisParams::Bracket { m, big_m }) => (
            TheoremId::T24,
            HypothesisParams::BracketFamily {
                axes: vec![(*m, *big_m)],
            },
        ),
        (TheoremId::T31, HypothesisParams::Slacks { k }) => (
            TheoremId::T32,
            HypothesisParams::SlackMatrix {
                matrix: k.as_ref().map(|k| k.iter().map(|ki| vec![*ki]).collect()),
            },
        ),
        (TheoremId::Dm, HypothesisParams::Ratio { r }) => (
            TheoremId::DmOrtho,
            HypothesisParams::RatioFamily {
                r: r.map(|r| vec![r]),
            },
        ),
        _ => return Ok(None),
    };
    let family = validate_orthonormal(vec![a.clone()], Tolerances::default())?;
    Ok(Some(Instance {
        theorem,
        xs: inst.xs.clone(),
        anchor: None,
        family: Some(family),
        params,
    }))
}

/// Quantities compared by the specialization identities: bound constant (or
/// bound) and slack.
fn key_numbers(cert: &Certificate) -> (f64, f64) {
    match cert {
        Certificate::Multiplicative(c) => (c.constant, c.slack),
        Certificate::Additive(c) => (c.bound, c.slack),
        // the mixed bound at m = 1 is ||sum x|| + sum M_i1, the additive bound
        // read on the other side
        Certificate::Mixed(c) => (c.additive_term, c.slack),
        Certificate::Schwarz(c) => (c.bound, c.slack),
    }
}

/// Evaluates each instance and ranks the certificates. For each instance
/// with a family-size-one counterpart, adds a flag recording whether the two
/// agree within `1e-12` (scaled by the certificate magnitude).
pub fn compare_certificates(instances: &[Instance], tol: &Tolerances) -> Result<Comparison> {
    let mut ranking = Vec::with_capacity(instances.len());
    let mut consistency = Vec::new();
    for inst in instances {
        let ev = inst.evaluate(tol)?;
        if let Some(special) = specialize(inst)? {
            let other = special.evaluate(tol)?;
            let (c1, s1) = key_numbers(&ev.certificate);
            let (c2, s2) = key_numbers(&other.certificate);
            let scale = ev.certificate.scale().max(1.0);
            let deviation = (c1 - c2).abs().max((s1 - s2).abs());
            consistency.push(ConsistencyFlag {
                name: format!("{} = {} with one axis", inst.theorem, special.theorem),
                holds: deviation <= 1e-12 * scale,
                deviation,
            });
        }
        ranking.push(Ranked {
            theorem_id: inst.theorem,
            hypothesis_holds: ev.hypothesis.overall,
            relative_slack: ev.certificate.relative_slack(tol),
            certificate: ev.certificate,
        });
    }
    ranking.sort_by(|a, b| a.relative_slack.total_cmp(&b.relative_slack));
    Ok(Comparison {
        ranking,
        consistency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{Field, Vector};

    #[test]
    fn smaller_radius_is_tighter() {
        let a = Vector::basis(Field::Real, 2, 0);
        let xs = vec![
            Vector::real(&[0.9, 0.1]).unwrap(),
            Vector::real(&[0.95, -0.2]).unwrap(),
        ];
        let mk = |rho| Instance {
            theorem: TheoremId::T21,
            xs: xs.clone(),
            anchor: Some(a.clone()),
            family: None,
            params: HypothesisParams::Ball { rho },
        };
        let cmp = compare_certificates(&[mk(0.5), mk(0.3)], &Tolerances::default()).unwrap();
        let Certificate::Multiplicative(first) = &cmp.ranking[0].certificate else {
            panic!()
        };
        assert!((first.constant - (1.0f64 - 0.09).sqrt()).abs() < 1e-15);
        assert!(cmp.consistency.iter().all(|f| f.holds));
        assert_eq!(cmp.consistency.len(), 2);
    }

    #[test]
    fn additive_bracket_bound_is_below_the_norm_form() {
        let e = Vector::basis(Field::Real, 2, 0);
        let xs = vec![
            Vector::real(&[2.0, 0.5]).unwrap(),
            Vector::real(&[2.5, -1.0]).unwrap(),
        ];
        let mk = |theorem| Instance {
            theorem,
            xs: xs.clone(),
            anchor: Some(e.clone()),
            family: None,
            params: HypothesisParams::Bracket { m: 1.0, big_m: 4.0 },
        };
        let tol = Tolerances::default();
        let t42 = mk(TheoremId::T42).evaluate(&tol).unwrap();
        let t23 = mk(TheoremId::T23Additive).evaluate(&tol).unwrap();
        let (Certificate::Additive(a), Certificate::Additive(b)) =
            (t42.certificate, t23.certificate)
        else {
            panic!()
        };
        assert!(a.bound <= b.bound + 1e-15);
    }
}
