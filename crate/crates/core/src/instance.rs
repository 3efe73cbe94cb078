//! A theorem instance: a vector family plus the hypothesis parameters it is
//! claimed to satisfy.
//!
//! [`Instance::evaluate`] runs the matching hypothesis checker and issues the
//! matching certificate; the harness and the witness constructors both go
//! through it.

use serde::{Deserialize, Serialize};

use crate::bounds::{
    self, additive_bound, multiplicative_constant, AdditiveBound, AdditiveParams, Certificate,
    MultiplicativeParams, SchwarzKind, TheoremId,
};
use crate::conditions::{self, HypothesisReport};
use crate::error::{Error, Result};
use crate::space::{self, OrthonormalFamily, Tolerances, Vector};

/// Hypothesis parameters. `None` in the optional slots means "use the
/// tightest admissible value computed from the vectors".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum HypothesisParams {
    /// DM: `r <= Re<x_i, a>/||x_i||`; default `r = r_max`.
    Ratio { r: Option<f64> },
    /// DM_ORTHO: per-axis ratios; default `r_k` = per-axis minimum.
    RatioFamily { r: Option<Vec<f64>> },
    /// T2.1, T4.1, P5.1: `||x_i - a|| <= rho`.
    Ball { rho: f64 },
    /// T2.2: `||x_i - a_k|| <= rho_k`.
    BallFamily { rho: Vec<f64> },
    /// T2.3, T4.2, P5.2: `Re<M a - x_i, x_i - m a> >= 0`.
    Bracket { m: f64, big_m: f64 },
    /// T2.4: per-axis `(mu_k, M_k)`.
    BracketFamily { axes: Vec<(f64, f64)> },
    /// T3.1: `||x_i|| - Re<e, x_i> <= k_i`; default minimal slacks.
    Slacks { k: Option<Vec<f64>> },
    /// T3.2: `||x_i|| - Re<e_k, x_i> <= M_ik`; default minimal matrix.
    SlackMatrix { matrix: Option<Vec<Vec<f64>>> },
    /// T4.3: `||x_i - e|| <= r_i`.
    Radii { r: Vec<f64> },
    /// T4.4: per-vector `(m_i, M_i)`.
    Brackets { brackets: Vec<(f64, f64)> },
}

impl HypothesisParams {
    /// Whether this parameter shape is the one `theorem` expects.
    pub fn fits(&self, theorem: TheoremId) -> bool {
        use HypothesisParams as H;
        use TheoremId as T;
        matches!(
            (theorem, self),
            (T::Dm, H::Ratio { .. })
                | (T::DmOrtho, H::RatioFamily { .. })
                | (T::T21 | T::T41 | T::P51, H::Ball { .. })
                | (T::T22, H::BallFamily { .. })
                | (T::T23 | T::T23Additive | T::T42 | T::P52, H::Bracket { .. })
                | (T::T24, H::BracketFamily { .. })
                | (T::T31, H::Slacks { .. })
                | (T::T32, H::SlackMatrix { .. })
                | (T::T43, H::Radii { .. })
                | (T::T44, H::Brackets { .. })
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub theorem: TheoremId,
    pub xs: Vec<Vector>,
    /// The unit vector `a` (or `e`) of single-anchor theorems.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub anchor: Option<Vector>,
    /// The orthonormal family of the multi-axis theorems.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub family: Option<OrthonormalFamily>,
    pub params: HypothesisParams,
}

/// Hypothesis report plus certificate for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub hypothesis: HypothesisReport,
    pub certificate: Certificate,
}

impl Evaluation {
    /// A certificate that fails although its hypothesis passed: a soundness
    /// violation.
    pub fn is_violation(&self) -> bool {
        self.hypothesis.overall && !self.certificate.holds()
    }
}

impl Instance {
    fn anchor(&self) -> Result<&Vector> {
        self.anchor
            .as_ref()
            .ok_or_else(|| Error::Usage(format!("{} needs an anchor vector", self.theorem)))
    }

    fn family(&self) -> Result<&OrthonormalFamily> {
        self.family
            .as_ref()
            .ok_or_else(|| Error::Usage(format!("{} needs an orthonormal family", self.theorem)))
    }

    fn schwarz_pair(&self) -> Result<(&Vector, &Vector)> {
        match self.xs.as_slice() {
            [x, y] => Ok((x, y)),
            _ => Err(Error::Usage(format!(
                "{} takes exactly two vectors, got {}",
                self.theorem,
                self.xs.len()
            ))),
        }
    }

    /// Runs the hypothesis check without issuing a certificate.
    pub fn check_hypothesis(&self, tol: &Tolerances) -> Result<HypothesisReport> {
        Ok(self.resolve(tol)?.0)
    }

    /// Resolves defaulted parameters, checks the hypothesis, and returns the
    /// bound data needed by the certificate.
    fn resolve(&self, tol: &Tolerances) -> Result<(HypothesisReport, Resolved)> {
        use HypothesisParams as H;
        use TheoremId as T;
        if !self.params.fits(self.theorem) {
            return Err(Error::Usage(format!(
                "parameters {:?} do not match theorem {}",
                self.params, self.theorem
            )));
        }
        let xs = &self.xs;
        Ok(match (&self.params, self.theorem) {
            (H::Ratio { r }, _) => {
                let a = self.anchor()?;
                let r = match r {
                    Some(r) => *r,
                    None => {
                        let ratios = conditions::dm_ratios(xs, a, tol)?;
                        if !ratios.is_satisfiable() {
                            return Err(Error::Infeasible(format!(
                                "no r >= 0 satisfies the ratio condition (r_max = {})",
                                ratios.r_max
                            )));
                        }
                        ratios.r_max.min(1.0)
                    }
                };
                let rep = conditions::check_dm(xs, a, r, tol)?;
                let c = multiplicative_constant(&MultiplicativeParams::Dm { r })?;
                (rep, Resolved::Multiplicative(c))
            }
            (H::RatioFamily { r }, _) => {
                let fam = self.family()?;
                let r = match r {
                    Some(r) => r.clone(),
                    None => {
                        let mat = conditions::dm_ratio_matrix(xs, fam, tol)?;
                        let r = mat.r();
                        if let Some((k, rk)) = r.iter().enumerate().find(|(_, rk)| **rk < 0.0) {
                            return Err(Error::Infeasible(format!(
                                "no r_{k} >= 0 satisfies the ratio condition (r_max = {rk})"
                            )));
                        }
                        r.into_iter().map(|rk| rk.min(1.0)).collect()
                    }
                };
                let rep = conditions::check_dm_family(xs, fam, &r, tol)?;
                let c = multiplicative_constant(&MultiplicativeParams::DmOrtho { r })?;
                (rep, Resolved::Multiplicative(c))
            }
            (H::Ball { rho }, T::T21) => {
                let rep = conditions::check_ball(xs, self.anchor()?, *rho, tol)?;
                let c = multiplicative_constant(&MultiplicativeParams::T21 { rho: *rho })?;
                (rep, Resolved::Multiplicative(c))
            }
            (H::Ball { rho }, T::T41) => {
                let e = self.anchor()?;
                let rep = conditions::check_ball(xs, e, *rho, tol)?;
                let k = additive_bound(
                    &AdditiveParams::T41 {
                        rho: *rho,
                        e: e.clone(),
                    },
                    xs,
                    tol,
                )?;
                (rep, Resolved::Additive(k))
            }
            (H::Ball { rho }, _) => {
                let rep = conditions::check_ball(xs, self.anchor()?, *rho, tol)?;
                (rep, Resolved::Schwarz(SchwarzKind::Ball { r: *rho }))
            }
            (H::BallFamily { rho }, _) => {
                let rep = conditions::check_ball_family(xs, self.family()?, rho, tol)?;
                let c = multiplicative_constant(&MultiplicativeParams::T22 { rho: rho.clone() })?;
                (rep, Resolved::Multiplicative(c))
            }
            (H::Bracket { m, big_m }, T::T23) => {
                let rep = conditions::check_bracket(xs, self.anchor()?, *m, *big_m, tol)?;
                let c = multiplicative_constant(&MultiplicativeParams::T23 {
                    m: *m,
                    big_m: *big_m,
                })?;
                (rep, Resolved::Multiplicative(c))
            }
            (H::Bracket { m, big_m }, T::T23Additive) => {
                let rep = conditions::check_bracket(xs, self.anchor()?, *m, *big_m, tol)?;
                let k = additive_bound(
                    &AdditiveParams::T23Additive {
                        m: *m,
                        big_m: *big_m,
                    },
                    xs,
                    tol,
                )?;
                (rep, Resolved::Additive(k))
            }
            (H::Bracket { m, big_m }, T::T42) => {
                let e = self.anchor()?;
                let rep = conditions::check_bracket(xs, e, *m, *big_m, tol)?;
                let k = additive_bound(
                    &AdditiveParams::T42 {
                        m: *m,
                        big_m: *big_m,
                        e: e.clone(),
                    },
                    xs,
                    tol,
                )?;
                (rep, Resolved::Additive(k))
            }
            (H::Bracket { m, big_m }, _) => {
                let rep = conditions::check_bracket(xs, self.anchor()?, *m, *big_m, tol)?;
                (
                    rep,
                    Resolved::Schwarz(SchwarzKind::Bracket {
                        m: *m,
                        big_m: *big_m,
                    }),
                )
            }
            (H::BracketFamily { axes }, _) => {
                let rep = conditions::check_bracket_family(xs, self.family()?, axes, tol)?;
                let c = multiplicative_constant(&MultiplicativeParams::T24 { axes: axes.clone() })?;
                (rep, Resolved::Multiplicative(c))
            }
            (H::Slacks { k }, _) => {
                let e = self.anchor()?;
                let k = match k {
                    Some(k) => k.clone(),
                    None => conditions::minimal_additive_slacks(xs, e, tol)?,
                };
                let rep = conditions::check_additive_slacks(xs, e, &k, tol)?;
                let bound = additive_bound(&AdditiveParams::T31 { k }, xs, tol)?;
                (rep, Resolved::Additive(bound))
            }
            (H::SlackMatrix { matrix }, _) => {
                let fam = self.family()?;
                let matrix = match matrix {
                    Some(mat) => mat.clone(),
                    None => conditions::minimal_slack_matrix(xs, fam)?,
                };
                let rep = conditions::check_slack_matrix(xs, fam, &matrix, tol)?;
                let total = matrix.iter().flatten().sum();
                (rep, Resolved::Mixed(fam.size(), total))
            }
            (H::Radii { r }, _) => {
                let rep = conditions::check_ball_radii(xs, self.anchor()?, r, tol)?;
                let k = additive_bound(&AdditiveParams::T43 { r: r.clone() }, xs, tol)?;
                (rep, Resolved::Additive(k))
            }
            (H::Brackets { brackets }, _) => {
                let rep = conditions::check_bracket_per_vector(xs, self.anchor()?, brackets, tol)?;
                let k = additive_bound(
                    &AdditiveParams::T44 {
                        brackets: brackets.clone(),
                    },
                    xs,
                    tol,
                )?;
                (rep, Resolved::Additive(k))
            }
        })
    }

    /// Checks the hypothesis and issues the certificate.
    pub fn evaluate(&self, tol: &Tolerances) -> Result<Evaluation> {
        self.evaluate_with_fault(tol, None)
    }

    /// As [`Instance::evaluate`], with the bound made tighter by `fault`
    /// (constant raised, additive bound lowered). Exists so the harness can
    /// prove it notices an unsound bound.
    pub fn evaluate_with_fault(&self, tol: &Tolerances, fault: Option<f64>) -> Result<Evaluation> {
        let (hypothesis, resolved) = self.resolve(tol)?;
        let delta = fault.unwrap_or(0.0);
        let certificate = match resolved {
            Resolved::Multiplicative(c) => {
                let (sum_norms, norm_sum) = sides(&self.xs)?;
                Certificate::Multiplicative(bounds::multiplicative_from_sides(
                    self.theorem,
                    c + delta,
                    sum_norms,
                    norm_sum,
                    tol,
                ))
            }
            Resolved::Additive(k) => {
                let (sum_norms, norm_sum) = sides(&self.xs)?;
                let k = AdditiveBound {
                    bound: k.bound - delta,
                    majorant: k.majorant,
                };
                Certificate::Additive(bounds::additive_from_sides(
                    self.theorem,
                    k,
                    sum_norms,
                    norm_sum,
                    tol,
                ))
            }
            Resolved::Mixed(m, total) => {
                let (sum_norms, norm_sum) = sides(&self.xs)?;
                // lowering the additive term by delta lowers the right side by delta
                let total = total - delta * m as f64;
                Certificate::Mixed(bounds::mixed_from_sides(m, total, sum_norms, norm_sum, tol))
            }
            Resolved::Schwarz(kind) => {
                let (x, y) = self.schwarz_pair()?;
                let lhs = bounds::schwarz_ratio(x, y)?;
                let bound = kind.bound()? - delta;
                Certificate::Schwarz(bounds::schwarz_from_sides(kind.theorem(), lhs, bound, tol))
            }
        };
        Ok(Evaluation {
            hypothesis,
            certificate,
        })
    }

    /// The right-hand side of the theorem's equality characterization,
    /// `sum x_i = ...`, evaluated on this instance. `None` for the Schwarz
    /// reverses, which state no equality case.
    pub fn predicted_equality_sum(&self, tol: &Tolerances) -> Result<Option<Vector>> {
        use HypothesisParams as H;
        use TheoremId as T;
        let sum_norms: f64 = self.xs.iter().map(Vector::norm).sum();
        let along = |coef: f64, v: &Vector| Some(v.scale_real(coef));
        let combo = |coefs: &[f64], fam: &OrthonormalFamily| {
            let mut acc = Vector::zeros(fam.field(), fam.dim());
            for (c, a) in coefs.iter().zip(fam.members()) {
                acc.add_scaled(*c, a);
            }
            Some(acc)
        };
        let (_, resolved) = self.resolve(tol)?;
        Ok(match (self.theorem, &self.params, resolved) {
            (T::Dm | T::T21 | T::T23, _, Resolved::Multiplicative(c)) => {
                along(c * sum_norms, self.anchor()?)
            }
            (T::DmOrtho, H::RatioFamily { r }, _) => {
                let fam = self.family()?;
                let r = match r {
                    Some(r) => r.clone(),
                    None => conditions::dm_ratio_matrix(&self.xs, fam, tol)?.r(),
                };
                let coefs: Vec<f64> = r.iter().map(|rk| rk * sum_norms).collect();
                combo(&coefs, fam)
            }
            (T::T22, H::BallFamily { rho }, _) => {
                let coefs: Vec<f64> = rho
                    .iter()
                    .map(|p| bounds::ball_constant(*p) * sum_norms)
                    .collect();
                combo(&coefs, self.family()?)
            }
            (T::T24, H::BracketFamily { axes }, _) => {
                let coefs: Vec<f64> = axes
                    .iter()
                    .map(|(mu, big_m)| 2.0 * sum_norms * (mu * big_m).sqrt() / (mu + big_m))
                    .collect();
                combo(&coefs, self.family()?)
            }
            (T::T32, _, Resolved::Mixed(m, total_slack)) => {
                let fam = self.family()?;
                let coef = sum_norms - total_slack / m as f64;
                along(coef, &fam.sum())
            }
            (T::T23Additive, H::Bracket { m, big_m }, _) => {
                // same characterization as the multiplicative form
                along(
                    bounds::bracket_constant(*m, *big_m) * sum_norms,
                    self.anchor()?,
                )
            }
            (_, _, Resolved::Additive(k)) => along(sum_norms - k.bound, self.anchor()?),
            (T::P51 | T::P52, _, _) => None,
            _ => unreachable!("parameters were checked against {}", self.theorem),
        })
    }
}

fn sides(xs: &[Vector]) -> Result<(f64, f64)> {
    let total = space::sum(xs)?;
    Ok((xs.iter().map(Vector::norm).sum(), total.norm()))
}

enum Resolved {
    Multiplicative(f64),
    Additive(AdditiveBound),
    /// Family size and `sum_ik M_ik`.
    Mixed(usize, f64),
    Schwarz(SchwarzKind),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Field;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::real(xs).unwrap()
    }

    #[test]
    fn params_must_fit_theorem() {
        let inst = Instance {
            theorem: TheoremId::T21,
            xs: vec![v(&[1.0, 0.0])],
            anchor: Some(v(&[1.0, 0.0])),
            family: None,
            params: HypothesisParams::Bracket { m: 1.0, big_m: 2.0 },
        };
        assert!(matches!(
            inst.evaluate(&Tolerances::default()),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn dm_defaults_to_r_max() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let inst = Instance {
            theorem: TheoremId::Dm,
            xs: vec![v(&[1.0, 0.0]), v(&[h, h])],
            anchor: Some(v(&[1.0, 0.0])),
            family: None,
            params: HypothesisParams::Ratio { r: None },
        };
        let ev = inst.evaluate(&Tolerances::default()).unwrap();
        assert!(ev.hypothesis.overall);
        let Certificate::Multiplicative(c) = &ev.certificate else {
            panic!()
        };
        assert_abs_diff_eq!(c.constant, h, epsilon = 1e-15);
        assert!(c.holds);
    }

    #[test]
    fn anti_aligned_dm_instance_is_infeasible() {
        let inst = Instance {
            theorem: TheoremId::Dm,
            xs: vec![v(&[-1.0, 0.0])],
            anchor: Some(v(&[1.0, 0.0])),
            family: None,
            params: HypothesisParams::Ratio { r: None },
        };
        assert!(matches!(
            inst.evaluate(&Tolerances::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn fault_tightens_every_bound_shape() {
        let a = Vector::basis(Field::Real, 2, 0);
        let tol = Tolerances::default();
        let inst = Instance {
            theorem: TheoremId::T31,
            xs: vec![a.clone(), a.clone()],
            anchor: Some(a.clone()),
            family: None,
            params: HypothesisParams::Slacks { k: None },
        };
        assert!(!inst.evaluate(&tol).unwrap().is_violation());
        assert!(inst
            .evaluate_with_fault(&tol, Some(1e-3))
            .unwrap()
            .is_violation());

        let inst = Instance {
            theorem: TheoremId::Dm,
            params: HypothesisParams::Ratio { r: None },
            ..inst
        };
        assert!(inst
            .evaluate_with_fault(&tol, Some(1e-3))
            .unwrap()
            .is_violation());
    }
}
