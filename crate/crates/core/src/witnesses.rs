//! Explicit families attaining equality, and the sharpness family for the
//! ball reverse Schwarz inequality.
//!
//! Most constructions are symmetric: `x_j = center + beta w_j`, where the unit
//! directions `w_j` sum to zero and are real-orthogonal to every anchor. Then
//! `sum x_j = n center`, every `x_j` has the same norm and the same inner
//! products with the anchors, and the equality case of each theorem reduces to
//! a scalar identity in `(center, beta)`. A [`Spread`] supplies the `w_j`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::bounds::{self, Certificate, TheoremId};
use crate::conditions::{self, HypothesisReport};
use crate::error::{Error, Result};
use crate::instance::{HypothesisParams, Instance};
use crate::space::{self, require_unit, OrthonormalFamily, Tolerances, Vector};

/// Relative certificate slack below which a witness counts as attaining
/// equality.
pub const EQUALITY_TOLERANCE: f64 = 1e-10;

/// Unit directions summing to zero, built from one or two generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Spread {
    generators: Vec<Vector>,
    directions: Vec<Vector>,
}

impl Spread {
    /// `{e, -e}`.
    pub fn pair(e: &Vector) -> Result<Spread> {
        Spread::pairs(e, 1)
    }

    /// `k` copies of `{e, -e}`.
    pub fn pairs(e: &Vector, k: usize) -> Result<Spread> {
        require_unit(e, "e", &Tolerances::default())?;
        if k == 0 {
            return Err(Error::Parameter("need at least one pair".into()));
        }
        let neg = -e;
        let directions = (0..k).flat_map(|_| [e.clone(), neg.clone()]).collect();
        Ok(Spread {
            generators: vec![e.clone()],
            directions,
        })
    }

    /// The `n` vertices `cos(2 pi j/n) e + sin(2 pi j/n) u` of a regular
    /// polygon in the real plane spanned by `e` and `u`.
    pub fn polygon(e: &Vector, u: &Vector, n: usize) -> Result<Spread> {
        let tol = Tolerances::default();
        require_unit(e, "e", &tol)?;
        require_unit(u, "u", &tol)?;
        let c = e.re_inner(u)?;
        if c.abs() > tol.allowance(1.0) {
            return Err(Error::Precondition(format!(
                "polygon generators must be orthogonal, Re<e, u> = {c}"
            )));
        }
        if n < 2 {
            return Err(Error::Parameter(format!("polygon needs n >= 2, got {n}")));
        }
        let directions = (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                let mut w = e.scale_real(t.cos());
                w.add_scaled(t.sin(), u);
                w
            })
            .collect();
        Ok(Spread {
            generators: vec![e.clone(), u.clone()],
            directions,
        })
    }

    /// Pairs for even `n`, a polygon for odd `n`.
    pub fn balanced(e: &Vector, u: &Vector, n: usize) -> Result<Spread> {
        if n >= 2 && n.is_multiple_of(2) {
            Spread::pairs(e, n / 2)
        } else {
            Spread::polygon(e, u, n)
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vector] {
        &self.directions
    }

    /// Every generator must be real-orthogonal to every anchor.
    fn check_against(&self, anchors: &[Vector]) -> Result<()> {
        let tol = Tolerances::default();
        for g in &self.generators {
            for (k, a) in anchors.iter().enumerate() {
                let c = g.re_inner(a)?;
                if c.abs() > tol.allowance(1.0) {
                    return Err(Error::Precondition(format!(
                        "spread direction is not orthogonal to anchor {k}: Re<u, a> = {c}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn spread_around(&self, center: &Vector, beta: f64) -> Vec<Vector> {
        self.directions
            .iter()
            .map(|w| {
                let mut x = center.clone();
                x.add_scaled(beta, w);
                x
            })
            .collect()
    }
}

/// An instance built to attain equality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessInstance {
    #[serde(flatten)]
    pub instance: Instance,
    /// The equality characterization this family instantiates.
    pub predicted_equality: String,
}

/// Result of re-checking a witness through the generic evaluation path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessVerification {
    pub hypothesis: HypothesisReport,
    pub certificate: Certificate,
    pub relative_slack: f64,
    /// `|relative_slack| <= EQUALITY_TOLERANCE` and the hypothesis passes.
    pub attains_equality: bool,
    /// `||sum x_i - predicted|| / max(1, ||sum x_i||)` against the equality
    /// characterization, when the theorem states one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sum_deviation: Option<f64>,
}

impl WitnessInstance {
    pub fn theorem(&self) -> TheoremId {
        self.instance.theorem
    }

    pub fn xs(&self) -> &[Vector] {
        &self.instance.xs
    }

    pub fn verify(&self, tol: &Tolerances) -> Result<WitnessVerification> {
        let ev = self.instance.evaluate(tol)?;
        let relative_slack = ev.certificate.relative_slack(tol);
        let total = space::sum(&self.instance.xs)?;
        let sum_deviation = self
            .instance
            .predicted_equality_sum(tol)?
            .map(|p| total.distance(&p).map(|d| d / total.norm().max(1.0)))
            .transpose()?;
        Ok(WitnessVerification {
            attains_equality: ev.hypothesis.overall && relative_slack.abs() <= EQUALITY_TOLERANCE,
            hypothesis: ev.hypothesis,
            certificate: ev.certificate,
            relative_slack,
            sum_deviation,
        })
    }

    /// A copy with `delta * u` added to vector `index`, hypothesis parameters
    /// unchanged.
    pub fn perturbed(&self, index: usize, u: &Vector, delta: f64) -> Result<Instance> {
        let mut inst = self.instance.clone();
        let n = inst.xs.len();
        let x = inst
            .xs
            .get_mut(index)
            .ok_or_else(|| Error::Usage(format!("index {index} out of range for {n} vectors")))?;
        space::check_uniform(std::slice::from_ref(u), x)?;
        x.add_scaled(delta, u);
        Ok(inst)
    }
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must lie in (0, 1), got {v}"
        )))
    }
}

fn single_anchor(
    theorem: TheoremId,
    a: &Vector,
    spread: &Spread,
    center_coef: f64,
    beta: f64,
    params: HypothesisParams,
    predicted: &str,
) -> Result<WitnessInstance> {
    require_unit(a, "a", &Tolerances::default())?;
    space::check_uniform(&spread.generators, a)?;
    spread.check_against(std::slice::from_ref(a))?;
    let xs = spread.spread_around(&a.scale_real(center_coef), beta);
    Ok(WitnessInstance {
        instance: Instance {
            theorem,
            xs,
            anchor: Some(a.clone()),
            family: None,
            params,
        },
        predicted_equality: predicted.to_string(),
    })
}

fn on_family(
    theorem: TheoremId,
    family: &OrthonormalFamily,
    spread: &Spread,
    center: Vector,
    beta: f64,
    params: HypothesisParams,
    predicted: &str,
) -> Result<WitnessInstance> {
    space::check_uniform(&spread.generators, &family.members()[0])?;
    spread.check_against(family.members())?;
    let xs = spread.spread_around(&center, beta);
    Ok(WitnessInstance {
        instance: Instance {
            theorem,
            xs,
            anchor: None,
            family: Some(family.clone()),
            params,
        },
        predicted_equality: predicted.to_string(),
    })
}

/// `x = r a + sqrt(1 - r^2) w`: unit vectors with ratio exactly `r`.
pub fn dm_equality(a: &Vector, spread: &Spread, r: f64) -> Result<WitnessInstance> {
    if !(r.is_finite() && r > 0.0 && r <= 1.0) {
        return Err(Error::Parameter(format!("r must lie in (0, 1], got {r}")));
    }
    single_anchor(
        TheoremId::Dm,
        a,
        spread,
        r,
        (1.0 - r * r).sqrt(),
        HypothesisParams::Ratio { r: Some(r) },
        "sum x_i = r (sum ||x_i||) a",
    )
}

pub fn dm_equality_pair(a: &Vector, e: &Vector, r: f64) -> Result<WitnessInstance> {
    dm_equality(a, &Spread::pair(e)?, r)
}

/// `x = sum r_k a_k + sqrt(1 - sum r_k^2) w`: unit vectors with per-axis
/// ratios exactly `r_k`.
pub fn dm_ortho_equality(
    family: &OrthonormalFamily,
    spread: &Spread,
    r: &[f64],
) -> Result<WitnessInstance> {
    if r.len() != family.size() {
        return Err(Error::Usage(format!(
            "{} ratios for a family of size {}",
            r.len(),
            family.size()
        )));
    }
    if let Some(bad) = r.iter().find(|rk| !(rk.is_finite() && **rk > 0.0)) {
        return Err(Error::Parameter(format!("ratios must be > 0, got {bad}")));
    }
    let bessel: f64 = r.iter().map(|rk| rk * rk).sum();
    if bessel > 1.0 {
        return Err(Error::Infeasible(format!(
            "sum r_k^2 = {bessel} exceeds 1; no vector has these ratios"
        )));
    }
    let mut center = Vector::zeros(family.field(), family.dim());
    for (rk, ak) in r.iter().zip(family.members()) {
        center.add_scaled(*rk, ak);
    }
    on_family(
        TheoremId::DmOrtho,
        family,
        spread,
        center,
        (1.0 - bessel).sqrt(),
        HypothesisParams::RatioFamily {
            r: Some(r.to_vec()),
        },
        "sum x_i = (sum ||x_i||) sum r_k a_k",
    )
}

/// `x = (1 - rho^2) a + rho sqrt(1 - rho^2) w`: `||x|| = sqrt(1 - rho^2)` and
/// `||x - a|| = rho`.
pub fn t21_equality(a: &Vector, spread: &Spread, rho: f64) -> Result<WitnessInstance> {
    ball_pair(
        TheoremId::T21,
        a,
        spread,
        rho,
        "sum x_i = sqrt(1 - rho^2) (sum ||x_i||) a",
    )
}

pub fn t21_equality_pair(a: &Vector, e: &Vector, rho: f64) -> Result<WitnessInstance> {
    t21_equality(a, &Spread::pair(e)?, rho)
}

/// The same family as [`t21_equality`], read against the additive bound with
/// `K = factor(rho) Re<sum x_i, e>`.
pub fn t41_equality(e: &Vector, spread: &Spread, rho: f64) -> Result<WitnessInstance> {
    ball_pair(
        TheoremId::T41,
        e,
        spread,
        rho,
        "sum x_i = (sum ||x_i|| - K) e",
    )
}

/// The ball pair as a reverse Schwarz equality: lhs = rho^2 / 2.
pub fn p51_equality_pair(a: &Vector, e: &Vector, r: f64) -> Result<WitnessInstance> {
    ball_pair(TheoremId::P51, a, &Spread::pair(e)?, r, "lhs = r^2 / 2")
}

fn ball_pair(
    theorem: TheoremId,
    a: &Vector,
    spread: &Spread,
    rho: f64,
    predicted: &str,
) -> Result<WitnessInstance> {
    open_unit("rho", rho)?;
    let alpha = 1.0 - rho * rho;
    single_anchor(
        theorem,
        a,
        spread,
        alpha,
        rho * alpha.sqrt(),
        HypothesisParams::Ball { rho },
        predicted,
    )
}

/// `x = alpha a + beta w` with `alpha = 2mM/(m+M)`, `beta = sqrt(mM)(M-m)/(M+m)`:
/// `||x|| = sqrt(mM)` and the bracket value is exactly 0.
pub fn t23_equality(a: &Vector, spread: &Spread, m: f64, big_m: f64) -> Result<WitnessInstance> {
    bracket_pair(
        TheoremId::T23,
        a,
        spread,
        m,
        big_m,
        "sum x_i = 2 sqrt(mM)/(m+M) (sum ||x_i||) a",
    )
}

pub fn t23_equality_pair(a: &Vector, e: &Vector, m: f64, big_m: f64) -> Result<WitnessInstance> {
    t23_equality(a, &Spread::pair(e)?, m, big_m)
}

/// The bracket family read against the additive form of the bracket bound.
pub fn t23_additive_equality(
    a: &Vector,
    spread: &Spread,
    m: f64,
    big_m: f64,
) -> Result<WitnessInstance> {
    bracket_pair(
        TheoremId::T23Additive,
        a,
        spread,
        m,
        big_m,
        "sum x_i = 2 sqrt(mM)/(m+M) (sum ||x_i||) a",
    )
}

/// The bracket family read against `K = (sqrt M - sqrt m)^2/(2 sqrt(mM)) Re<sum x_i, e>`.
pub fn t42_equality(e: &Vector, spread: &Spread, m: f64, big_m: f64) -> Result<WitnessInstance> {
    bracket_pair(
        TheoremId::T42,
        e,
        spread,
        m,
        big_m,
        "sum x_i = (sum ||x_i|| - K) e",
    )
}

/// The bracket pair as a reverse Schwarz equality: lhs = ((M-m)/(M+m))^2 / 2.
pub fn p52_equality_pair(a: &Vector, e: &Vector, m: f64, big_m: f64) -> Result<WitnessInstance> {
    bracket_pair(
        TheoremId::P52,
        a,
        &Spread::pair(e)?,
        m,
        big_m,
        "lhs = ((M - m)/(M + m))^2 / 2",
    )
}

fn bracket_pair(
    theorem: TheoremId,
    a: &Vector,
    spread: &Spread,
    m: f64,
    big_m: f64,
    predicted: &str,
) -> Result<WitnessInstance> {
    conditions::check_bracket_params(m, big_m)?;
    let alpha = 2.0 * m * big_m / (m + big_m);
    let beta = (m * big_m).sqrt() * (big_m - m) / (big_m + m);
    single_anchor(
        theorem,
        a,
        spread,
        alpha,
        beta,
        HypothesisParams::Bracket { m, big_m },
        predicted,
    )
}

/// Hypothesis shape for [`multi_axis_equality`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiAxisKind {
    /// Uniform radius `rho` on every axis.
    Ball { rho: f64 },
    /// Uniform bracket `(m, M)` on every axis.
    Bracket { m: f64, big_m: f64 },
    /// Per-axis brackets; accepted only when they are all equal.
    BracketAxes { axes: Vec<(f64, f64)> },
}

/// `x = alpha s + beta w` with `s = sum a_k`.
pub fn multi_axis_equality(
    family: &OrthonormalFamily,
    spread: &Spread,
    kind: &MultiAxisKind,
) -> Result<WitnessInstance> {
    let size = family.size();
    let mf = size as f64;
    let (theorem, alpha, beta_sq, params, predicted) = match kind {
        MultiAxisKind::Ball { rho } => {
            open_unit("rho", *rho)?;
            let alpha = 1.0 - rho * rho;
            if alpha * mf > 1.0 {
                return Err(Error::Infeasible(format!(
                    "rho^2 = {} is below 1 - 1/m = {}; no equality case exists for a family of size {size}",
                    rho * rho,
                    1.0 - 1.0 / mf
                )));
            }
            (
                TheoremId::T22,
                alpha,
                alpha * (1.0 - mf * alpha),
                HypothesisParams::BallFamily {
                    rho: vec![*rho; size],
                },
                "sum x_i = (sum ||x_i||) sum sqrt(1 - rho_k^2) a_k",
            )
        }
        MultiAxisKind::Bracket { m, big_m } => {
            conditions::check_bracket_params(*m, *big_m)?;
            let alpha = 2.0 * m * big_m / (m + big_m);
            let slack = m * big_m - mf * alpha * alpha;
            if slack < 0.0 {
                return Err(Error::Infeasible(format!(
                    "m_family alpha^2 = {} exceeds mM = {}; widen the bracket or shrink the family",
                    mf * alpha * alpha,
                    m * big_m
                )));
            }
            (
                TheoremId::T24,
                alpha,
                slack,
                HypothesisParams::BracketFamily {
                    axes: vec![(*m, *big_m); size],
                },
                "sum x_i = 2 (sum ||x_i||) sum sqrt(mu_k M_k)/(mu_k + M_k) a_k",
            )
        }
        MultiAxisKind::BracketAxes { axes } => {
            let (first, rest) = axes
                .split_first()
                .ok_or_else(|| Error::Usage("no per-axis brackets given".into()))?;
            if rest.iter().any(|ax| ax != first) {
                return Err(Error::Infeasible(
                    "equality forces ||x_i|| = sqrt(mu_k M_k) on every axis, so only uniform \
                     per-axis brackets admit a witness"
                        .into(),
                ));
            }
            if axes.len() != size {
                return Err(Error::Usage(format!(
                    "{} brackets for a family of size {size}",
                    axes.len()
                )));
            }
            return multi_axis_equality(
                family,
                spread,
                &MultiAxisKind::Bracket {
                    m: first.0,
                    big_m: first.1,
                },
            );
        }
    };
    on_family(
        theorem,
        family,
        spread,
        family.sum().scale_real(alpha),
        beta_sq.max(0.0).sqrt(),
        params,
        predicted,
    )
}

pub fn multi_axis_equality_pair(
    family: &OrthonormalFamily,
    u: &Vector,
    kind: &MultiAxisKind,
) -> Result<WitnessInstance> {
    multi_axis_equality(family, &Spread::pair(u)?, kind)
}

/// Shifts `parts` by a common vector so their sum becomes `mu e` with
/// `mu = Re<sum parts, e>`, then takes minimal slacks.
pub fn t31_equality_family(e: &Vector, parts: &[Vector]) -> Result<WitnessInstance> {
    require_unit(e, "e", &Tolerances::default())?;
    let xs = project_sum(parts, e, 1.0)?;
    Ok(WitnessInstance {
        instance: Instance {
            theorem: TheoremId::T31,
            xs,
            anchor: Some(e.clone()),
            family: None,
            params: HypothesisParams::Slacks { k: None },
        },
        predicted_equality: "sum x_i = (sum ||x_i|| - sum k_i) e".into(),
    })
}

/// The symmetric default: `x = alpha e + beta w`, `alpha >= 0`.
pub fn t31_equality(e: &Vector, spread: &Spread, alpha: f64, beta: f64) -> Result<WitnessInstance> {
    if !(alpha.is_finite() && alpha >= 0.0 && beta.is_finite()) {
        return Err(Error::Parameter(format!(
            "need alpha >= 0 and finite beta, got alpha = {alpha}, beta = {beta}"
        )));
    }
    single_anchor(
        TheoremId::T31,
        e,
        spread,
        alpha,
        beta,
        HypothesisParams::Slacks { k: None },
        "sum x_i = (sum ||x_i|| - sum k_i) e",
    )
}

/// As [`t31_equality_family`] with `s = sum a_k` in place of `e`: the sum
/// becomes `mu s`, and with the minimal slack matrix the mixed bound is tight.
pub fn t32_equality_family(
    family: &OrthonormalFamily,
    parts: &[Vector],
) -> Result<WitnessInstance> {
    let s = family.sum();
    let xs = project_sum(parts, &s, family.size() as f64)?;
    Ok(WitnessInstance {
        instance: Instance {
            theorem: TheoremId::T32,
            xs,
            anchor: None,
            family: Some(family.clone()),
            params: HypothesisParams::SlackMatrix { matrix: None },
        },
        predicted_equality: "sum x_i = (sum ||x_i|| - (1/m) sum M_ik) sum a_k".into(),
    })
}

/// `x = gamma s + beta w` with `s = sum a_k`, `gamma >= 0`.
pub fn t32_equality(
    family: &OrthonormalFamily,
    spread: &Spread,
    gamma: f64,
    beta: f64,
) -> Result<WitnessInstance> {
    if !(gamma.is_finite() && gamma >= 0.0 && beta.is_finite()) {
        return Err(Error::Parameter(format!(
            "need gamma >= 0 and finite beta, got gamma = {gamma}, beta = {beta}"
        )));
    }
    on_family(
        TheoremId::T32,
        family,
        spread,
        family.sum().scale_real(gamma),
        beta,
        HypothesisParams::SlackMatrix { matrix: None },
        "sum x_i = (sum ||x_i|| - (1/m) sum M_ik) sum a_k",
    )
}

/// `x_i = p_i - (S - mu d)/n` with `S = sum p_i`, `mu = Re<S, d>/||d||^2`.
fn project_sum(parts: &[Vector], d: &Vector, d_norm_sqr: f64) -> Result<Vec<Vector>> {
    if parts.is_empty() {
        return Err(Error::Usage("need at least one part".into()));
    }
    space::check_uniform(parts, d)?;
    let total = space::sum(parts)?;
    let mu = total.re_inner(d)? / d_norm_sqr;
    if mu < 0.0 {
        return Err(Error::Precondition(format!(
            "the parts sum to a vector with negative component {mu} along the target direction"
        )));
    }
    let mut shift = total;
    shift.add_scaled(-mu, d);
    let n = parts.len() as f64;
    Ok(parts
        .iter()
        .map(|p| {
            let mut x = p.clone();
            x.add_scaled(-1.0 / n, &shift);
            x
        })
        .collect())
}

/// `x = cos(t) e + sin(t) w` with `1 - cos(t) = r^2/2`: `||x - e|| = r` and
/// `||x|| - Re<x, e> = r^2/2`. Needs `r <= sqrt 2` so that the sum points
/// along `+e`.
pub fn t43_equality(e: &Vector, spread: &Spread, r: f64) -> Result<WitnessInstance> {
    if !(r.is_finite() && r > 0.0 && r <= std::f64::consts::SQRT_2) {
        return Err(Error::Parameter(format!(
            "r must lie in (0, sqrt 2], got {r}"
        )));
    }
    let c = 1.0 - r * r / 2.0;
    single_anchor(
        TheoremId::T43,
        e,
        spread,
        c,
        (1.0 - c * c).sqrt(),
        HypothesisParams::Radii {
            r: vec![r; spread.len()],
        },
        "sum x_i = (sum ||x_i|| - (1/2) sum r_i^2) e",
    )
}

/// `x = c (cos(t) e + sin(t) w)` with `c = (M+m)/2` and
/// `1 - cos(t) = ((M-m)/(M+m))^2/2`: `||x - c e|| = (M-m)/2` and
/// `||x|| - Re<x, e> = (M-m)^2/(4(M+m))`.
pub fn t44_equality(e: &Vector, spread: &Spread, m: f64, big_m: f64) -> Result<WitnessInstance> {
    conditions::check_bracket_params(m, big_m)?;
    let c = (big_m + m) / 2.0;
    let q = (big_m - m) / (big_m + m);
    let cos = 1.0 - q * q / 2.0;
    single_anchor(
        TheoremId::T44,
        e,
        spread,
        c * cos,
        c * (1.0 - cos * cos).sqrt(),
        HypothesisParams::Brackets {
            brackets: vec![(m, big_m); spread.len()],
        },
        "sum x_i = (sum ||x_i|| - (1/4) sum (M_i - m_i)^2/(M_i + m_i)) e",
    )
}

/// `x = a + r e`, `y = a - r e` and the ratio of the Schwarz reverse to `r^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessPoint {
    pub r: f64,
    pub x: Vector,
    pub y: Vector,
    /// `(||x|| ||y|| - Re<x, y>)/(||x|| + ||y||)^2`
    pub lhs: f64,
    /// `r^2 / 2`
    pub bound: f64,
    /// `lhs / r^2`, equal to `1/(2(1 + r^2))`; tends to 1/2 as `r -> 0`.
    pub ratio: f64,
}

pub fn sharpness_instance_p51(a: &Vector, e: &Vector, r: f64) -> Result<SharpnessPoint> {
    open_unit("r", r)?;
    let tol = Tolerances::default();
    require_unit(a, "a", &tol)?;
    require_unit(e, "e", &tol)?;
    let c = a.re_inner(e)?;
    if c.abs() > tol.allowance(1.0) {
        return Err(Error::Precondition(format!(
            "`e` must be orthogonal to `a`, Re<a, e> = {c}"
        )));
    }
    let mut x = a.clone();
    x.add_scaled(r, e);
    let mut y = a.clone();
    y.add_scaled(-r, e);
    let lhs = bounds::schwarz_ratio(&x, &y)?;
    Ok(SharpnessPoint {
        r,
        x,
        y,
        lhs,
        bound: r * r / 2.0,
        ratio: lhs / (r * r),
    })
}

/// `count` radii spaced logarithmically from `hi` down to `lo`, inclusive.
pub fn log_radii(hi: f64, lo: f64, count: usize) -> Result<Vec<f64>> {
    if !(hi.is_finite() && lo.is_finite() && hi > 0.0 && lo > 0.0) {
        return Err(Error::Parameter(format!(
            "sweep endpoints must be positive, got {hi} and {lo}"
        )));
    }
    Ok(match count {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            // base 10 keeps decade endpoints exact
            let (lh, ll) = (hi.log10(), lo.log10());
            (0..count)
                .map(|j| 10f64.powf(lh + (ll - lh) * j as f64 / (count - 1) as f64))
                .collect()
        }
    })
}

pub fn sharpness_sweep(a: &Vector, e: &Vector, radii: &[f64]) -> Result<Vec<SharpnessPoint>> {
    radii
        .iter()
        .map(|r| sharpness_instance_p51(a, e, *r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{validate_orthonormal, Field};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn basis(dim: usize, k: usize) -> Vector {
        Vector::basis(Field::Real, dim, k)
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn assert_equality(w: &WitnessInstance) {
        let ver = w.verify(&tol()).unwrap();
        assert!(ver.hypothesis.overall, "{:?}", ver.hypothesis);
        assert!(
            ver.attains_equality,
            "{}: relative slack {}",
            w.theorem(),
            ver.relative_slack
        );
        if let Some(d) = ver.sum_deviation {
            assert!(d < 1e-12, "{}: sum deviation {d}", w.theorem());
        }
    }

    #[test]
    fn dm_pair_example() {
        let w = dm_equality_pair(&basis(2, 0), &basis(2, 1), 0.6).unwrap();
        assert_abs_diff_eq!(w.xs()[0].components()[0].re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(w.xs()[1].components()[1].re, -0.8, epsilon = 1e-15);
        let total = space::sum(w.xs()).unwrap();
        assert_abs_diff_eq!(total.norm(), 1.2, epsilon = 1e-15);
        assert_equality(&w);

        let w = dm_equality_pair(&basis(2, 0), &basis(2, 1), 1.0).unwrap();
        assert_eq!(w.xs()[0], w.xs()[1]);
        assert_equality(&w);
    }

    #[test]
    fn non_orthogonal_direction_is_rejected() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let e = Vector::real(&[h, h]).unwrap();
        assert!(matches!(
            dm_equality_pair(&basis(2, 0), &e, 0.5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn t21_pair_example() {
        let w = t21_equality_pair(&basis(2, 0), &basis(2, 1), 0.6).unwrap();
        let x = &w.xs()[0];
        assert_abs_diff_eq!(x.components()[0].re, 0.64, epsilon = 1e-15);
        assert_abs_diff_eq!(x.components()[1].re, 0.48, epsilon = 1e-15);
        assert_abs_diff_eq!(x.norm(), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(x.distance(&basis(2, 0)).unwrap(), 0.6, epsilon = 1e-15);
        let total = space::sum(w.xs()).unwrap();
        assert_abs_diff_eq!(total.norm(), 1.28, epsilon = 1e-12);
        assert_equality(&w);
        assert!(t21_equality_pair(&basis(2, 0), &basis(2, 1), 1.0).is_err());
    }

    #[test]
    fn t23_pair_example() {
        let w = t23_equality_pair(&basis(2, 0), &basis(2, 1), 1.0, 4.0).unwrap();
        let x = &w.xs()[0];
        assert_abs_diff_eq!(x.components()[0].re, 1.6, epsilon = 1e-15);
        assert_abs_diff_eq!(x.components()[1].re, 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(x.norm(), 2.0, epsilon = 1e-15);
        let ver = w.verify(&tol()).unwrap();
        assert!(ver.hypothesis.near_boundary);
        assert_equality(&w);

        let w = t23_equality_pair(&basis(2, 0), &basis(2, 1), 2.0, 2.0).unwrap();
        assert_eq!(w.xs()[0], basis(2, 0).scale_real(2.0));
        assert_equality(&w);
    }

    #[test]
    fn multi_axis_examples() {
        let fam = validate_orthonormal(vec![basis(3, 0), basis(3, 1)], tol()).unwrap();
        let u = basis(3, 2);
        let w = multi_axis_equality_pair(&fam, &u, &MultiAxisKind::Ball { rho: 0.8 }).unwrap();
        let x = &w.xs()[0];
        assert_abs_diff_eq!(x.components()[0].re, 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(x.components()[2].re, 0.1008f64.sqrt(), epsilon = 1e-15);
        assert_equality(&w);

        assert!(matches!(
            multi_axis_equality_pair(&fam, &u, &MultiAxisKind::Ball { rho: 0.5 }),
            Err(Error::Infeasible(_))
        ));

        let w = multi_axis_equality_pair(&fam, &u, &MultiAxisKind::Bracket { m: 1.0, big_m: 9.0 })
            .unwrap();
        assert_equality(&w);

        let nonuniform = MultiAxisKind::BracketAxes {
            axes: vec![(1.0, 9.0), (1.0, 8.0)],
        };
        let err = multi_axis_equality_pair(&fam, &u, &nonuniform).unwrap_err();
        assert!(err.to_string().contains("uniform"));
    }

    #[test]
    fn single_axis_bracket_matches_t23() {
        let fam = validate_orthonormal(vec![basis(2, 0)], tol()).unwrap();
        let w = multi_axis_equality_pair(
            &fam,
            &basis(2, 1),
            &MultiAxisKind::Bracket { m: 1.0, big_m: 4.0 },
        )
        .unwrap();
        let v = t23_equality_pair(&basis(2, 0), &basis(2, 1), 1.0, 4.0).unwrap();
        for (x, y) in w.xs().iter().zip(v.xs()) {
            assert!(x.distance(y).unwrap() < 1e-15);
        }
    }

    #[test]
    fn t31_examples() {
        let e = basis(2, 0);
        let w = t31_equality_family(&e, &[e.clone(), e.clone()]).unwrap();
        assert_equality(&w);

        let w = t31_equality(&e, &Spread::pair(&basis(2, 1)).unwrap(), 0.6, 0.8).unwrap();
        let k = conditions::minimal_additive_slacks(w.xs(), &e, &tol()).unwrap();
        assert_abs_diff_eq!(k[0], 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(k[1], 0.4, epsilon = 1e-15);
        assert_equality(&w);

        let parts = [
            Vector::real(&[0.3, 1.0, -0.2]).unwrap(),
            Vector::real(&[1.1, 0.0, 0.7]).unwrap(),
            Vector::real(&[0.2, -0.4, 0.1]).unwrap(),
        ];
        let w = t31_equality_family(&basis(3, 0), &parts).unwrap();
        assert_equality(&w);

        let neg = [Vector::real(&[-1.0, 0.0, 0.0]).unwrap()];
        assert!(t31_equality_family(&basis(3, 0), &neg).is_err());
    }

    #[test]
    fn t32_t43_t44_and_additive_forms() {
        let e = basis(3, 0);
        let u = basis(3, 2);
        let spread = Spread::pair(&u).unwrap();
        let fam = validate_orthonormal(vec![basis(3, 0), basis(3, 1)], tol()).unwrap();
        assert_equality(&t32_equality(&fam, &spread, 0.7, 0.4).unwrap());
        let parts = [
            Vector::real(&[0.3, 1.0, -0.2]).unwrap(),
            Vector::real(&[1.1, 0.0, 0.7]).unwrap(),
        ];
        assert_equality(&t32_equality_family(&fam, &parts).unwrap());
        assert_equality(&t41_equality(&e, &spread, 0.6).unwrap());
        assert_equality(&t42_equality(&e, &spread, 1.0, 4.0).unwrap());
        assert_equality(&t23_additive_equality(&e, &spread, 1.0, 4.0).unwrap());
        assert_equality(&t43_equality(&e, &spread, 0.7).unwrap());
        assert_equality(&t43_equality(&e, &spread, std::f64::consts::SQRT_2).unwrap());
        assert!(t43_equality(&e, &spread, 1.8).is_err());
        assert_equality(&t44_equality(&e, &spread, 1.0, 3.0).unwrap());
        assert_equality(&p51_equality_pair(&e, &u, 0.6).unwrap());
        assert_equality(&p52_equality_pair(&e, &u, 1.0, 4.0).unwrap());
    }

    #[test]
    fn complex_direction_i_times_anchor_works() {
        let a = Vector::basis(Field::Complex, 1, 0);
        let u = a.scale(Complex64::new(0.0, 1.0));
        assert_equality(&t21_equality_pair(&a, &u, 0.6).unwrap());
        assert_equality(&t23_equality_pair(&a, &u, 1.0, 4.0).unwrap());
    }

    #[test]
    fn odd_and_even_family_sizes() {
        let a = basis(3, 0);
        for n in 2..=7 {
            let spread = Spread::balanced(&basis(3, 1), &basis(3, 2), n).unwrap();
            assert_eq!(spread.len(), n);
            let w = t21_equality(&a, &spread, 0.6).unwrap();
            assert_equality(&w);
            assert_equality(&t23_equality(&a, &spread, 1.0, 4.0).unwrap());
        }
        // polygon in the complex plane orthogonal to a real anchor
        let a = Vector::basis(Field::Complex, 2, 0);
        let e = Vector::basis(Field::Complex, 2, 1);
        let u = e.scale(Complex64::new(0.0, 1.0));
        let spread = Spread::polygon(&e, &u, 5).unwrap();
        assert_equality(&dm_equality(&a, &spread, 0.3).unwrap());
    }

    #[test]
    fn perturbation_breaks_equality() {
        let w = t21_equality_pair(&basis(2, 0), &basis(2, 1), 0.6).unwrap();
        let inward = -&basis(2, 1);
        let pert = w.perturbed(0, &inward, 1e-3).unwrap();
        let ev = pert.evaluate(&tol()).unwrap();
        assert!(ev.hypothesis.overall);
        assert!(ev.certificate.relative_slack(&tol()) > 1e-6);
    }

    #[test]
    fn sharpness_examples() {
        let (a, e) = (basis(2, 0), basis(2, 1));
        let p = sharpness_instance_p51(&a, &e, 0.5).unwrap();
        assert_abs_diff_eq!(p.ratio, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(p.x.norm(), 1.25f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.x.re_inner(&p.y).unwrap(), 0.75, epsilon = 1e-15);
        let p = sharpness_instance_p51(&a, &e, 1e-3).unwrap();
        assert_abs_diff_eq!(p.ratio, 1.0 / (2.0 * (1.0 + 1e-6)), epsilon = 1e-12);
        assert!(sharpness_instance_p51(&a, &e, 1.0).is_err());

        let radii = log_radii(1e-1, 1e-6, 6).unwrap();
        assert_abs_diff_eq!(radii[5], 1e-6, epsilon = 1e-18);
        let sweep = sharpness_sweep(&a, &e, &radii).unwrap();
        for w in sweep.windows(2) {
            assert!(w[1].ratio > w[0].ratio);
            assert!(w[1].ratio <= 0.5);
        }
    }
}
