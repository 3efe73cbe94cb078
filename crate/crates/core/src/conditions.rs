//! Hypothesis checkers and extremal parameters.
//!
//! Every checker produces a [`HypothesisReport`] with one entry per vector (or
//! per vector/axis pair). Closed conditions pass when the measured value misses
//! its threshold by at most the scaled tolerance; entries within the boundary
//! band of their threshold are flagged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{check_uniform, require_unit, OrthonormalFamily, Tolerances, Vector};

/// Which side of the threshold the measured value must lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    /// `measured <= threshold`
    AtMost,
    /// `measured >= threshold`
    AtLeast,
}

/// Hypothesis identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    /// `r <= Re<x_i, a> / ||x_i||`
    DmRatio,
    /// `r_k <= Re<x_i, a_k> / ||x_i||`
    DmRatioFamily,
    /// `||x_i - a|| <= rho`
    Ball,
    /// `||x_i - a_k|| <= rho_k`
    BallFamily,
    /// `||x_i - e|| <= r_i`
    BallRadii,
    /// `Re<M a - x_i, x_i - m a> >= 0`
    Bracket,
    /// `Re<M_k a_k - x_i, x_i - mu_k a_k> >= 0`
    BracketFamily,
    /// `Re<M_i e - x_i, x_i - m_i e> >= 0`
    BracketPerVector,
    /// `||x_i|| - Re<e, x_i> <= k_i`
    AdditiveSlack,
    /// `||x_i|| - Re<e_k, x_i> <= M_ik`
    SlackMatrix,
    /// `||f_i(t) - g(t)|| <= rho` at every quadrature node
    IntegralBall,
    /// `Re<M g(t) - f_i(t), f_i(t) - m g(t)> >= 0` at every quadrature node
    IntegralBracket,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemVerdict {
    /// Vector index `i`.
    pub index: usize,
    /// Axis `k` (or quadrature node) for two-index conditions.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub axis: Option<usize>,
    pub measured: f64,
    pub threshold: f64,
    pub sense: Sense,
    pub pass: bool,
    /// Positive means a strict pass.
    pub boundary_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub kind: ConditionKind,
    pub per_item: Vec<ItemVerdict>,
    pub overall: bool,
    pub near_boundary: bool,
}

impl HypothesisReport {
    pub(crate) fn new(kind: ConditionKind) -> Self {
        HypothesisReport {
            kind,
            per_item: Vec::new(),
            overall: true,
            near_boundary: false,
        }
    }

    /// Records one comparison. `scale` is the magnitude of the terms that
    /// produced `measured`; it sizes the pass allowance.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn push(
        &mut self,
        index: usize,
        axis: Option<usize>,
        measured: f64,
        threshold: f64,
        sense: Sense,
        scale: f64,
        tol: &Tolerances,
    ) {
        let boundary_distance = match sense {
            Sense::AtMost => threshold - measured,
            Sense::AtLeast => measured - threshold,
        };
        let pass = boundary_distance >= -tol.allowance(scale);
        let near = boundary_distance.abs() <= tol.boundary_band;
        self.overall &= pass;
        self.near_boundary |= near;
        self.per_item.push(ItemVerdict {
            index,
            axis,
            measured,
            threshold,
            sense,
            pass,
            boundary_distance,
        });
    }

    /// Worst (smallest) boundary distance, if any items were checked.
    pub fn min_boundary_distance(&self) -> Option<f64> {
        self.per_item
            .iter()
            .map(|v| v.boundary_distance)
            .min_by(f64::total_cmp)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ItemVerdict> {
        self.per_item.iter().filter(|v| !v.pass)
    }

    /// Turns a failing report into an error naming the first failing item.
    pub fn require(&self) -> Result<()> {
        match self.failures().next() {
            None => Ok(()),
            Some(v) => Err(Error::HypothesisFailed(format!(
                "{:?} fails at item {}{}: measured {} vs threshold {}",
                self.kind,
                v.index,
                v.axis.map(|k| format!(", axis {k}")).unwrap_or_default(),
                v.measured,
                v.threshold
            ))),
        }
    }
}

/// Per-vector Diaz-Metcalf ratios `Re<x_i, a> / ||x_i||` and their minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmRatios {
    pub per_vector: Vec<f64>,
    /// Largest admissible `r`; negative means no `r >= 0` works.
    pub r_max: f64,
}

impl DmRatios {
    pub fn is_satisfiable(&self) -> bool {
        self.r_max >= 0.0
    }
}

fn require_nonempty(xs: &[Vector]) -> Result<&Vector> {
    xs.first()
        .ok_or_else(|| Error::Usage("the vector family must be nonempty".into()))
}

fn require_nonzero(xs: &[Vector], tol: &Tolerances) -> Result<()> {
    match xs.iter().position(|x| x.is_zero(tol)) {
        None => Ok(()),
        Some(i) => Err(Error::Usage(format!(
            "x_{i} is the zero vector; ratio conditions require nonzero vectors"
        ))),
    }
}

fn check_radius(rho: f64, name: &str) -> Result<()> {
    if rho.is_finite() && rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must lie in (0,1), got {rho}"
        )))
    }
}

pub(crate) fn check_bracket_params(m: f64, big_m: f64) -> Result<()> {
    if m.is_finite() && big_m.is_finite() && m > 0.0 && big_m >= m {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "bracket requires M >= m > 0, got m = {m}, M = {big_m}"
        )))
    }
}

/// Ratios `Re<x_i, a> / ||x_i||` against a unit anchor.
pub fn dm_ratios(xs: &[Vector], a: &Vector, tol: &Tolerances) -> Result<DmRatios> {
    require_nonempty(xs)?;
    check_uniform(xs, a)?;
    require_unit(a, "a", tol)?;
    require_nonzero(xs, tol)?;
    let per_vector: Vec<f64> = xs
        .iter()
        .map(|x| x.re_inner_unchecked(a) / x.norm())
        .collect();
    let r_max = per_vector.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DmRatios { per_vector, r_max })
}

/// Per-axis ratios for an orthonormal family, plus the Bessel sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmRatioMatrix {
    pub per_axis: Vec<DmRatios>,
    /// `sum_k r_k^2` over the axes with `r_k >= 0`.
    pub bessel_sum: f64,
    pub bessel_ok: bool,
}

impl DmRatioMatrix {
    pub fn r(&self) -> Vec<f64> {
        self.per_axis.iter().map(|d| d.r_max).collect()
    }
}

pub fn dm_ratio_matrix(
    xs: &[Vector],
    family: &OrthonormalFamily,
    tol: &Tolerances,
) -> Result<DmRatioMatrix> {
    let per_axis = family
        .members()
        .iter()
        .map(|a| dm_ratios(xs, a, tol))
        .collect::<Result<Vec<_>>>()?;
    let bessel_sum: f64 = per_axis.iter().map(|d| d.r_max.max(0.0).powi(2)).sum();
    Ok(DmRatioMatrix {
        per_axis,
        bessel_ok: bessel_sum <= 1.0 + tol.allowance(1.0),
        bessel_sum,
    })
}

/// `r <= Re<x_i, a> / ||x_i||` for every `i`.
pub fn check_dm(xs: &[Vector], a: &Vector, r: f64, tol: &Tolerances) -> Result<HypothesisReport> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Parameter(format!("r must be >= 0, got {r}")));
    }
    let ratios = dm_ratios(xs, a, tol)?;
    let mut report = HypothesisReport::new(ConditionKind::DmRatio);
    for (i, &q) in ratios.per_vector.iter().enumerate() {
        report.push(i, None, q, r, Sense::AtLeast, 1.0, tol);
    }
    Ok(report)
}

/// `r_k <= Re<x_i, a_k> / ||x_i||` for every `i` and `k`.
pub fn check_dm_family(
    xs: &[Vector],
    family: &OrthonormalFamily,
    rs: &[f64],
    tol: &Tolerances,
) -> Result<HypothesisReport> {
    if rs.len() != family.size() {
        return Err(Error::Usage(format!(
            "{} ratios given for a family of size {}",
            rs.len(),
            family.size()
        )));
    }
    let mut report = HypothesisReport::new(ConditionKind::DmRatioFamily);
    for (k, (a, &r)) in family.members().iter().zip(rs).enumerate() {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Parameter(format!("r_{k} must be >= 0, got {r}")));
        }
        let ratios = dm_ratios(xs, a, tol)?;
        for (i, &q) in ratios.per_vector.iter().enumerate() {
            report.push(i, Some(k), q, r, Sense::AtLeast, 1.0, tol);
        }
    }
    Ok(report)
}

/// `||x_i - center|| <= rho` with `rho` in (0,1) and a unit center.
pub fn check_ball(
    xs: &[Vector],
    center: &Vector,
    rho: f64,
    tol: &Tolerances,
) -> Result<HypothesisReport> {
    check_radius(rho, "rho")?;
    require_nonempty(xs)?;
    check_uniform(xs, center)?;
    require_unit(center, "center", tol)?;
    let mut report = HypothesisReport::new(ConditionKind::Ball);
    push_ball_items(&mut report, xs, center, rho, None, tol);
    Ok(report)
}

fn push_ball_items(
    report: &mut HypothesisReport,
    xs: &[Vector],
    center: &Vector,
    radius: f64,
    axis: Option<usize>,
    tol: &Tolerances,
) {
    for (i, x) in xs.iter().enumerate() {
        let d = (x - center).norm();
        let scale = x.norm().max(center.norm());
        report.push(i, axis, d, radius, Sense::AtMost, scale, tol);
    }
}

/// `||x_i - a_k|| <= rho_k` for every vector and every family member.
pub fn check_ball_family(
    xs: &[Vector],
    family: &OrthonormalFamily,
    rhos: &[f64],
    tol: &Tolerances,
) -> Result<HypothesisReport> {
    if rhos.len() != family.size() {
        return Err(Error::Usage(format!(
            "{} radii given for a family of size {}",
            rhos.len(),
            family.size()
        )));
    }
    require_nonempty(xs)?;
    check_uniform(xs, &family.members()[0])?;
    let mut report = HypothesisReport::new(ConditionKind::BallFamily);
    for (k, (a, &rho)) in family.members().iter().zip(rhos).enumerate() {
        check_radius(rho, &format!("rho_{k}"))?;
        push_ball_items(&mut report, xs, a, rho, Some(k), tol);
    }
    Ok(report)
}

/// `||x_i - e|| <= r_i` with one positive radius per vector (no upper limit).
pub fn check_ball_radii(
    xs: &[Vector],
    e: &Vector,
    radii: &[f64],
    tol: &Tolerances,
) -> Result<HypothesisReport> {
    require_nonempty(xs)?;
    check_uniform(xs, e)?;
    require_unit(e, "e", tol)?;
    if radii.len() != xs.len() {
        return Err(Error::Usage(format!(
            "{} radii given for {} vectors",
            radii.len(),
            xs.len()
        )));
    }
    let mut report = HypothesisReport::new(ConditionKind::BallRadii);
    for (i, (x, &r)) in xs.iter().zip(radii).enumerate() {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Parameter(format!("r_{i} must be > 0, got {r}")));
        }
        let d = (x - e).norm();
        report.push(i, None, d, r, Sense::AtMost, x.norm().max(1.0), tol);
    }
    Ok(report)
}

/// `Re<Z - x, x - z>` together with the magnitude of its terms.
fn bracket_value(x: &Vector, z: &Vector, big_z: &Vector) -> (f64, f64) {
    let left = big_z - x;
    let right = x - z;
    let value = left.re_inner_unchecked(&right);
    (value, left.norm() * right.norm())
}

pub(crate) fn push_bracket_item(
    report: &mut HypothesisReport,
    index: usize,
    x: &Vector,
    a: &Vector,
    (m, big_m): (f64, f64),
    axis: Option<usize>,
    tol: &Tolerances,
) {
    let (value, scale) = bracket_value(x, &a.scale_real(m), &a.scale_real(big_m));
    // the expansion ||x||^2 + mM - (m+M)Re<x,a> carries these magnitudes
    let scale = scale.max(x.norm_sqr()).max(m * big_m);
    report.push(index, axis, value, 0.0, Sense::AtLeast, scale, tol);
}

/// `Re<M a - x_i, x_i - m a> >= 0` with `M >= m > 0` and unit `a`.
pub fn check_bracket(
    xs: &[Vector],
    a: &Vector,
    m: f64,
    big_m: f64,
    tol: &Tolerances,
) -> Result<HypothesisReport> {
    check_bracket_params(m, big_m)?;
    require_nonempty(xs)?;
    check_uniform(xs, a)?;
    require_unit(a, "a", tol)?;
    let mut report = HypothesisReport::new(ConditionKind::Bracket);
    for (i, x) in xs.iter().enumerate() {
        push_bracket_item(&mut report, i, x, a, (m, big_m), None, tol);
    }
    Ok(report)
}

/// Per-axis bracket `Re<M_k a_k - x_i, x_i - mu_k a_k> >= 0`.
pub fn check_bracket_family(
    xs: &[Vector],
    family: &OrthonormalFamily,
    axes: &[(f64, f64)],
    tol: &Tolerances,
) -> Result<HypothesisReport> {
    if axes.len() != family.size() {
        return Err(Error::Usage(format!(
            "{} brackets given for a family of size {}",
            axes.len(),
            family.size()
        )));
    }
    require_nonempty(xs)?;
    check_uniform(xs, &family.members()[0])?;
    let mut report = HypothesisReport::new(ConditionKind::BracketFamily);
    for (k, (a, &(mu, big_m))) in family.members().iter().zip(axes).enumerate() {
        check_bracket_params(mu, big_m)?;
        for (i, x) in xs.iter().enumerate() {
            push_bracket_item(&mut report, i, x, a, (mu, big_m), Some(k), tol);
        }
    }
    Ok(report)
}

/// Per-vector bracket `Re<M_i e - x_i, x_i - m_i e> >= 0`.
pub fn check_bracket_per_vector(
    xs: &[Vector],
    e: &Vector,
    brackets: &[(f64, f64)],
    tol: &Tolerances,
) -> Result<HypothesisReport> {
    require_nonempty(xs)?;
    check_uniform(xs, e)?;
    require_unit(e, "e", tol)?;
    if brackets.len() != xs.len() {
        return Err(Error::Usage(format!(
            "{} brackets given for {} vectors",
            brackets.len(),
            xs.len()
        )));
    }
    let mut report = HypothesisReport::new(ConditionKind::BracketPerVector);
    for (i, (x, &(m, big_m))) in xs.iter().zip(brackets).enumerate() {
        check_bracket_params(m, big_m)?;
        push_bracket_item(&mut report, i, x, e, (m, big_m), None, tol);
    }
    Ok(report)
}

/// Both sides of the bracket/ball equivalence for one triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    /// `Re<Z - x, x - z> >= 0`
    pub bracket: bool,
    /// `||x - (Z + z)/2|| <= ||Z - z|| / 2`
    pub ball: bool,
    pub bracket_value: f64,
    pub ball_distance: f64,
    pub ball_radius: f64,
    /// Either measured quantity lies within the boundary band.
    pub near_boundary: bool,
}

impl Equivalence {
    pub fn agree(&self) -> bool {
        self.bracket == self.ball
    }
}

/// Evaluates the bracket form and the ball form independently.
///
/// The two are exactly equivalent; in floating point they can disagree only
/// when a measured quantity sits on its threshold, which `near_boundary`
/// reports.
pub fn bracket_ball_equivalent(
    x: &Vector,
    z: &Vector,
    big_z: &Vector,
    tol: &Tolerances,
) -> Result<Equivalence> {
    check_uniform(&[z.clone(), big_z.clone()], x)?;
    let (bracket_value, _) = bracket_value(x, z, big_z);
    let mid = (big_z + z).scale_real(0.5);
    let ball_distance = (x - &mid).norm();
    let ball_radius = 0.5 * (big_z - z).norm();
    Ok(Equivalence {
        bracket: bracket_value >= 0.0,
        ball: ball_distance <= ball_radius,
        bracket_value,
        ball_distance,
        ball_radius,
        near_boundary: bracket_value.abs() <= tol.boundary_band
            || (ball_distance - ball_radius).abs() <= tol.boundary_band,
    })
}

/// Slack parameters `k_i` (single unit vector) or `M_ik` (orthonormal family).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlackParameters {
    PerVector(Vec<f64>),
    /// Row `i` holds `M_i1 .. M_im`.
    Matrix(Vec<Vec<f64>>),
}

impl SlackParameters {
    pub fn total(&self) -> f64 {
        match self {
            SlackParameters::PerVector(k) => k.iter().sum(),
            SlackParameters::Matrix(rows) => rows.iter().flatten().sum(),
        }
    }
}

/// `||x|| - Re<e, x>`, clamped at zero when roundoff makes it slightly negative.
fn minimal_slack(x: &Vector, e: &Vector) -> f64 {
    (x.norm() - e.re_inner_unchecked(x)).max(0.0)
}

/// Tightest `k_i` with `||x_i|| - Re<e, x_i> <= k_i`.
pub fn minimal_additive_slacks(xs: &[Vector], e: &Vector, tol: &Tolerances) -> Result<Vec<f64>> {
    require_nonempty(xs)?;
    check_uniform(xs, e)?;
    require_unit(e, "e", tol)?;
    Ok(xs.iter().map(|x| minimal_slack(x, e)).collect())
}

/// Tightest `M_ik` with `||x_i|| - Re<e_k, x_i> <= M_ik`.
pub fn minimal_slack_matrix(xs: &[Vector], family: &OrthonormalFamily) -> Result<Vec<Vec<f64>>> {
    require_nonempty(xs)?;
    check_uniform(xs, &family.members()[0])?;
    Ok(xs
        .iter()
        .map(|x| {
            family
                .members()
                .iter()
                .map(|e| minimal_slack(x, e))
                .collect()
        })
        .collect())
}

/// `||x_i|| - Re<e, x_i> <= k_i` with `k_i >= 0`.
pub fn check_additive_slacks(
    xs: &[Vector],
    e: &Vector,
    ks: &[f64],
    tol: &Tolerances,
) -> Result<HypothesisReport> {
    require_nonempty(xs)?;
    check_uniform(xs, e)?;
    require_unit(e, "e", tol)?;
    if ks.len() != xs.len() {
        return Err(Error::Usage(format!(
            "{} slacks given for {} vectors",
            ks.len(),
            xs.len()
        )));
    }
    let mut report = HypothesisReport::new(ConditionKind::AdditiveSlack);
    for (i, (x, &k)) in xs.iter().zip(ks).enumerate() {
        if !(k.is_finite() && k >= -tol.abs) {
            return Err(Error::Parameter(format!("k_{i} must be >= 0, got {k}")));
        }
        let measured = x.norm() - e.re_inner_unchecked(x);
        report.push(i, None, measured, k, Sense::AtMost, x.norm(), tol);
    }
    Ok(report)
}

/// `||x_i|| - Re<e_k, x_i> <= M_ik` with `M_ik >= 0`.
pub fn check_slack_matrix(
    xs: &[Vector],
    family: &OrthonormalFamily,
    matrix: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<HypothesisReport> {
    require_nonempty(xs)?;
    check_uniform(xs, &family.members()[0])?;
    if matrix.len() != xs.len() || matrix.iter().any(|row| row.len() != family.size()) {
        return Err(Error::Usage(format!(
            "slack matrix must be {} x {}",
            xs.len(),
            family.size()
        )));
    }
    let mut report = HypothesisReport::new(ConditionKind::SlackMatrix);
    for (i, (x, row)) in xs.iter().zip(matrix).enumerate() {
        for (k, (e, &bound)) in family.members().iter().zip(row).enumerate() {
            if !(bound.is_finite() && bound >= -tol.abs) {
                return Err(Error::Parameter(format!(
                    "M_{i}{k} must be >= 0, got {bound}"
                )));
            }
            let measured = x.norm() - e.re_inner_unchecked(x);
            report.push(i, Some(k), measured, bound, Sense::AtMost, x.norm(), tol);
        }
    }
    Ok(report)
}

/// Necessary condition for the balls `D(a_k, rho_k)` around an orthonormal
/// family to share a point: `||a_j - a_k|| = sqrt(2)`, so every pair needs
/// `rho_j + rho_k >= sqrt(2)`.
pub fn multi_ball_prescreen(rhos: &[f64]) -> Result<()> {
    for j in 0..rhos.len() {
        for k in j + 1..rhos.len() {
            if rhos[j] + rhos[k] < std::f64::consts::SQRT_2 {
                return Err(Error::Infeasible(format!(
                    "balls around a_{j} and a_{k} are disjoint: rho_{j} + rho_{k} = {} < sqrt(2)",
                    rhos[j] + rhos[k]
                )));
            }
        }
    }
    Ok(())
}

/// Same pairwise screen for per-axis brackets, using their equivalent balls
/// of center `(M_k + mu_k)/2 a_k` and radius `(M_k - mu_k)/2`.
pub fn multi_bracket_prescreen(axes: &[(f64, f64)]) -> Result<()> {
    for j in 0..axes.len() {
        for k in j + 1..axes.len() {
            let (cj, rj) = ((axes[j].0 + axes[j].1) / 2.0, (axes[j].1 - axes[j].0) / 2.0);
            let (ck, rk) = ((axes[k].0 + axes[k].1) / 2.0, (axes[k].1 - axes[k].0) / 2.0);
            if cj.hypot(ck) > rj + rk {
                return Err(Error::Infeasible(format!(
                    "bracket balls for axes {j} and {k} are disjoint"
                )));
            }
        }
    }
    Ok(())
}
