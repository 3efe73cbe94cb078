//! Bound constants, additive slacks, and checked certificates.
//!
//! A certificate evaluates both sides of one reverse inequality on a concrete
//! family and records the slack (right side minus left side). A certificate
//! holds when its slack is at least `-(abs + rel * scale)`, where `scale` is
//! the larger magnitude of the two sides.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conditions::check_bracket_params;
use crate::error::{Error, Result};
use crate::space::{self, check_uniform, require_unit, OrthonormalFamily, Tolerances, Vector};

/// Every inequality the toolkit certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    /// Diaz-Metcalf, single unit vector.
    #[serde(rename = "DM")]
    Dm,
    /// Diaz-Metcalf, orthonormal family.
    #[serde(rename = "DM_ORTHO")]
    DmOrtho,
    #[serde(rename = "T2.1")]
    T21,
    #[serde(rename = "T2.2")]
    T22,
    #[serde(rename = "T2.3")]
    T23,
    /// The additive form of T2.3.
    #[serde(rename = "T2.3-additive")]
    T23Additive,
    #[serde(rename = "T2.4")]
    T24,
    #[serde(rename = "T3.1")]
    T31,
    #[serde(rename = "T3.2")]
    T32,
    #[serde(rename = "T4.1")]
    T41,
    #[serde(rename = "T4.2")]
    T42,
    #[serde(rename = "T4.3")]
    T43,
    #[serde(rename = "T4.4")]
    T44,
    #[serde(rename = "P5.1")]
    P51,
    #[serde(rename = "P5.2")]
    P52,
    #[serde(rename = "P6.1")]
    P61,
    #[serde(rename = "P6.2")]
    P62,
}

impl TheoremId {
    /// The finite-dimensional theorems swept by a full campaign, in report order.
    pub const CAMPAIGN: [TheoremId; 14] = [
        TheoremId::Dm,
        TheoremId::DmOrtho,
        TheoremId::T21,
        TheoremId::T22,
        TheoremId::T23,
        TheoremId::T24,
        TheoremId::T31,
        TheoremId::T32,
        TheoremId::T41,
        TheoremId::T42,
        TheoremId::T43,
        TheoremId::T44,
        TheoremId::P51,
        TheoremId::P52,
    ];

    pub const INTEGRAL: [TheoremId; 2] = [TheoremId::P61, TheoremId::P62];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Dm => "DM",
            TheoremId::DmOrtho => "DM_ORTHO",
            TheoremId::T21 => "T2.1",
            TheoremId::T22 => "T2.2",
            TheoremId::T23 => "T2.3",
            TheoremId::T23Additive => "T2.3-additive",
            TheoremId::T24 => "T2.4",
            TheoremId::T31 => "T3.1",
            TheoremId::T32 => "T3.2",
            TheoremId::T41 => "T4.1",
            TheoremId::T42 => "T4.2",
            TheoremId::T43 => "T4.3",
            TheoremId::T44 => "T4.4",
            TheoremId::P51 => "P5.1",
            TheoremId::P52 => "P5.2",
            TheoremId::P61 => "P6.1",
            TheoremId::P62 => "P6.2",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    /// Case-insensitive; accepts `t2.1`, `T2.1`, `dm_ortho`, `dm-ortho`, ...
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        let all = TheoremId::CAMPAIGN
            .iter()
            .chain(&TheoremId::INTEGRAL)
            .chain(&[TheoremId::T23Additive]);
        all.copied()
            .find(|t| t.as_str().to_ascii_uppercase().replace('-', "_") == key)
            .ok_or_else(|| Error::Parse(format!("unknown theorem `{s}`")))
    }
}

/// Parameters of the multiplicative reverses `c * sum ||x_i|| <= ||sum x_i||`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem")]
pub enum MultiplicativeParams {
    #[serde(rename = "DM")]
    Dm { r: f64 },
    #[serde(rename = "DM_ORTHO")]
    DmOrtho { r: Vec<f64> },
    #[serde(rename = "T2.1")]
    T21 { rho: f64 },
    #[serde(rename = "T2.2")]
    T22 { rho: Vec<f64> },
    #[serde(rename = "T2.3")]
    T23 { m: f64, big_m: f64 },
    /// Per-axis `(mu_k, M_k)`.
    #[serde(rename = "T2.4")]
    T24 { axes: Vec<(f64, f64)> },
}

impl MultiplicativeParams {
    pub fn theorem(&self) -> TheoremId {
        match self {
            MultiplicativeParams::Dm { .. } => TheoremId::Dm,
            MultiplicativeParams::DmOrtho { .. } => TheoremId::DmOrtho,
            MultiplicativeParams::T21 { .. } => TheoremId::T21,
            MultiplicativeParams::T22 { .. } => TheoremId::T22,
            MultiplicativeParams::T23 { .. } => TheoremId::T23,
            MultiplicativeParams::T24 { .. } => TheoremId::T24,
        }
    }
}

fn check_unit_radius(rho: f64, name: &str) -> Result<()> {
    if rho.is_finite() && rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must lie in (0,1), got {rho}"
        )))
    }
}

fn check_ratio(r: f64, name: &str) -> Result<()> {
    if r.is_finite() && (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must lie in [0,1], got {r}"
        )))
    }
}

/// `2 sqrt(mM) / (m + M)`
pub fn bracket_constant(m: f64, big_m: f64) -> f64 {
    2.0 * (m * big_m).sqrt() / (m + big_m)
}

/// `sqrt(1 - rho^2)`
pub fn ball_constant(rho: f64) -> f64 {
    (1.0 - rho * rho).sqrt()
}

/// Closed-form constant `c` of a multiplicative reverse.
///
/// For T2.2 the constant is `(m - sum rho_k^2)^(1/2)`, which does not exist
/// when the radicand is not positive; that case is reported as
/// [`Error::VacuousBound`].
pub fn multiplicative_constant(params: &MultiplicativeParams) -> Result<f64> {
    match params {
        MultiplicativeParams::Dm { r } => {
            check_ratio(*r, "r")?;
            Ok(*r)
        }
        MultiplicativeParams::DmOrtho { r } => {
            if r.is_empty() {
                return Err(Error::Parameter("DM_ORTHO needs at least one r_k".into()));
            }
            for (k, &rk) in r.iter().enumerate() {
                check_ratio(rk, &format!("r_{k}"))?;
            }
            Ok(r.iter().map(|rk| rk * rk).sum::<f64>().sqrt())
        }
        MultiplicativeParams::T21 { rho } => {
            check_unit_radius(*rho, "rho")?;
            Ok(ball_constant(*rho))
        }
        MultiplicativeParams::T22 { rho } => {
            if rho.is_empty() {
                return Err(Error::Parameter("T2.2 needs at least one rho_k".into()));
            }
            for (k, &r) in rho.iter().enumerate() {
                check_unit_radius(r, &format!("rho_{k}"))?;
            }
            let radicand = rho.len() as f64 - rho.iter().map(|r| r * r).sum::<f64>();
            if radicand <= 0.0 {
                return Err(Error::VacuousBound(format!(
                    "m - sum(rho_k^2) = {radicand} <= 0: hypothesis region empty or bound vacuous"
                )));
            }
            Ok(radicand.sqrt())
        }
        MultiplicativeParams::T23 { m, big_m } => {
            check_bracket_params(*m, *big_m)?;
            Ok(bracket_constant(*m, *big_m))
        }
        MultiplicativeParams::T24 { axes } => {
            if axes.is_empty() {
                return Err(Error::Parameter("T2.4 needs at least one axis".into()));
            }
            let mut acc = 0.0;
            for &(mu, big_m) in axes {
                check_bracket_params(mu, big_m)?;
                acc += mu * big_m / ((mu + big_m) * (mu + big_m));
            }
            Ok(2.0 * acc.sqrt())
        }
    }
}

/// `c * sum ||x_i|| <= ||sum x_i||` evaluated on one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativeCertificate {
    pub theorem_id: TheoremId,
    pub constant: f64,
    pub sum_norms: f64,
    pub norm_sum: f64,
    pub slack: f64,
    pub holds: bool,
    /// `norm_sum / (constant * sum_norms)`; omitted when the denominator is
    /// below the absolute tolerance.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tightness: Option<f64>,
}

impl MultiplicativeCertificate {
    pub fn lhs(&self) -> f64 {
        self.constant * self.sum_norms
    }

    pub fn rhs(&self) -> f64 {
        self.norm_sum
    }
}

fn sum_norms_and_norm_sum(xs: &[Vector]) -> Result<(f64, f64)> {
    let total = space::sum(xs)?;
    Ok((xs.iter().map(Vector::norm).sum(), total.norm()))
}

/// Checks `constant * sum ||x_i|| <= ||sum x_i||`.
pub fn certify_multiplicative(
    xs: &[Vector],
    constant: f64,
    theorem_id: TheoremId,
    tol: &Tolerances,
) -> Result<MultiplicativeCertificate> {
    if !(constant.is_finite() && constant >= 0.0 && constant <= 1.0 + tol.allowance(1.0)) {
        return Err(Error::Parameter(format!(
            "multiplicative constant must lie in [0, 1], got {constant}"
        )));
    }
    let (sum_norms, norm_sum) = sum_norms_and_norm_sum(xs)?;
    Ok(multiplicative_from_sides(
        theorem_id, constant, sum_norms, norm_sum, tol,
    ))
}

pub(crate) fn multiplicative_from_sides(
    theorem_id: TheoremId,
    constant: f64,
    sum_norms: f64,
    norm_sum: f64,
    tol: &Tolerances,
) -> MultiplicativeCertificate {
    let lhs = constant * sum_norms;
    let slack = norm_sum - lhs;
    MultiplicativeCertificate {
        theorem_id,
        constant,
        sum_norms,
        norm_sum,
        slack,
        holds: slack >= -tol.allowance(lhs.max(norm_sum)),
        tightness: (lhs > tol.abs).then(|| norm_sum / lhs),
    }
}

/// Parameters of the additive reverses `sum ||x_i|| - ||sum x_i|| <= K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem")]
pub enum AdditiveParams {
    /// `K = sum k_i`
    #[serde(rename = "T3.1")]
    T31 { k: Vec<f64> },
    /// `K = rho^2 / (sqrt(1-rho^2)(1+sqrt(1-rho^2))) Re<sum x_i, e>`
    #[serde(rename = "T4.1")]
    T41 { rho: f64, e: Vector },
    /// `K = (sqrt M - sqrt m)^2 / (2 sqrt(mM)) Re<sum x_i, e>`
    #[serde(rename = "T4.2")]
    T42 { m: f64, big_m: f64, e: Vector },
    /// `K = 1/2 sum r_i^2`
    #[serde(rename = "T4.3")]
    T43 { r: Vec<f64> },
    /// `K = 1/4 sum (M_i - m_i)^2 / (M_i + m_i)`
    #[serde(rename = "T4.4")]
    T44 { brackets: Vec<(f64, f64)> },
    /// `K = (sqrt M - sqrt m)^2 / (2 sqrt(mM)) ||sum x_i||`
    #[serde(rename = "T2.3-additive")]
    T23Additive { m: f64, big_m: f64 },
}

impl AdditiveParams {
    pub fn theorem(&self) -> TheoremId {
        match self {
            AdditiveParams::T31 { .. } => TheoremId::T31,
            AdditiveParams::T41 { .. } => TheoremId::T41,
            AdditiveParams::T42 { .. } => TheoremId::T42,
            AdditiveParams::T43 { .. } => TheoremId::T43,
            AdditiveParams::T44 { .. } => TheoremId::T44,
            AdditiveParams::T23Additive { .. } => TheoremId::T23Additive,
        }
    }
}

/// `rho^2 / (sqrt(1-rho^2) (1 + sqrt(1-rho^2)))`, equal to `1/sqrt(1-rho^2) - 1`.
pub fn ball_additive_factor(rho: f64) -> f64 {
    let s = ball_constant(rho);
    rho * rho / (s * (1.0 + s))
}

/// `(sqrt M - sqrt m)^2 / (2 sqrt(mM))`, equal to `(m + M)/(2 sqrt(mM)) - 1`.
pub fn bracket_additive_factor(m: f64, big_m: f64) -> f64 {
    let d = big_m.sqrt() - m.sqrt();
    d * d / (2.0 * (m * big_m).sqrt())
}

/// An additive bound together with its instance-free majorant, when one exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdditiveBound {
    pub bound: f64,
    /// `factor * ||sum x_i||` for the bounds stated through `Re<sum x_i, e>`.
    pub majorant: Option<f64>,
}

/// Evaluates the additive bound `K` for `xs`.
pub fn additive_bound(
    params: &AdditiveParams,
    xs: &[Vector],
    tol: &Tolerances,
) -> Result<AdditiveBound> {
    let per_vector_len = |len: usize, what: &str| -> Result<()> {
        if len == xs.len() {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "{len} {what} given for {} vectors",
                xs.len()
            )))
        }
    };
    match params {
        AdditiveParams::T31 { k } => {
            per_vector_len(k.len(), "slacks")?;
            if let Some((i, ki)) = k
                .iter()
                .enumerate()
                .find(|(_, ki)| !(ki.is_finite() && **ki >= -tol.abs))
            {
                return Err(Error::Parameter(format!("k_{i} must be >= 0, got {ki}")));
            }
            Ok(AdditiveBound {
                bound: k.iter().sum(),
                majorant: None,
            })
        }
        AdditiveParams::T41 { rho, e } => {
            check_unit_radius(*rho, "rho")?;
            let factor = ball_additive_factor(*rho);
            instance_bound(factor, xs, e, tol)
        }
        AdditiveParams::T42 { m, big_m, e } => {
            check_bracket_params(*m, *big_m)?;
            let factor = bracket_additive_factor(*m, *big_m);
            instance_bound(factor, xs, e, tol)
        }
        AdditiveParams::T43 { r } => {
            per_vector_len(r.len(), "radii")?;
            if let Some((i, ri)) = r
                .iter()
                .enumerate()
                .find(|(_, ri)| !(ri.is_finite() && **ri > 0.0))
            {
                return Err(Error::Parameter(format!("r_{i} must be > 0, got {ri}")));
            }
            Ok(AdditiveBound {
                bound: 0.5 * r.iter().map(|ri| ri * ri).sum::<f64>(),
                majorant: None,
            })
        }
        AdditiveParams::T44 { brackets } => {
            per_vector_len(brackets.len(), "brackets")?;
            let mut acc = 0.0;
            for &(m, big_m) in brackets {
                check_bracket_params(m, big_m)?;
                acc += (big_m - m) * (big_m - m) / (big_m + m);
            }
            Ok(AdditiveBound {
                bound: 0.25 * acc,
                majorant: None,
            })
        }
        AdditiveParams::T23Additive { m, big_m } => {
            check_bracket_params(*m, *big_m)?;
            let norm_sum = space::sum(xs)?.norm();
            Ok(AdditiveBound {
                bound: bracket_additive_factor(*m, *big_m) * norm_sum,
                majorant: None,
            })
        }
    }
}

fn instance_bound(
    factor: f64,
    xs: &[Vector],
    e: &Vector,
    tol: &Tolerances,
) -> Result<AdditiveBound> {
    check_uniform(xs, e)?;
    require_unit(e, "e", tol)?;
    let total = space::sum(xs)?;
    Ok(AdditiveBound {
        bound: factor * total.re_inner_unchecked(e),
        majorant: Some(factor * total.norm()),
    })
}

/// `(0 <=) sum ||x_i|| - ||sum x_i|| <= K` evaluated on one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveCertificate {
    pub theorem_id: TheoremId,
    pub bound: f64,
    pub sum_norms: f64,
    pub norm_sum: f64,
    /// `sum ||x_i|| - ||sum x_i||`
    pub gap: f64,
    pub slack: f64,
    pub holds: bool,
    /// `gap >= -tol`, the triangle inequality itself.
    pub gap_nonnegative: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub majorant: Option<f64>,
    /// `bound <= majorant + tol` when a majorant is present.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub majorant_consistent: Option<bool>,
    /// `bound / gap`; omitted when the gap is below the absolute tolerance.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tightness: Option<f64>,
}

/// Checks `sum ||x_i|| - ||sum x_i|| <= K`.
pub fn certify_additive(
    xs: &[Vector],
    bound: AdditiveBound,
    theorem_id: TheoremId,
    tol: &Tolerances,
) -> Result<AdditiveCertificate> {
    if !(bound.bound.is_finite() && bound.bound >= -tol.allowance(bound.bound)) {
        return Err(Error::Parameter(format!(
            "additive bound must be >= 0, got {}",
            bound.bound
        )));
    }
    let (sum_norms, norm_sum) = sum_norms_and_norm_sum(xs)?;
    Ok(additive_from_sides(
        theorem_id, bound, sum_norms, norm_sum, tol,
    ))
}

pub(crate) fn additive_from_sides(
    theorem_id: TheoremId,
    bound: AdditiveBound,
    sum_norms: f64,
    norm_sum: f64,
    tol: &Tolerances,
) -> AdditiveCertificate {
    let gap = sum_norms - norm_sum;
    // the gap is a difference of two quantities of size sum_norms
    let slack = bound.bound - gap;
    AdditiveCertificate {
        theorem_id,
        bound: bound.bound,
        sum_norms,
        norm_sum,
        gap,
        slack,
        holds: slack >= -tol.allowance(sum_norms.max(bound.bound)),
        gap_nonnegative: gap >= -tol.allowance(sum_norms),
        majorant: bound.majorant,
        majorant_consistent: bound
            .majorant
            .map(|maj| bound.bound <= maj + tol.allowance(maj)),
        tightness: (gap > tol.abs).then(|| bound.bound / gap),
    }
}

/// `sum ||x_i|| <= (1/sqrt m) ||sum x_i|| + (1/m) sum_ik M_ik`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedCertificate {
    pub theorem_id: TheoremId,
    pub family_size: usize,
    /// `1 / sqrt(m)`
    pub coefficient: f64,
    /// `(1/m) sum_ik M_ik`
    pub additive_term: f64,
    /// Left side `sum ||x_i||`.
    pub sum_norms: f64,
    pub norm_sum: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    /// `rhs / sum_norms`; omitted when `sum_norms` is below the absolute tolerance.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tightness: Option<f64>,
}

pub fn certify_mixed(
    xs: &[Vector],
    family: &OrthonormalFamily,
    slack_matrix: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<MixedCertificate> {
    check_uniform(xs, &family.members()[0])?;
    let m = family.size();
    if slack_matrix.len() != xs.len() || slack_matrix.iter().any(|row| row.len() != m) {
        return Err(Error::Usage(format!(
            "slack matrix must be {} x {m}",
            xs.len()
        )));
    }
    let (sum_norms, norm_sum) = sum_norms_and_norm_sum(xs)?;
    let total: f64 = slack_matrix.iter().flatten().sum();
    Ok(mixed_from_sides(m, total, sum_norms, norm_sum, tol))
}

pub(crate) fn mixed_from_sides(
    family_size: usize,
    slack_total: f64,
    sum_norms: f64,
    norm_sum: f64,
    tol: &Tolerances,
) -> MixedCertificate {
    let m = family_size as f64;
    let coefficient = 1.0 / m.sqrt();
    let additive_term = slack_total / m;
    let rhs = coefficient * norm_sum + additive_term;
    let slack = rhs - sum_norms;
    MixedCertificate {
        theorem_id: TheoremId::T32,
        family_size,
        coefficient,
        additive_term,
        sum_norms,
        norm_sum,
        rhs,
        slack,
        holds: slack >= -tol.allowance(rhs.max(sum_norms)),
        tightness: (sum_norms > tol.abs).then(|| rhs / sum_norms),
    }
}

/// Hypothesis of a reverse Schwarz inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem")]
pub enum SchwarzKind {
    /// `x, y` in the closed ball `D(a, r)`, bound `r^2 / 2`.
    #[serde(rename = "P5.1")]
    Ball { r: f64 },
    /// `x, y` in the bracket `(m, M)` around `a`, bound `((M-m)/(M+m))^2 / 2`.
    #[serde(rename = "P5.2")]
    Bracket { m: f64, big_m: f64 },
}

impl SchwarzKind {
    pub fn theorem(&self) -> TheoremId {
        match self {
            SchwarzKind::Ball { .. } => TheoremId::P51,
            SchwarzKind::Bracket { .. } => TheoremId::P52,
        }
    }

    pub fn bound(&self) -> Result<f64> {
        match *self {
            SchwarzKind::Ball { r } => {
                check_unit_radius(r, "r")?;
                Ok(0.5 * r * r)
            }
            SchwarzKind::Bracket { m, big_m } => {
                check_bracket_params(m, big_m)?;
                let q = (big_m - m) / (big_m + m);
                Ok(0.5 * q * q)
            }
        }
    }
}

/// `(||x|| ||y|| - Re<x,y>) / (||x|| + ||y||)^2 <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwarzCertificate {
    pub theorem_id: TheoremId,
    pub lhs: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
    /// `lhs >= -tol`, the Schwarz inequality itself.
    pub lhs_nonnegative: bool,
    /// `bound / lhs`; omitted when `lhs` is below the absolute tolerance.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tightness: Option<f64>,
}

/// `(||x|| ||y|| - Re<x,y>) / (||x|| + ||y||)^2`.
pub fn schwarz_ratio(x: &Vector, y: &Vector) -> Result<f64> {
    x.check_compatible(y)?;
    let (nx, ny) = (x.norm(), y.norm());
    let denom = (nx + ny) * (nx + ny);
    if denom == 0.0 {
        return Err(Error::Usage(
            "||x|| + ||y|| = 0: the Schwarz ratio is undefined".into(),
        ));
    }
    if nx == 0.0 || ny == 0.0 {
        return Ok(0.0);
    }
    // ||x|| ||y|| - Re<x, y> = (||x|| ||y|| / 2) ||x/||x|| - y/||y||||^2, which
    // avoids cancelling two nearly equal terms when x and y are close
    let mut d = x.scale_real(1.0 / nx);
    d.add_scaled(-1.0 / ny, y);
    Ok(nx * ny * d.norm_sqr() / (2.0 * denom))
}

pub fn schwarz_certificate(
    x: &Vector,
    y: &Vector,
    kind: SchwarzKind,
    tol: &Tolerances,
) -> Result<SchwarzCertificate> {
    let bound = kind.bound()?;
    let lhs = schwarz_ratio(x, y)?;
    Ok(schwarz_from_sides(kind.theorem(), lhs, bound, tol))
}

pub(crate) fn schwarz_from_sides(
    theorem_id: TheoremId,
    lhs: f64,
    bound: f64,
    tol: &Tolerances,
) -> SchwarzCertificate {
    let slack = bound - lhs;
    // the ratio is O(1) and its numerator cancels terms of size ||x|| ||y||
    SchwarzCertificate {
        theorem_id,
        lhs,
        bound,
        slack,
        holds: slack >= -tol.allowance(1.0),
        lhs_nonnegative: lhs >= -tol.allowance(1.0),
        tightness: (lhs > tol.abs).then(|| bound / lhs),
    }
}

/// `p/alpha + q alpha - 2 sqrt(pq)`, computed as `(sqrt(p/alpha) - sqrt(q alpha))^2`.
pub fn am_gm_gap(p: f64, q: f64, alpha: f64) -> Result<f64> {
    if !(p.is_finite() && q.is_finite() && p >= 0.0 && q >= 0.0) {
        return Err(Error::Parameter(format!(
            "p and q must be finite and >= 0, got p = {p}, q = {q}"
        )));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha must be > 0, got {alpha}")));
    }
    let d = (p / alpha).sqrt() - (q * alpha).sqrt();
    Ok(d * d)
}

/// Any of the certificate shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Multiplicative(MultiplicativeCertificate),
    Additive(AdditiveCertificate),
    Mixed(MixedCertificate),
    Schwarz(SchwarzCertificate),
}

impl Certificate {
    pub fn theorem_id(&self) -> TheoremId {
        match self {
            Certificate::Multiplicative(c) => c.theorem_id,
            Certificate::Additive(c) => c.theorem_id,
            Certificate::Mixed(c) => c.theorem_id,
            Certificate::Schwarz(c) => c.theorem_id,
        }
    }

    pub fn slack(&self) -> f64 {
        match self {
            Certificate::Multiplicative(c) => c.slack,
            Certificate::Additive(c) => c.slack,
            Certificate::Mixed(c) => c.slack,
            Certificate::Schwarz(c) => c.slack,
        }
    }

    pub fn holds(&self) -> bool {
        match self {
            Certificate::Multiplicative(c) => c.holds,
            Certificate::Additive(c) => c.holds && c.gap_nonnegative,
            Certificate::Mixed(c) => c.holds,
            Certificate::Schwarz(c) => c.holds && c.lhs_nonnegative,
        }
    }

    pub fn tightness(&self) -> Option<f64> {
        match self {
            Certificate::Multiplicative(c) => c.tightness,
            Certificate::Additive(c) => c.tightness,
            Certificate::Mixed(c) => c.tightness,
            Certificate::Schwarz(c) => c.tightness,
        }
    }

    /// Magnitude of the two sides, used to express slack relatively.
    pub fn scale(&self) -> f64 {
        match self {
            Certificate::Multiplicative(c) => c.lhs().max(c.norm_sum),
            Certificate::Additive(c) => c.sum_norms.max(c.bound),
            Certificate::Mixed(c) => c.rhs.max(c.sum_norms),
            Certificate::Schwarz(_) => 1.0,
        }
    }

    /// `slack / max(scale, abs)`.
    pub fn relative_slack(&self, tol: &Tolerances) -> f64 {
        self.slack() / self.scale().max(tol.abs.max(f64::MIN_POSITIVE))
    }
}
