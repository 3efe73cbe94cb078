//! Random campaigns for the integral reverses, with polynomial node functions.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::campaign::{
    Accumulator, CampaignReport, FieldChoice, NamedCheck, Outcome, ViolationDetail, WITNESS_STRIDE,
};
use super::rng::{derive_stream, gaussian_vector, int_in, log_uniform, random_unit, uniform};
use crate::bounds::{self, Certificate, TheoremId};
use crate::error::{Error, Result};
use crate::function_space::{
    certify_integral_unchecked, check_integral_hypothesis, eta_norm, fold_weights,
    gauss_legendre_rule, validate_weight, weighted_inner, IntegralKind, QuadratureRule,
    SampledFunction, WeightFunction,
};
use crate::space::{Field, Tolerances, Vector};
use crate::witnesses;

/// Maximum polynomial degree of generated functions.
pub const MAX_DEGREE: usize = 5;

/// Threshold for the node-doubling, embedding and folding checks.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightChoice {
    /// `eta = 1` on `[0, 1]`.
    Uniform,
    /// `eta = 2t` on `[0, 1]`.
    Linear,
    /// Alternate between the two by sample index.
    Mixed,
}

impl std::str::FromStr for WeightChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(WeightChoice::Uniform),
            "linear" => Ok(WeightChoice::Linear),
            "mixed" => Ok(WeightChoice::Mixed),
            _ => Err(Error::Parse(format!(
                "unknown weight `{s}` (expected uniform, linear or mixed)"
            ))),
        }
    }
}

impl WeightChoice {
    fn for_sample(self, index: u64) -> WeightFunction {
        let linear = match self {
            WeightChoice::Uniform => false,
            WeightChoice::Linear => true,
            WeightChoice::Mixed => (index / 2) % 2 == 1,
        };
        if linear {
            WeightFunction::polynomial(vec![0.0, 2.0])
        } else {
            WeightFunction::uniform(0.0, 1.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralConfig {
    pub theorems: Vec<TheoremId>,
    pub samples: u64,
    pub seed: u64,
    pub dim: (usize, usize),
    pub n: (usize, usize),
    pub field: FieldChoice,
    pub rho: (f64, f64),
    pub bracket: Option<(f64, f64)>,
    /// Quadrature size.
    pub nodes: usize,
    pub weight: WeightChoice,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fault_delta: Option<f64>,
}

impl Default for IntegralConfig {
    fn default() -> Self {
        IntegralConfig {
            theorems: TheoremId::INTEGRAL.to_vec(),
            samples: 1000,
            seed: 0,
            dim: (1, 4),
            n: (1, 4),
            field: FieldChoice::Both,
            rho: (0.05, 0.95),
            bracket: None,
            nodes: 64,
            weight: WeightChoice::Mixed,
            tolerances: Tolerances::default(),
            fault_delta: None,
        }
    }
}

impl IntegralConfig {
    pub fn validate(&self) -> Result<()> {
        let as_campaign = super::campaign::CampaignConfig {
            theorems: Vec::new(),
            samples: self.samples,
            seed: self.seed,
            dim: self.dim,
            n: self.n,
            field: self.field,
            rho: self.rho,
            bracket: self.bracket,
            family_size: (1, 1),
            tolerances: self.tolerances,
            fault_delta: self.fault_delta,
        };
        as_campaign.validate()?;
        if self.nodes == 0 {
            return Err(Error::Parameter("need at least one quadrature node".into()));
        }
        if let Some(t) = self
            .theorems
            .iter()
            .find(|t| !TheoremId::INTEGRAL.contains(t))
        {
            return Err(Error::Usage(format!("{t} is not an integral theorem")));
        }
        Ok(())
    }
}

/// `p(t) = sum_k c_k t^k` with vector coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorPolynomial {
    pub coeffs: Vec<Vector>,
}

impl VectorPolynomial {
    pub fn eval(&self, t: f64) -> Vector {
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.scale_real(t);
            acc.add_scaled(1.0, c);
        }
        acc
    }

    pub fn sample(&self, rule: &QuadratureRule) -> SampledFunction {
        SampledFunction::from_fn(rule, |t| self.eval(t)).expect("uniform coefficients")
    }

    fn map(&self, f: impl Fn(&Vector) -> Vector) -> VectorPolynomial {
        VectorPolynomial {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn scaled(&self, c: f64) -> VectorPolynomial {
        self.map(|v| v.scale_real(c))
    }

    fn plus(&self, other: &VectorPolynomial) -> VectorPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Vector::zeros(self.coeffs[0].field(), self.coeffs[0].dim());
        VectorPolynomial {
            coeffs: (0..len)
                .map(|k| {
                    let mut c = self.coeffs.get(k).cloned().unwrap_or_else(|| zero.clone());
                    if let Some(o) = other.coeffs.get(k) {
                        c.add_scaled(1.0, o);
                    }
                    c
                })
                .collect(),
        }
    }

    fn constant(v: &Vector) -> VectorPolynomial {
        VectorPolynomial {
            coeffs: vec![v.clone()],
        }
    }
}

fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, field: Field, dim: usize) -> VectorPolynomial {
    let degree = rng.random_range(0..=MAX_DEGREE);
    VectorPolynomial {
        coeffs: (0..=degree)
            .map(|_| gaussian_vector(rng, field, dim))
            .collect(),
    }
}

/// A square matrix of spectral norm at most one (Frobenius-normalized
/// Gaussian times a uniform factor).
fn random_contraction<R: Rng + ?Sized>(rng: &mut R, field: Field, dim: usize) -> Vec<Vector> {
    let rows: Vec<Vector> = (0..dim).map(|_| gaussian_vector(rng, field, dim)).collect();
    let frob = rows.iter().map(Vector::norm_sqr).sum::<f64>().sqrt();
    let c = uniform(rng, 0.0, 1.0) / frob;
    rows.iter().map(|r| r.scale_real(c)).collect()
}

fn apply(matrix: &[Vector], v: &Vector) -> Vector {
    let comps: Vec<Complex64> = matrix
        .iter()
        .map(|row| {
            row.components()
                .iter()
                .zip(v.components())
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();
    Vector::new(v.field(), comps).expect("finite")
}

/// One generated integral instance, kept as polynomials so it can be
/// resampled on any rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralInstance {
    pub kind: IntegralKind,
    pub g: VectorPolynomial,
    pub fs: Vec<VectorPolynomial>,
}

impl IntegralInstance {
    pub fn sample(&self, rule: &QuadratureRule) -> (SampledFunction, Vec<SampledFunction>) {
        (
            self.g.sample(rule),
            self.fs.iter().map(|f| f.sample(rule)).collect(),
        )
    }
}

#[allow(clippy::too_many_arguments)]
fn sample_integral<R: Rng + ?Sized>(
    rng: &mut R,
    theorem: TheoremId,
    field: Field,
    dim: usize,
    n: usize,
    config: &IntegralConfig,
    eta: &WeightFunction,
    rule: &QuadratureRule,
    witness: bool,
) -> Result<IntegralInstance> {
    let kind = match theorem {
        TheoremId::P61 => IntegralKind::Ball {
            rho: uniform(rng, config.rho.0, config.rho.1),
        },
        _ => {
            let (m, big_m) = config.bracket.unwrap_or_else(|| {
                let m = log_uniform(rng, 0.1, 10.0);
                (m, m * (1.0 + log_uniform(rng, 0.01, 20.0)))
            });
            IntegralKind::Bracket { m, big_m }
        }
    };
    if witness && dim * field.real_multiplicity() >= 2 {
        // constant functions carrying a vector equality witness
        let a = random_unit(rng, field, dim);
        let u = super::rng::random_real_orthogonal_unit(rng, field, dim, std::slice::from_ref(&a))
            .expect("real dimension >= 2");
        let w = match kind {
            IntegralKind::Ball { rho } => witnesses::t21_equality_pair(&a, &u, rho)?,
            IntegralKind::Bracket { m, big_m } => witnesses::t23_equality_pair(&a, &u, m, big_m)?,
        };
        return Ok(IntegralInstance {
            kind,
            g: VectorPolynomial::constant(&a),
            fs: w.xs().iter().map(VectorPolynomial::constant).collect(),
        });
    }
    let raw = random_polynomial(rng, field, dim);
    let gn = eta_norm(&raw.sample(rule), eta, rule)?;
    if gn.is_nan() || gn <= 1e-8 {
        return Err(Error::Infeasible(
            "generated g vanishes at every node".into(),
        ));
    }
    let g = raw.scaled(1.0 / gn);
    let fs = (0..n)
        .map(|_| match kind {
            IntegralKind::Ball { rho } => {
                // f = g + rho u h / max_node ||h||
                let h = random_polynomial(rng, field, dim);
                let peak = h
                    .sample(rule)
                    .values()
                    .iter()
                    .fold(0.0f64, |acc, v| acc.max(v.norm()));
                let scale = if peak > 0.0 {
                    rho * uniform(rng, 0.0, 1.0) / peak
                } else {
                    0.0
                };
                Ok(g.plus(&h.scaled(scale)))
            }
            IntegralKind::Bracket { m, big_m } => {
                // f = c g + r L g with ||L|| <= 1 keeps ||f - c g|| <= r ||g||
                let l = random_contraction(rng, field, dim);
                let c = (m + big_m) / 2.0;
                let r = (big_m - m) / 2.0;
                Ok(g.scaled(c).plus(&g.map(|v| apply(&l, v)).scaled(r)))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntegralInstance { kind, g, fs })
}

/// Per-sample consistency measurements.
#[derive(Debug, Clone, Copy, Default)]
struct Deviations {
    node_doubling: f64,
    folding: f64,
    embedding: f64,
}

impl Deviations {
    fn max(self, o: Deviations) -> Deviations {
        Deviations {
            node_doubling: self.node_doubling.max(o.node_doubling),
            folding: self.folding.max(o.folding),
            embedding: self.embedding.max(o.embedding),
        }
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Node doubling on `<f_i, g>` and `<f_i, f_j>`; the folded-vector
/// certificate against the integral one.
fn consistency(
    inst: &IntegralInstance,
    eta: &WeightFunction,
    rule: &QuadratureRule,
    doubled: &QuadratureRule,
    cert: &Certificate,
    tol: &Tolerances,
) -> Result<Deviations> {
    let (g1, f1) = inst.sample(rule);
    let (g2, f2) = inst.sample(doubled);
    let mut node_doubling = 0.0f64;
    for (i, (a1, a2)) in f1.iter().zip(&f2).enumerate() {
        let d =
            (weighted_inner(a1, &g1, eta, rule)? - weighted_inner(a2, &g2, eta, doubled)?).norm();
        node_doubling = node_doubling.max(d);
        for (b1, b2) in f1.iter().zip(&f2).skip(i) {
            let d =
                (weighted_inner(a1, b1, eta, rule)? - weighted_inner(a2, b2, eta, doubled)?).norm();
            node_doubling = node_doubling.max(d);
        }
    }
    let folded = f1
        .iter()
        .map(|f| fold_weights(f, eta, rule))
        .collect::<Result<Vec<_>>>()?;
    let finite =
        bounds::certify_multiplicative(&folded, inst.kind.constant(), inst.kind.theorem(), tol)?;
    let Certificate::Multiplicative(c) = cert else {
        unreachable!("integral certificates are multiplicative")
    };
    let folding =
        relative_gap(finite.slack, c.slack).max(relative_gap(finite.constant, c.constant));
    Ok(Deviations {
        node_doubling,
        folding,
        embedding: 0.0,
    })
}

/// Constant functions `x_i` on a normalized weight reproduce the vector
/// certificate for `x_i` (with `g` the anchor).
fn embedding_deviation(
    inst: &IntegralInstance,
    eta: &WeightFunction,
    rule: &QuadratureRule,
    tol: &Tolerances,
) -> Result<f64> {
    if inst.fs.iter().any(|f| f.coeffs.len() != 1) || inst.g.coeffs.len() != 1 {
        return Ok(0.0);
    }
    let xs: Vec<Vector> = inst.fs.iter().map(|f| f.coeffs[0].clone()).collect();
    let theorem = match inst.kind {
        IntegralKind::Ball { .. } => TheoremId::T21,
        IntegralKind::Bracket { .. } => TheoremId::T23,
    };
    let finite = bounds::certify_multiplicative(&xs, inst.kind.constant(), theorem, tol)?;
    let integral =
        certify_integral_unchecked(&inst.kind, &inst.sample(rule).1, eta, rule, tol, 0.0)?;
    let Certificate::Multiplicative(c) = integral else {
        unreachable!()
    };
    Ok(relative_gap(finite.slack, c.slack).max(relative_gap(finite.lhs(), c.lhs())))
}

fn run_integral_sample(
    config: &IntegralConfig,
    theorem: TheoremId,
    index: u64,
    rule: &QuadratureRule,
    doubled: &QuadratureRule,
) -> (Outcome, Deviations) {
    let field = config.field.for_sample(index);
    let mut rng = derive_stream(
        config.seed,
        &[
            theorem.as_str().into(),
            field.to_string().as_str().into(),
            index.into(),
        ],
    );
    let dim = int_in(&mut rng, config.dim);
    let n = int_in(&mut rng, config.n);
    let eta = config.weight.for_sample(index);
    let tol = &config.tolerances;
    let witness = index % WITNESS_STRIDE == WITNESS_STRIDE - 1;
    let mut run = || -> Result<(Outcome, Deviations)> {
        let inst = sample_integral(
            &mut rng, theorem, field, dim, n, config, &eta, rule, witness,
        )?;
        let (g, fs) = inst.sample(rule);
        let report = check_integral_hypothesis(&fs, &g, &inst.kind, &eta, rule, tol)?;
        if !report.overall {
            return Ok((Outcome::HypothesisFailed, Deviations::default()));
        }
        let cert = certify_integral_unchecked(
            &inst.kind,
            &fs,
            &eta,
            rule,
            tol,
            config.fault_delta.unwrap_or(0.0),
        )?;
        let honest = certify_integral_unchecked(&inst.kind, &fs, &eta, rule, tol, 0.0)?;
        let mut dev = consistency(&inst, &eta, rule, doubled, &honest, tol)?;
        dev.embedding = embedding_deviation(&inst, &eta, rule, tol)?;
        let holds = cert.holds();
        let outcome = Outcome::Checked {
            relative_slack: cert.relative_slack(tol),
            tightness: cert.tightness(),
            near_boundary: report.near_boundary,
            violation: (!holds).then(|| {
                Box::new(ViolationDetail {
                    sample: index,
                    instance: None,
                    certificate: Some(cert.clone()),
                    error: Some(serde_json::to_string(&inst).expect("instance serializes")),
                })
            }),
        };
        Ok((outcome, dev))
    };
    match run() {
        Ok(r) => r,
        Err(Error::Infeasible(_)) => (Outcome::Infeasible, Deviations::default()),
        Err(e) => (
            Outcome::Checked {
                relative_slack: -1.0,
                tightness: None,
                near_boundary: false,
                violation: Some(Box::new(ViolationDetail {
                    sample: index,
                    instance: None,
                    certificate: None,
                    error: Some(e.to_string()),
                })),
            },
            Deviations::default(),
        ),
    }
}

/// Runs the integral campaign. The report carries three extra checks: the
/// largest change of any weighted inner product under node doubling, the
/// largest gap between folded-vector and integral certificates, and the
/// largest gap between constant-function and vector certificates.
pub fn run_integral_campaign(config: &IntegralConfig) -> Result<CampaignReport> {
    config.validate()?;
    let rule = gauss_legendre_rule(config.nodes, 0.0, 1.0)?;
    let doubled = gauss_legendre_rule(2 * config.nodes, 0.0, 1.0)?;
    for w in [WeightChoice::Uniform, WeightChoice::Linear] {
        let rep = validate_weight(&w.for_sample(0), &rule, &config.tolerances)?;
        debug_assert!(rep.normalized);
    }
    let mut worst = Deviations::default();
    let results = config
        .theorems
        .iter()
        .map(|&theorem| {
            let outcomes: Vec<(Outcome, Deviations)> = (0..config.samples)
                .into_par_iter()
                .map(|i| run_integral_sample(config, theorem, i, &rule, &doubled))
                .collect();
            let mut acc = Accumulator::new(theorem);
            for (o, d) in outcomes {
                worst = worst.max(d);
                acc.add(o);
            }
            acc.finish()
        })
        .collect();
    let check = |name: &str, value: f64| NamedCheck {
        name: name.to_string(),
        value,
        threshold: CONSISTENCY_TOLERANCE,
        pass: value < CONSISTENCY_TOLERANCE,
    };
    Ok(CampaignReport {
        config: serde_json::to_value(config).expect("config serializes"),
        seed: config.seed,
        results,
        checks: vec![
            check("node_doubling_max_change", worst.node_doubling),
            check("folded_certificate_max_gap", worst.folding),
            check("constant_embedding_max_gap", worst.embedding),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_eval_matches_horner() {
        let p = VectorPolynomial {
            coeffs: vec![
                Vector::real(&[1.0]).unwrap(),
                Vector::real(&[2.0]).unwrap(),
                Vector::real(&[3.0]).unwrap(),
            ],
        };
        assert_eq!(p.eval(2.0).components()[0].re, 1.0 + 4.0 + 12.0);
    }

    #[test]
    fn small_campaign_is_clean() {
        let config = IntegralConfig {
            samples: 64,
            seed: 5,
            ..IntegralConfig::default()
        };
        let report = run_integral_campaign(&config).unwrap();
        assert_eq!(report.total_violations(), 0);
        for r in &report.results {
            assert_eq!(r.hypothesis_failures, 0);
        }
        assert_eq!(report.failed_checks().count(), 0, "{:?}", report.checks);
    }

    #[test]
    fn fault_is_detected() {
        let config = IntegralConfig {
            samples: 32,
            seed: 5,
            fault_delta: Some(1e-3),
            ..IntegralConfig::default()
        };
        let report = run_integral_campaign(&config).unwrap();
        for r in &report.results {
            assert!(r.violations > 0, "{}", r.theorem_id);
        }
    }
}
