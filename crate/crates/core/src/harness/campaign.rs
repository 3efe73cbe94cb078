//! Campaign configuration, execution and the JSON report.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{derive_stream, int_in};
use super::sample::{sample_instance, SampleSpec};
use crate::bounds::{Certificate, TheoremId};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::space::{Field, Tolerances};

/// Every `WITNESS_STRIDE`-th sample is an equality witness, so that a bound
/// tightened by even a tiny amount is caught.
pub const WITNESS_STRIDE: u64 = 8;

/// Violations kept in full in the report, per theorem.
pub const MAX_VIOLATION_DUMPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldChoice {
    Real,
    Complex,
    /// Alternate by sample index: even real, odd complex.
    Both,
}

impl FieldChoice {
    pub fn for_sample(self, index: u64) -> Field {
        match self {
            FieldChoice::Real => Field::Real,
            FieldChoice::Complex => Field::Complex,
            FieldChoice::Both if index.is_multiple_of(2) => Field::Real,
            FieldChoice::Both => Field::Complex,
        }
    }
}

impl std::str::FromStr for FieldChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "real" => Ok(FieldChoice::Real),
            "complex" => Ok(FieldChoice::Complex),
            "both" => Ok(FieldChoice::Both),
            _ => Err(Error::Parse(format!(
                "unknown field `{s}` (expected real, complex or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub theorems: Vec<TheoremId>,
    pub samples: u64,
    pub seed: u64,
    /// Inclusive dimension range.
    pub dim: (usize, usize),
    /// Inclusive range for the number of vectors per instance.
    pub n: (usize, usize),
    pub field: FieldChoice,
    /// Radius / ratio range; equal endpoints fix the value.
    pub rho: (f64, f64),
    /// Fixed `(m, M)`; `None` draws one per sample.
    pub bracket: Option<(f64, f64)>,
    /// Inclusive range for orthonormal family sizes.
    pub family_size: (usize, usize),
    pub tolerances: Tolerances,
    /// Test hook: tightens every bound by this amount.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fault_delta: Option<f64>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            theorems: TheoremId::CAMPAIGN.to_vec(),
            samples: 1000,
            seed: 0,
            dim: (1, 16),
            n: (1, 8),
            field: FieldChoice::Both,
            rho: (0.05, 0.95),
            bracket: None,
            family_size: (1, 4),
            tolerances: Tolerances::default(),
            fault_delta: None,
        }
    }
}

fn check_range(name: &str, (lo, hi): (usize, usize)) -> Result<()> {
    if lo >= 1 && lo <= hi {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} range {lo}:{hi} must satisfy 1 <= lo <= hi"
        )))
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Parameter("samples must be >= 1".into()));
        }
        check_range("dim", self.dim)?;
        check_range("n", self.n)?;
        check_range("family size", self.family_size)?;
        let (lo, hi) = self.rho;
        if !(lo > 0.0 && hi < 1.0 && lo <= hi) {
            return Err(Error::Parameter(format!(
                "rho range {lo}:{hi} must lie inside (0, 1)"
            )));
        }
        if let Some((m, big_m)) = self.bracket {
            crate::conditions::check_bracket_params(m, big_m)?;
        }
        if let Some(t) = self
            .theorems
            .iter()
            .find(|t| TheoremId::INTEGRAL.contains(t))
        {
            return Err(Error::Usage(format!(
                "{t} is checked by the integral command, not a vector campaign"
            )));
        }
        if let Some(d) = self.fault_delta {
            if !d.is_finite() {
                return Err(Error::Parameter(format!(
                    "fault delta must be finite, got {d}"
                )));
            }
        }
        Ok(())
    }
}

/// A sample whose certificate failed although its hypothesis held, or whose
/// evaluation errored unexpectedly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationDetail {
    pub sample: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub instance: Option<Instance>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremResult {
    pub theorem_id: TheoremId,
    pub samples: u64,
    pub violations: u64,
    /// Smallest relative slack over feasible samples.
    pub min_slack: Option<f64>,
    pub mean_slack: Option<f64>,
    pub max_tightness: Option<f64>,
    pub near_boundary: u64,
    pub infeasible: u64,
    /// Samples whose generated instance failed its own hypothesis; always 0
    /// for a correct sampler.
    pub hypothesis_failures: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub violation_details: Vec<ViolationDetail>,
}

/// Extra pass/fail checks attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: serde_json::Value,
    pub seed: u64,
    pub results: Vec<TheoremResult>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub checks: Vec<NamedCheck>,
}

impl CampaignReport {
    pub fn total_violations(&self) -> u64 {
        self.results.iter().map(|r| r.violations).sum()
    }

    pub fn total_infeasible(&self) -> u64 {
        self.results.iter().map(|r| r.infeasible).sum()
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &NamedCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per theorem.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "theorem_id",
            "samples",
            "violations",
            "min_slack",
            "mean_slack",
            "max_tightness",
            "near_boundary",
            "infeasible",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.results {
            w.write_record([
                r.theorem_id.to_string(),
                r.samples.to_string(),
                r.violations.to_string(),
                opt(r.min_slack),
                opt(r.mean_slack),
                opt(r.max_tightness),
                r.near_boundary.to_string(),
                r.infeasible.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// What happened to one sample.
#[derive(Debug, Clone)]
pub(crate) enum Outcome {
    Infeasible,
    HypothesisFailed,
    Checked {
        relative_slack: f64,
        tightness: Option<f64>,
        near_boundary: bool,
        violation: Option<Box<ViolationDetail>>,
    },
}

/// Folds outcomes in sample order into a result row.
#[derive(Debug)]
pub(crate) struct Accumulator {
    result: TheoremResult,
    slack_sum: f64,
    checked: u64,
}

impl Accumulator {
    pub(crate) fn new(theorem_id: TheoremId) -> Self {
        Accumulator {
            result: TheoremResult {
                theorem_id,
                samples: 0,
                violations: 0,
                min_slack: None,
                mean_slack: None,
                max_tightness: None,
                near_boundary: 0,
                infeasible: 0,
                hypothesis_failures: 0,
                violation_details: Vec::new(),
            },
            slack_sum: 0.0,
            checked: 0,
        }
    }

    pub(crate) fn add(&mut self, outcome: Outcome) {
        let r = &mut self.result;
        r.samples += 1;
        match outcome {
            Outcome::Infeasible => r.infeasible += 1,
            Outcome::HypothesisFailed => r.hypothesis_failures += 1,
            Outcome::Checked {
                relative_slack,
                tightness,
                near_boundary,
                violation,
            } => {
                self.checked += 1;
                self.slack_sum += relative_slack;
                r.min_slack = Some(
                    r.min_slack
                        .map_or(relative_slack, |m| m.min(relative_slack)),
                );
                if let Some(t) = tightness {
                    r.max_tightness = Some(r.max_tightness.map_or(t, |m| m.max(t)));
                }
                r.near_boundary += near_boundary as u64;
                if let Some(v) = violation {
                    r.violations += 1;
                    if r.violation_details.len() < MAX_VIOLATION_DUMPS {
                        r.violation_details.push(*v);
                    }
                }
            }
        }
    }

    pub(crate) fn finish(mut self) -> TheoremResult {
        if self.checked > 0 {
            self.result.mean_slack = Some(self.slack_sum / self.checked as f64);
        }
        self.result
    }
}

fn run_sample(config: &CampaignConfig, theorem: TheoremId, index: u64) -> Outcome {
    let field = config.field.for_sample(index);
    let mut rng = derive_stream(
        config.seed,
        &[
            theorem.as_str().into(),
            field.to_string().as_str().into(),
            index.into(),
        ],
    );
    let spec = SampleSpec {
        theorem,
        field,
        dim: int_in(&mut rng, config.dim),
        n: int_in(&mut rng, config.n),
        family_size: config.family_size,
        rho: config.rho,
        bracket: config.bracket,
        witness: index % WITNESS_STRIDE == WITNESS_STRIDE - 1,
    };
    let tol = &config.tolerances;
    let evaluated = sample_instance(&spec, &mut rng)
        .and_then(|inst| Ok((inst.evaluate_with_fault(tol, config.fault_delta)?, inst)));
    match evaluated {
        Err(Error::Infeasible(_) | Error::VacuousBound(_)) => Outcome::Infeasible,
        // an instance the toolkit cannot evaluate is a defect, not a pass
        Err(e) => Outcome::Checked {
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
        Ok((ev, _)) if !ev.hypothesis.overall => Outcome::HypothesisFailed,
        Ok((ev, inst)) => {
            let holds = ev.certificate.holds();
            Outcome::Checked {
                relative_slack: ev.certificate.relative_slack(tol),
                tightness: ev.certificate.tightness(),
                near_boundary: ev.hypothesis.near_boundary,
                violation: (!holds).then(|| {
                    Box::new(ViolationDetail {
                        sample: index,
                        instance: Some(inst),
                        certificate: Some(ev.certificate),
                        error: None,
                    })
                }),
            }
        }
    }
}

/// Runs every sample of every configured theorem. Samples run in parallel;
/// outcomes are folded in sample order, so the report depends only on the
/// configuration.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let results = config
        .theorems
        .iter()
        .map(|&theorem| {
            let outcomes: Vec<Outcome> = (0..config.samples)
                .into_par_iter()
                .map(|i| run_sample(config, theorem, i))
                .collect();
            let mut acc = Accumulator::new(theorem);
            outcomes.into_iter().for_each(|o| acc.add(o));
            acc.finish()
        })
        .collect();
    Ok(CampaignReport {
        config: serde_json::to_value(config).expect("config serializes"),
        seed: config.seed,
        results,
        checks: Vec::new(),
    })
}
