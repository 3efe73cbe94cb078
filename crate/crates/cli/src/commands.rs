use std::fs::File;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use revineq_core::bounds::TheoremId;
use revineq_core::error::{Error, Result};
use revineq_core::function_space::{
    check_integral_hypothesis, check_nodes_match, gauss_legendre_rule, integral_certificate,
    read_sampled_csv, validate_weight, IntegralKind, SampledFunction, WeightFunction,
};
use revineq_core::harness::{
    run_campaign, run_integral_campaign, CampaignConfig, CampaignReport, FieldChoice,
    IntegralConfig, WeightChoice, MAX_VIOLATION_DUMPS,
};
use revineq_core::space::{validate_orthonormal, Field, Tolerances, Vector};
use revineq_core::witnesses::{self, MultiAxisKind, Spread, WitnessInstance};

use crate::args::{
    Command, Format, IntegralArgs, ReportArgs, SamplingArgs, SharpnessArgs, VerifyArgs, WitnessArgs,
};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Violation = 1,
    Usage = 2,
    Infeasible = 3,
}

impl Exit {
    pub fn for_error(err: &Error) -> Exit {
        match err {
            Error::Infeasible(_) => Exit::Infeasible,
            _ => Exit::Usage,
        }
    }
}

/// Lhs of the sharpness sweep may exceed `r^2/2` by at most this much.
pub const SHARPNESS_ALLOWANCE: f64 = 1e-12;

pub fn execute(command: Command) -> Result<Exit> {
    match command {
        Command::Verify(args) => verify(args),
        Command::Witness(args) => witness(args),
        Command::Sharpness(args) => sharpness(args),
        Command::Integral(args) => integral(args),
        Command::Report(args) => report(args),
    }
}

fn parse_theorems(spec: &str, universe: &[TheoremId]) -> Result<Vec<TheoremId>> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(universe.to_vec());
    }
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

fn seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("INEQ_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("INEQ_SEED must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

fn tolerances(rel: Option<f64>, abs: Option<f64>) -> Result<Tolerances> {
    let d = Tolerances::default();
    Tolerances::new(rel.unwrap_or(d.rel), abs.unwrap_or(d.abs), d.boundary_band)
}

fn rho_range(s: &SamplingArgs) -> Result<Option<(f64, f64)>> {
    match (s.rho, s.rho_range) {
        (Some(_), Some(_)) => Err(Error::Usage(
            "give either --rho or --rho-range, not both".into(),
        )),
        (Some(r), None) => Ok(Some((r, r))),
        (None, range) => Ok(range),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut f =
                File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            f.write_all(text.as_bytes())?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn emit_report(report: &CampaignReport, format: Format, out: Option<&Path>) -> Result<()> {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
    };
    write_output(out, &text)
}

/// Summary on stderr, then the exit status. Violations and failed checks
/// dominate; infeasible samples only count under `strict`.
fn verdict(report: &CampaignReport, strict: bool) -> Exit {
    for r in &report.results {
        eprintln!(
            "{:<9} samples={} violations={} infeasible={} near_boundary={}",
            r.theorem_id, r.samples, r.violations, r.infeasible, r.near_boundary
        );
    }
    let failed: Vec<_> = report.failed_checks().collect();
    for c in &failed {
        eprintln!(
            "check failed: {} = {:e} (threshold {:e})",
            c.name, c.value, c.threshold
        );
    }
    if report.total_violations() > 0 {
        eprintln!("VIOLATIONS (first {MAX_VIOLATION_DUMPS} per theorem):");
        for r in report.results.iter().filter(|r| r.violations > 0) {
            for d in &r.violation_details {
                let line = serde_json::to_string(d).expect("detail serializes");
                eprintln!("{} {line}", r.theorem_id);
            }
        }
    }
    if report.total_violations() > 0 || !failed.is_empty() {
        Exit::Violation
    } else if strict && report.total_infeasible() > 0 {
        eprintln!(
            "{} infeasible samples under --strict-feasibility",
            report.total_infeasible()
        );
        Exit::Infeasible
    } else {
        Exit::Pass
    }
}

fn verify(args: VerifyArgs) -> Result<Exit> {
    let s = &args.sampling;
    let defaults = CampaignConfig::default();
    let config = CampaignConfig {
        theorems: parse_theorems(&s.theorems, &TheoremId::CAMPAIGN)?,
        samples: s.samples,
        seed: seed(s.seed)?,
        dim: s.dim.unwrap_or(defaults.dim),
        n: s.n.unwrap_or(defaults.n),
        field: s.field,
        rho: rho_range(s)?.unwrap_or(defaults.rho),
        bracket: s.bracket,
        family_size: args.family_size.unwrap_or(defaults.family_size),
        tolerances: tolerances(s.tol_rel, s.tol_abs)?,
        fault_delta: s.fault_delta,
    };
    config.validate()?;
    let report = run_campaign(&config)?;
    emit_report(&report, s.format, s.out.as_deref())?;
    Ok(verdict(&report, s.strict_feasibility))
}

/// Standard-basis anchors `e_0..e_{k-1}` and spread generators that are
/// Re-orthogonal to them: the remaining basis vectors, then `i e_j` in the
/// complex case.
fn witness_frame(field: Field, dim: usize, k: usize) -> (Vec<Vector>, Vec<Vector>) {
    let anchors = (0..k.min(dim))
        .map(|j| Vector::basis(field, dim, j))
        .collect();
    let mut generators: Vec<Vector> = (k..dim).map(|j| Vector::basis(field, dim, j)).collect();
    if field == Field::Complex {
        generators.extend((0..dim).map(|j| Vector::basis(field, dim, j).scale(Complex64::i())));
    }
    (anchors, generators)
}

fn build_witness(args: &WitnessArgs, tol: &Tolerances) -> Result<WitnessInstance> {
    use TheoremId::*;
    let theorem: TheoremId = args.theorem.parse()?;
    let field = match args.field {
        FieldChoice::Real => Field::Real,
        FieldChoice::Complex => Field::Complex,
        FieldChoice::Both => {
            return Err(Error::Usage("witness needs --field real or complex".into()))
        }
    };
    if TheoremId::INTEGRAL.contains(&theorem) {
        return Err(Error::Usage(format!(
            "{theorem} witnesses are constant functions; use the T2.1/T2.3 witness"
        )));
    }
    if args.n < 2 {
        return Err(Error::Parameter(format!(
            "witnesses need n >= 2, got {}",
            args.n
        )));
    }
    if matches!(theorem, P51 | P52) && args.n != 2 {
        return Err(Error::Parameter(format!(
            "{theorem} witnesses have exactly two vectors"
        )));
    }
    let k = if matches!(theorem, DmOrtho | T22 | T24 | T32) {
        args.family_size
    } else {
        1
    };
    if k == 0 {
        return Err(Error::Parameter("family size must be >= 1".into()));
    }
    let needed = if args.n.is_multiple_of(2) { 1 } else { 2 };
    let dim = match args.dim {
        Some(d) => d,
        None => (k..)
            .find(|d| witness_frame(field, *d, k).1.len() >= needed)
            .expect("some dimension fits"),
    };
    let (anchors, generators) = witness_frame(field, dim, k);
    if anchors.len() < k || generators.len() < needed {
        return Err(Error::Parameter(format!(
            "dimension {dim} is too small for {k} anchors and {needed} spread directions"
        )));
    }
    let a = &anchors[0];
    let e = &generators[0];
    let spread = Spread::balanced(e, generators.get(1).unwrap_or(e), args.n)?;
    let (m, big_m) = args.bracket;
    let rho = args.rho;
    let family = || validate_orthonormal(anchors.clone(), *tol);
    match theorem {
        Dm => witnesses::dm_equality(a, &spread, rho),
        DmOrtho => witnesses::dm_ortho_equality(&family()?, &spread, &vec![rho; k]),
        T21 => witnesses::t21_equality(a, &spread, rho),
        T22 => witnesses::multi_axis_equality(&family()?, &spread, &MultiAxisKind::Ball { rho }),
        T23 => witnesses::t23_equality(a, &spread, m, big_m),
        T23Additive => witnesses::t23_additive_equality(a, &spread, m, big_m),
        T24 => witnesses::multi_axis_equality(
            &family()?,
            &spread,
            &MultiAxisKind::Bracket { m, big_m },
        ),
        T31 => witnesses::t31_equality(a, &spread, args.alpha, args.beta),
        T32 => witnesses::t32_equality(&family()?, &spread, args.alpha, args.beta),
        T41 => witnesses::t41_equality(a, &spread, rho),
        T42 => witnesses::t42_equality(a, &spread, m, big_m),
        T43 => witnesses::t43_equality(a, &spread, rho),
        T44 => witnesses::t44_equality(a, &spread, m, big_m),
        P51 => witnesses::p51_equality_pair(a, e, rho),
        P52 => witnesses::p52_equality_pair(a, e, m, big_m),
        P61 | P62 => unreachable!("rejected above"),
    }
}

fn witness(args: WitnessArgs) -> Result<Exit> {
    let tol = tolerances(args.tol_rel, args.tol_abs)?;
    let w = build_witness(&args, &tol)?;
    let verification = w.verify(&tol)?;
    let exit = if verification.attains_equality {
        Exit::Pass
    } else {
        eprintln!(
            "{}: no equality, relative slack {:e}",
            w.theorem(),
            verification.relative_slack
        );
        Exit::Violation
    };
    let doc = json!({ "instance": w, "verification": verification });
    write_output(args.out.as_deref(), &to_pretty_json(&doc))?;
    Ok(exit)
}

fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let bad = || {
        Error::Usage(format!(
            "bad sweep `{spec}`, expected HI:LO:log[:COUNT] or HI:LO:lin:COUNT"
        ))
    };
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let (hi, lo) = (num(parts[0])?, num(parts[1])?);
    let count = parts
        .get(3)
        .map(|c| c.parse::<usize>().map_err(|_| bad()))
        .transpose()?;
    match parts[2] {
        "log" => {
            let count = match count {
                Some(c) => c,
                None if hi > 0.0 && lo > 0.0 => (hi / lo).log10().abs().round() as usize + 1,
                None => 0,
            };
            witnesses::log_radii(hi, lo, count)
        }
        "lin" => {
            let count = count.ok_or_else(bad)?;
            Ok(match count {
                0 => Vec::new(),
                1 => vec![hi],
                _ => (0..count)
                    .map(|j| hi + (lo - hi) * j as f64 / (count - 1) as f64)
                    .collect(),
            })
        }
        _ => Err(bad()),
    }
}

#[derive(Debug, Serialize)]
struct SweepRow {
    r: f64,
    lhs: f64,
    bound: f64,
    /// `lhs / r^2`; tends to 1/2 as `r -> 0`.
    ratio_to_half: f64,
}

fn sharpness(args: SharpnessArgs) -> Result<Exit> {
    let radii = parse_sweep(&args.r_sweep)?;
    let a = Vector::basis(Field::Real, 2, 0);
    let e = Vector::basis(Field::Real, 2, 1);
    let rows: Vec<SweepRow> = witnesses::sharpness_sweep(&a, &e, &radii)?
        .into_iter()
        .map(|p| SweepRow {
            r: p.r,
            lhs: p.lhs,
            bound: p.bound,
            ratio_to_half: p.ratio,
        })
        .collect();
    let text = match args.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                w.serialize(row)?;
            }
            if rows.is_empty() {
                w.write_record(["r", "lhs", "bound", "ratio_to_half"])?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
        Format::Json => to_pretty_json(&rows),
    };
    write_output(args.out.as_deref(), &text)?;
    let over: Vec<_> = rows
        .iter()
        .filter(|p| p.lhs > p.bound + SHARPNESS_ALLOWANCE)
        .collect();
    for p in &over {
        eprintln!(
            "r = {:e}: lhs {:e} exceeds r^2/2 = {:e}",
            p.r, p.lhs, p.bound
        );
    }
    Ok(if over.is_empty() {
        Exit::Pass
    } else {
        Exit::Violation
    })
}

fn integral(args: IntegralArgs) -> Result<Exit> {
    if args.g_csv.is_some() {
        return integral_from_csv(&args);
    }
    let s = &args.sampling;
    let weight: WeightChoice = args.weight.parse().map_err(|_| {
        Error::Usage(format!(
            "campaign weight must be uniform, linear or mixed, got `{}`",
            args.weight
        ))
    })?;
    let defaults = IntegralConfig::default();
    let config = IntegralConfig {
        theorems: parse_theorems(&s.theorems, &TheoremId::INTEGRAL)?,
        samples: s.samples,
        seed: seed(s.seed)?,
        dim: s.dim.unwrap_or(defaults.dim),
        n: s.n.unwrap_or(defaults.n),
        field: s.field,
        rho: rho_range(s)?.unwrap_or(defaults.rho),
        bracket: s.bracket,
        nodes: args.nodes.unwrap_or(defaults.nodes),
        weight,
        tolerances: tolerances(s.tol_rel, s.tol_abs)?,
        fault_delta: s.fault_delta,
    };
    config.validate()?;
    let report = run_integral_campaign(&config)?;
    emit_report(&report, s.format, s.out.as_deref())?;
    Ok(verdict(&report, s.strict_feasibility))
}

fn parse_weight(spec: &str, (a, b): (f64, f64)) -> Result<WeightFunction> {
    let spec = spec.trim();
    if let Some(coeffs) = spec.strip_prefix("poly:") {
        let coeffs = coeffs
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad weight coefficient `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(WeightFunction::polynomial(coeffs));
    }
    match spec {
        "uniform" => Ok(WeightFunction::uniform(a, b)),
        "linear" => Ok(WeightFunction::polynomial(vec![0.0, 2.0])),
        _ => Err(Error::Usage(format!(
            "weight for CSV input must be uniform, linear or poly:c0,c1,..., got `{spec}`"
        ))),
    }
}

fn read_csv(path: &Path) -> Result<(Vec<f64>, SampledFunction)> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_sampled_csv(file)
}

fn integral_from_csv(args: &IntegralArgs) -> Result<Exit> {
    let s = &args.sampling;
    let tol = tolerances(s.tol_rel, s.tol_abs)?;
    let kind = match (rho_range(s)?, s.bracket) {
        (Some((lo, hi)), None) if lo == hi => IntegralKind::Ball { rho: lo },
        (None, Some((m, big_m))) => IntegralKind::Bracket { m, big_m },
        _ => {
            return Err(Error::Usage(
                "CSV input needs exactly one of --rho X or --bracket m:M".into(),
            ))
        }
    };
    let (ts, g) = read_csv(args.g_csv.as_deref().expect("checked by caller"))?;
    let (a, b) = args.interval;
    let rule = gauss_legendre_rule(args.nodes.unwrap_or(ts.len()), a, b)?;
    check_nodes_match(&ts, &rule, &tol)?;
    let fs = args
        .f_csv
        .iter()
        .map(|p| {
            let (ts, f) = read_csv(p)?;
            check_nodes_match(&ts, &rule, &tol)?;
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut eta = parse_weight(&args.weight, args.interval)?;
    if args.renormalize {
        eta = eta.renormalized(&rule)?;
    }
    let weight = validate_weight(&eta, &rule, &tol)?;
    if !weight.normalized {
        return Err(Error::Precondition(format!(
            "weight integrates to {} instead of 1; pass --renormalize to rescale it",
            weight.integral
        )));
    }
    let hypothesis = check_integral_hypothesis(&fs, &g, &kind, &eta, &rule, &tol)?;
    if !hypothesis.overall {
        let doc = json!({
            "theorem_id": kind.theorem(),
            "weight": weight,
            "hypothesis": hypothesis,
            "certificate": null,
        });
        write_output(s.out.as_deref(), &to_pretty_json(&doc))?;
        eprintln!(
            "hypothesis fails at {} node(s)",
            hypothesis.failures().count()
        );
        return Ok(if s.strict_feasibility {
            Exit::Infeasible
        } else {
            Exit::Pass
        });
    }
    let (hypothesis, certificate) = integral_certificate(&kind, &fs, &g, &eta, &rule, &tol)?;
    let exit = if certificate.holds() {
        Exit::Pass
    } else {
        Exit::Violation
    };
    let doc = json!({
        "theorem_id": kind.theorem(),
        "weight": weight,
        "hypothesis": hypothesis,
        "certificate": certificate,
    });
    write_output(s.out.as_deref(), &to_pretty_json(&doc))?;
    Ok(exit)
}

fn report(args: ReportArgs) -> Result<Exit> {
    let text = std::fs::read_to_string(&args.path)
        .map_err(|e| Error::Io(format!("{}: {e}", args.path.display())))?;
    let report: CampaignReport =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    emit_report(&report, args.format, args.out.as_deref())?;
    Ok(verdict(&report, false))
}
