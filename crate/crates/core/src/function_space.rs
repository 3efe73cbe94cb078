//! The weighted space of vector-valued functions on `[a, b]`, discretized by
//! Gauss-Legendre quadrature.
//!
//! A function is represented by its values at the quadrature nodes, and every
//! pointwise condition ("for a.e. t") is checked at the nodes only.

use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, ball_constant, bracket_constant, Certificate, TheoremId};
use crate::conditions::{self, ConditionKind, HypothesisReport, Sense};
use crate::error::{Error, Result};
use crate::space::{self, Field, Tolerances, Vector};

/// Nodes and positive weights on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_j w_j f(t_j)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(*t))
            .sum()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, dp)
}

/// `n`-point Gauss-Legendre rule mapped to `[a, b]`, nodes increasing.
pub fn gauss_legendre_rule(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Usage("quadrature needs at least one node".into()));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Usage(format!("need a < b, got [{a}, {b}]")));
    }
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Newton from the Tricomi-style initial guess; roots come out decreasing
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = 0.0;
    }
    let (half, mid) = ((b - a) / 2.0, (a + b) / 2.0);
    Ok(QuadratureRule {
        a,
        b,
        nodes: xs.iter().map(|x| mid + half * x).collect(),
        weights: ws.iter().map(|w| half * w).collect(),
    })
}

/// The weight `eta` on `[a, b]`.
#[derive(Clone)]
pub struct WeightFunction {
    label: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightFunction({})", self.label)
    }
}

impl WeightFunction {
    pub fn from_fn(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        WeightFunction {
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    /// `1/(b - a)`.
    pub fn uniform(a: f64, b: f64) -> Self {
        let h = 1.0 / (b - a);
        WeightFunction::from_fn(format!("uniform[{a},{b}]"), move |_| h)
    }

    /// `sum_k c_k t^k`.
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let label = format!("poly{coeffs:?}");
        WeightFunction::from_fn(label, move |t| horner(&coeffs, t))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// `eta / integral(eta)` under `rule`.
    pub fn renormalized(&self, rule: &QuadratureRule) -> Result<WeightFunction> {
        let total = rule.integrate(|t| self.eval(t));
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Precondition(format!(
                "cannot renormalize a weight with integral {total}"
            )));
        }
        let inner = self.eval.clone();
        Ok(WeightFunction {
            label: format!("{}/{total}", self.label),
            eval: Arc::new(move |t| inner(t) / total),
        })
    }

    /// `w_j eta(t_j)` for each node.
    pub fn node_masses(&self, rule: &QuadratureRule) -> Vec<f64> {
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(t, w)| w * self.eval(*t))
            .collect()
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    pub integral: f64,
    /// Indices of nodes where `eta < 0`.
    pub negative_nodes: Vec<usize>,
    pub normalized: bool,
}

/// Checks `eta >= 0` at the nodes and `integral(eta) = 1` within the
/// relative tolerance. A negative node value is an error; a wrong integral is
/// reported through `normalized`.
pub fn validate_weight(
    eta: &WeightFunction,
    rule: &QuadratureRule,
    tol: &Tolerances,
) -> Result<WeightReport> {
    let negative_nodes: Vec<usize> = rule
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, t)| eta.eval(**t).is_nan() || eta.eval(**t) < 0.0)
        .map(|(j, _)| j)
        .collect();
    if let Some(j) = negative_nodes.first() {
        return Err(Error::Precondition(format!(
            "weight is negative (or undefined) at node {j}, t = {}",
            rule.nodes[*j]
        )));
    }
    let integral = rule.integrate(|t| eta.eval(t));
    Ok(WeightReport {
        integral,
        negative_nodes,
        normalized: tol.close(integral, 1.0),
    })
}

/// Values of a function at the nodes of a rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    values: Vec<Vector>,
}

impl SampledFunction {
    pub fn new(values: Vec<Vector>) -> Result<Self> {
        let first = values
            .first()
            .ok_or_else(|| Error::Usage("a sampled function needs at least one node".into()))?;
        space::check_uniform(&values, first)?;
        Ok(SampledFunction { values })
    }

    pub fn from_fn(rule: &QuadratureRule, f: impl Fn(f64) -> Vector) -> Result<Self> {
        SampledFunction::new(rule.nodes.iter().map(|t| f(*t)).collect())
    }

    pub fn constant(rule: &QuadratureRule, v: &Vector) -> Self {
        SampledFunction {
            values: vec![v.clone(); rule.len()],
        }
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn field(&self) -> Field {
        self.values[0].field()
    }

    fn check_on(&self, rule: &QuadratureRule) -> Result<()> {
        if self.len() == rule.len() {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "function sampled at {} nodes, rule has {}",
                self.len(),
                rule.len()
            )))
        }
    }

    fn check_like(&self, other: &SampledFunction) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::Usage(format!(
                "functions sampled at {} and {} nodes",
                self.len(),
                other.len()
            )));
        }
        space::check_uniform(&other.values[..1], &self.values[0])
    }

    /// Pointwise sum.
    pub fn sum(fs: &[SampledFunction]) -> Result<SampledFunction> {
        let first = fs
            .first()
            .ok_or_else(|| Error::Usage("cannot sum an empty list of functions".into()))?;
        let mut values = first.values.clone();
        for f in &fs[1..] {
            first.check_like(f)?;
            for (acc, v) in values.iter_mut().zip(&f.values) {
                acc.add_scaled(1.0, v);
            }
        }
        Ok(SampledFunction { values })
    }
}

/// `sum_j w_j eta(t_j) <f(t_j), g(t_j)>`.
pub fn weighted_inner(
    f: &SampledFunction,
    g: &SampledFunction,
    eta: &WeightFunction,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    f.check_on(rule)?;
    f.check_like(g)?;
    Ok(eta
        .node_masses(rule)
        .iter()
        .zip(f.values.iter().zip(&g.values))
        .map(|(mass, (u, v))| u.inner_unchecked(v) * mass)
        .sum())
}

/// `(integral eta ||f||^2)^(1/2)`.
pub fn eta_norm(f: &SampledFunction, eta: &WeightFunction, rule: &QuadratureRule) -> Result<f64> {
    f.check_on(rule)?;
    Ok(eta
        .node_masses(rule)
        .iter()
        .zip(&f.values)
        .map(|(mass, v)| mass * v.norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Stacks `sqrt(w_j eta(t_j)) f(t_j)` into one vector of dimension
/// `nodes * dim`, so that the plain inner product of two stacked vectors is
/// the weighted inner product of the functions.
pub fn fold_weights(
    f: &SampledFunction,
    eta: &WeightFunction,
    rule: &QuadratureRule,
) -> Result<Vector> {
    f.check_on(rule)?;
    let masses = eta.node_masses(rule);
    if let Some(m) = masses.iter().find(|m| **m < 0.0) {
        return Err(Error::Precondition(format!("negative node mass {m}")));
    }
    let comps: Vec<Complex64> = masses
        .iter()
        .zip(&f.values)
        .flat_map(|(mass, v)| {
            let s = mass.sqrt();
            v.components().iter().map(move |c| c * s)
        })
        .collect();
    Vector::new(f.field(), comps)
}

/// Pointwise hypothesis of the integral reverses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegralKind {
    /// `||f_i(t) - g(t)|| <= rho`
    Ball { rho: f64 },
    /// `Re<M g(t) - f_i(t), f_i(t) - m g(t)> >= 0`
    Bracket { m: f64, big_m: f64 },
}

impl IntegralKind {
    pub fn theorem(&self) -> TheoremId {
        match self {
            IntegralKind::Ball { .. } => TheoremId::P61,
            IntegralKind::Bracket { .. } => TheoremId::P62,
        }
    }

    pub fn constant(&self) -> f64 {
        match *self {
            IntegralKind::Ball { rho } => ball_constant(rho),
            IntegralKind::Bracket { m, big_m } => bracket_constant(m, big_m),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            IntegralKind::Ball { rho } => {
                if rho.is_finite() && rho > 0.0 && rho < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!(
                        "rho must lie in (0, 1), got {rho}"
                    )))
                }
            }
            IntegralKind::Bracket { m, big_m } => conditions::check_bracket_params(m, big_m),
        }
    }
}

/// Checks `integral eta ||g||^2 = 1`, then the pointwise condition at every
/// node of every `f_i`. Item `index` is the function, `axis` the node.
pub fn check_integral_hypothesis(
    fs: &[SampledFunction],
    g: &SampledFunction,
    kind: &IntegralKind,
    eta: &WeightFunction,
    rule: &QuadratureRule,
    tol: &Tolerances,
) -> Result<HypothesisReport> {
    kind.validate()?;
    if fs.is_empty() {
        return Err(Error::Usage("need at least one function".into()));
    }
    let gn = eta_norm(g, eta, rule)?;
    if !tol.close(gn * gn, 1.0) {
        return Err(Error::Precondition(format!(
            "g must satisfy integral eta ||g||^2 = 1, got {}",
            gn * gn
        )));
    }
    let mut report = HypothesisReport::new(match kind {
        IntegralKind::Ball { .. } => ConditionKind::IntegralBall,
        IntegralKind::Bracket { .. } => ConditionKind::IntegralBracket,
    });
    for (i, f) in fs.iter().enumerate() {
        f.check_on(rule)?;
        g.check_like(f)?;
        for (j, (x, gt)) in f.values.iter().zip(&g.values).enumerate() {
            match *kind {
                IntegralKind::Ball { rho } => {
                    let d = x.distance(gt)?;
                    report.push(i, Some(j), d, rho, Sense::AtMost, 1.0, tol);
                }
                IntegralKind::Bracket { m, big_m } => {
                    conditions::push_bracket_item(&mut report, i, x, gt, (m, big_m), Some(j), tol);
                }
            }
        }
    }
    Ok(report)
}

/// Checks the hypothesis and, if it passes, certifies
/// `c sum_i ||f_i||_eta <= ||sum_i f_i||_eta`.
pub fn integral_certificate(
    kind: &IntegralKind,
    fs: &[SampledFunction],
    g: &SampledFunction,
    eta: &WeightFunction,
    rule: &QuadratureRule,
    tol: &Tolerances,
) -> Result<(HypothesisReport, Certificate)> {
    let report = check_integral_hypothesis(fs, g, kind, eta, rule, tol)?;
    report.require()?;
    let cert = certify_integral_unchecked(kind, fs, eta, rule, tol, 0.0)?;
    Ok((report, cert))
}

/// The certificate without the hypothesis gate; `fault` raises the constant.
pub(crate) fn certify_integral_unchecked(
    kind: &IntegralKind,
    fs: &[SampledFunction],
    eta: &WeightFunction,
    rule: &QuadratureRule,
    tol: &Tolerances,
    fault: f64,
) -> Result<Certificate> {
    let sum_norms = fs
        .iter()
        .map(|f| eta_norm(f, eta, rule))
        .sum::<Result<f64>>()?;
    let norm_sum = eta_norm(&SampledFunction::sum(fs)?, eta, rule)?;
    Ok(Certificate::Multiplicative(
        bounds::multiplicative_from_sides(
            kind.theorem(),
            kind.constant() + fault,
            sum_norms,
            norm_sum,
            tol,
        ),
    ))
}

fn format_complex(c: Complex64) -> String {
    if c.im < 0.0 || (c.im == 0.0 && c.im.is_sign_negative()) {
        format!("{}{}i", c.re, c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

/// Writes `t, v_0, v_1, ...` rows; complex entries as `re+imi`.
pub fn write_sampled_csv<W: Write>(
    out: W,
    rule: &QuadratureRule,
    f: &SampledFunction,
) -> Result<()> {
    f.check_on(rule)?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((0..f.dim()).map(|k| format!("v_{k}")));
    w.write_record(&header)?;
    for (t, v) in rule.nodes.iter().zip(&f.values) {
        let mut row = vec![t.to_string()];
        row.extend(v.components().iter().map(|c| match f.field() {
            Field::Real => c.re.to_string(),
            Field::Complex => format_complex(*c),
        }));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads node values written by [`write_sampled_csv`]. The field is complex
/// if any entry has an imaginary part marker. Returns the node column too.
pub fn read_sampled_csv<R: Read>(input: R) -> Result<(Vec<f64>, SampledFunction)> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = r.headers()?.clone();
    if header.get(0) != Some("t") || header.len() < 2 {
        return Err(Error::Parse("expected header `t, v_0, v_1, ...`".into()));
    }
    let mut ts = Vec::new();
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut complex = false;
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse_err = |what: &str| Error::Parse(format!("row {}: cannot parse {what}", line + 1));
        let t: f64 = rec
            .get(0)
            .unwrap_or("")
            .parse()
            .map_err(|_| parse_err("t"))?;
        ts.push(t);
        let row = rec
            .iter()
            .skip(1)
            .map(|s| {
                complex |= s.contains('i');
                s.parse::<Complex64>().map_err(|_| parse_err(s))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let field = if complex { Field::Complex } else { Field::Real };
    let values = rows
        .into_iter()
        .map(|row| Vector::new(field, row))
        .collect::<Result<Vec<_>>>()?;
    Ok((ts, SampledFunction::new(values)?))
}

/// Checks that CSV nodes match the rule's nodes.
pub fn check_nodes_match(ts: &[f64], rule: &QuadratureRule, tol: &Tolerances) -> Result<()> {
    if ts.len() != rule.len() {
        return Err(Error::Usage(format!(
            "CSV has {} nodes, rule has {}",
            ts.len(),
            rule.len()
        )));
    }
    for (j, (t, s)) in ts.iter().zip(&rule.nodes).enumerate() {
        if (t - s).abs() > tol.allowance(s.abs().max(1.0)) {
            return Err(Error::Usage(format!(
                "CSV node {j} is {t}, rule node is {s}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn small_rules() {
        let r = gauss_legendre_rule(1, -1.0, 1.0).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_abs_diff_eq!(r.weights[0], 2.0, epsilon = 1e-15);
        let r = gauss_legendre_rule(2, -1.0, 1.0).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r.nodes[0], -s, epsilon = 1e-15);
        assert_abs_diff_eq!(r.nodes[1], s, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], 1.0, epsilon = 1e-15);
        let r = gauss_legendre_rule(2, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(r.integrate(|t| t * t * t), 0.25, epsilon = 1e-14);
        assert!(gauss_legendre_rule(0, 0.0, 1.0).is_err());
        assert!(gauss_legendre_rule(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn rules_are_exact_to_degree_2n_minus_1() {
        for n in [3, 7, 16, 64, 128] {
            let r = gauss_legendre_rule(n, 0.0, 2.0).unwrap();
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.weights.iter().all(|w| *w > 0.0));
            assert_abs_diff_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            let d = 2 * n - 1;
            let exact = 2f64.powi(d as i32 + 1) / (d as f64 + 1.0);
            let got = r.integrate(|t| t.powi(d as i32));
            assert!(((got - exact) / exact).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn weight_validation() {
        let r = gauss_legendre_rule(16, 0.0, 1.0).unwrap();
        let rep = validate_weight(&WeightFunction::uniform(0.0, 1.0), &r, &tol()).unwrap();
        assert!(rep.normalized);
        let rep = validate_weight(&WeightFunction::polynomial(vec![0.0, 2.0]), &r, &tol()).unwrap();
        assert!(rep.normalized);
        let two = WeightFunction::polynomial(vec![2.0]);
        let rep = validate_weight(&two, &r, &tol()).unwrap();
        assert!(!rep.normalized);
        assert_abs_diff_eq!(rep.integral, 2.0, epsilon = 1e-13);
        let fixed = two.renormalized(&r).unwrap();
        assert!(validate_weight(&fixed, &r, &tol()).unwrap().normalized);
        let neg = WeightFunction::polynomial(vec![-1.0, 2.0]);
        assert!(matches!(
            validate_weight(&neg, &r, &tol()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn inner_examples() {
        let r = gauss_legendre_rule(8, 0.0, 1.0).unwrap();
        let v = Vector::real(&[0.6, 0.8]).unwrap();
        let u = Vector::real(&[-0.8, 0.6]).unwrap();
        let c = SampledFunction::constant(&r, &v);
        let eta = WeightFunction::uniform(0.0, 1.0);
        assert_abs_diff_eq!(
            weighted_inner(&c, &c, &eta, &r).unwrap().re,
            1.0,
            epsilon = 1e-14
        );
        let tv = SampledFunction::from_fn(&r, |t| v.scale_real(t)).unwrap();
        let lin = WeightFunction::polynomial(vec![0.0, 2.0]);
        assert_abs_diff_eq!(
            weighted_inner(&tv, &c, &lin, &r).unwrap().re,
            2.0 / 3.0,
            epsilon = 1e-14
        );
        let cu = SampledFunction::constant(&r, &u);
        assert_abs_diff_eq!(
            weighted_inner(&tv, &cu, &lin, &r).unwrap().norm(),
            0.0,
            epsilon = 1e-15
        );
        let short = gauss_legendre_rule(4, 0.0, 1.0).unwrap();
        assert!(weighted_inner(&c, &c, &eta, &short).is_err());
    }

    #[test]
    fn hypothesis_examples() {
        let r = gauss_legendre_rule(8, 0.0, 1.0).unwrap();
        let eta = WeightFunction::uniform(0.0, 1.0);
        let g = SampledFunction::constant(&r, &Vector::real(&[1.0, 0.0]).unwrap());
        let rep = check_integral_hypothesis(
            std::slice::from_ref(&g),
            &g,
            &IntegralKind::Ball { rho: 0.1 },
            &eta,
            &r,
            &tol(),
        )
        .unwrap();
        assert!(rep.overall);
        assert!(rep.per_item.iter().all(|it| it.measured == 0.0));

        let f = SampledFunction::constant(&r, &Vector::real(&[1.0, 0.2]).unwrap());
        let rep =
            check_integral_hypothesis(&[f], &g, &IntegralKind::Ball { rho: 0.1 }, &eta, &r, &tol())
                .unwrap();
        assert_eq!(rep.failures().count(), r.len());

        let mid = SampledFunction::constant(&r, &Vector::real(&[2.5, 0.0]).unwrap());
        let kind = IntegralKind::Bracket { m: 1.0, big_m: 4.0 };
        let rep = check_integral_hypothesis(&[mid], &g, &kind, &eta, &r, &tol()).unwrap();
        assert!(rep.overall && !rep.near_boundary);

        let g2 = SampledFunction::constant(&r, &Vector::real(&[2.0, 0.0]).unwrap());
        assert!(matches!(
            check_integral_hypothesis(std::slice::from_ref(&g2), &g2, &kind, &eta, &r, &tol()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn certificate_examples() {
        let r = gauss_legendre_rule(8, 0.0, 1.0).unwrap();
        let eta = WeightFunction::uniform(0.0, 1.0);
        let g = SampledFunction::constant(&r, &Vector::real(&[0.0, 1.0]).unwrap());
        let (_, cert) = integral_certificate(
            &IntegralKind::Ball { rho: 0.6 },
            std::slice::from_ref(&g),
            &g,
            &eta,
            &r,
            &tol(),
        )
        .unwrap();
        let Certificate::Multiplicative(c) = cert else {
            panic!()
        };
        assert_abs_diff_eq!(c.lhs(), 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(c.norm_sum, 1.0, epsilon = 1e-14);
        assert!(c.holds);

        let kind = IntegralKind::Bracket { m: 1.0, big_m: 1.0 };
        let (_, cert) =
            integral_certificate(&kind, &[g.clone(), g.clone()], &g, &eta, &r, &tol()).unwrap();
        let Certificate::Multiplicative(c) = cert else {
            panic!()
        };
        assert_abs_diff_eq!(c.lhs(), 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.slack, 0.0, epsilon = 1e-13);

        let far = SampledFunction::constant(&r, &Vector::real(&[0.9, 1.0]).unwrap());
        assert!(matches!(
            integral_certificate(
                &IntegralKind::Ball { rho: 0.6 },
                &[far],
                &g,
                &eta,
                &r,
                &tol()
            ),
            Err(Error::HypothesisFailed(_))
        ));
    }

    #[test]
    fn folding_preserves_inner_products() {
        let r = gauss_legendre_rule(12, -1.0, 2.0).unwrap();
        let eta = WeightFunction::uniform(-1.0, 2.0);
        let f = SampledFunction::from_fn(&r, |t| {
            Vector::complex(&[Complex64::new(t, 1.0), Complex64::new(t * t, -t)]).unwrap()
        })
        .unwrap();
        let g = SampledFunction::from_fn(&r, |t| {
            Vector::complex(&[Complex64::new(1.0, t), Complex64::new(0.5, 0.0)]).unwrap()
        })
        .unwrap();
        let direct = weighted_inner(&f, &g, &eta, &r).unwrap();
        let folded = fold_weights(&f, &eta, &r)
            .unwrap()
            .inner(&fold_weights(&g, &eta, &r).unwrap())
            .unwrap();
        assert!((direct - folded).norm() < 1e-13);
    }

    #[test]
    fn csv_round_trip() {
        let r = gauss_legendre_rule(5, 0.0, 1.0).unwrap();
        let f = SampledFunction::from_fn(&r, |t| {
            Vector::complex(&[Complex64::new(t, -0.5), Complex64::new(1.0, t)]).unwrap()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_sampled_csv(&mut buf, &r, &f).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,v_0,v_1\n"));
        assert!(text.contains("-0.5i"));
        let (ts, back) = read_sampled_csv(buf.as_slice()).unwrap();
        check_nodes_match(&ts, &r, &tol()).unwrap();
        assert_eq!(back, f);

        let real = "t, v_0\n0.25, 1.5\n0.75, -2\n";
        let (ts, back) = read_sampled_csv(real.as_bytes()).unwrap();
        assert_eq!(ts, vec![0.25, 0.75]);
        assert_eq!(back.field(), Field::Real);
        assert!(read_sampled_csv("x, v_0\n0, 1\n".as_bytes()).is_err());
    }
}
