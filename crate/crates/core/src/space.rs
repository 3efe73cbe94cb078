//! Finite-dimensional inner product spaces over the real or complex field.
//!
//! Vectors always store complex components; a real vector simply keeps every
//! imaginary part at zero. The inner product is linear in the first argument
//! and conjugate-linear in the second:
//!
//! ```text
//! <u, v> = sum_j u_j * conj(v_j)
//! ```
//!
//! Every expression of the form `Re<u, v>` is insensitive to that choice.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar field of a vector space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Number of real degrees of freedom per component.
    pub fn real_multiplicity(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => f.write_str("real"),
            Field::Complex => f.write_str("complex"),
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(Field::Real),
            "complex" | "c" => Ok(Field::Complex),
            other => Err(Error::Parse(format!("unknown field `{other}`"))),
        }
    }
}

/// Comparison tolerances shared by every check in the crate.
///
/// A quantity passes a closed inequality when it misses the threshold by no
/// more than `abs + rel * scale`, where `scale` is the magnitude of the terms
/// being compared. Anything within `boundary_band` of its threshold is flagged
/// as near the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub boundary_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-9,
            abs: 1e-12,
            boundary_band: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(rel: f64, abs: f64, boundary_band: f64) -> Result<Self> {
        for (name, v) in [("rel", rel), ("abs", abs), ("boundary_band", boundary_band)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Parameter(format!(
                    "tolerance `{name}` must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(Tolerances {
            rel,
            abs,
            boundary_band,
        })
    }

    /// Allowed shortfall for a comparison whose terms have magnitude `scale`.
    #[inline]
    pub fn allowance(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs()
    }

    /// `|a - b|` within the allowance scaled by the larger magnitude.
    #[inline]
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.allowance(a.abs().max(b.abs()))
    }
}

/// An element of `K^dim` with `K` the real or complex field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector {
    field: Field,
    components: Vec<Complex64>,
}

impl Vector {
    /// Builds a vector, rejecting empty input, non-finite entries and nonzero
    /// imaginary parts in a real vector.
    pub fn new(field: Field, components: Vec<Complex64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Usage("vectors must have dimension >= 1".into()));
        }
        for (j, c) in components.iter().enumerate() {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Usage(format!("component {j} is not finite: {c}")));
            }
            if field == Field::Real && c.im != 0.0 {
                return Err(Error::Usage(format!(
                    "component {j} of a real vector has imaginary part {}",
                    c.im
                )));
            }
        }
        Ok(Vector { field, components })
    }

    pub fn real(values: &[f64]) -> Result<Self> {
        Vector::new(
            Field::Real,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn complex(values: &[Complex64]) -> Result<Self> {
        Vector::new(Field::Complex, values.to_vec())
    }

    pub fn zeros(field: Field, dim: usize) -> Self {
        assert!(dim >= 1, "vectors must have dimension >= 1");
        Vector {
            field,
            components: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// The `k`-th standard basis vector (zero based).
    pub fn basis(field: Field, dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut v = Vector::zeros(field, dim);
        v.components[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    /// Same vector viewed over the complex field.
    pub fn to_complex(&self) -> Vector {
        Vector {
            field: Field::Complex,
            components: self.components.clone(),
        }
    }

    pub(crate) fn check_compatible(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Usage(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        if self.field != other.field {
            return Err(Error::Usage(format!(
                "field mismatch: {} vs {}",
                self.field, other.field
            )));
        }
        Ok(())
    }

    /// `<self, other>`, linear in `self`.
    pub fn inner(&self, other: &Vector) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(self.inner_unchecked(other))
    }

    #[inline]
    pub(crate) fn inner_unchecked(&self, other: &Vector) -> Complex64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(u, v)| u * v.conj())
            .sum()
    }

    /// `Re<self, other>`.
    pub fn re_inner(&self, other: &Vector) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.re_inner_unchecked(other))
    }

    #[inline]
    pub(crate) fn re_inner_unchecked(&self, other: &Vector) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(u, v)| u.re * v.re + u.im * v.im)
            .sum()
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplies by a complex scalar. Scaling a real vector by a non-real
    /// scalar promotes it to the complex field.
    pub fn scale(&self, c: Complex64) -> Vector {
        let field = if c.im != 0.0 {
            Field::Complex
        } else {
            self.field
        };
        Vector {
            field,
            components: self.components.iter().map(|v| v * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Vector {
        Vector {
            field: self.field,
            components: self.components.iter().map(|v| v * c).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: f64, other: &Vector) {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in add_scaled");
        for (u, v) in self.components.iter_mut().zip(&other.components) {
            *u += v * c;
        }
    }

    /// `self += c * other` for a complex coefficient.
    pub fn add_scaled_complex(&mut self, c: Complex64, other: &Vector) {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in add_scaled");
        for (u, v) in self.components.iter_mut().zip(&other.components) {
            *u += v * c;
        }
        if c.im != 0.0 {
            self.field = Field::Complex;
        }
    }

    /// Returns `self / ||self||`, or `None` for a vector of norm below `floor`.
    pub fn normalized(&self, floor: f64) -> Option<Vector> {
        let n = self.norm();
        (n > floor).then(|| self.scale_real(1.0 / n))
    }

    pub fn distance(&self, other: &Vector) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .map(|(u, v)| (u - v).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn is_zero(&self, tol: &Tolerances) -> bool {
        self.norm() <= tol.abs
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, c) in self.components.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            match self.field {
                Field::Real => write!(f, "{}", c.re)?,
                Field::Complex => write!(f, "{c}")?,
            }
        }
        f.write_str(")")
    }
}

// The operators panic on shape mismatch; checked entry points are `inner`,
// `re_inner` and `sum`.
impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in addition");
        Vector {
            field: join_field(self.field, rhs.field),
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(u, v)| u + v)
                .collect(),
        }
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in subtraction");
        Vector {
            field: join_field(self.field, rhs.field),
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(u, v)| u - v)
                .collect(),
        }
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scale_real(-1.0)
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale_real(self)
    }
}

fn join_field(a: Field, b: Field) -> Field {
    if a == Field::Complex || b == Field::Complex {
        Field::Complex
    } else {
        Field::Real
    }
}

pub fn inner(u: &Vector, v: &Vector) -> Result<Complex64> {
    u.inner(v)
}

pub fn re_inner(u: &Vector, v: &Vector) -> Result<f64> {
    u.re_inner(v)
}

pub fn norm(u: &Vector) -> f64 {
    u.norm()
}

/// Sum of a nonempty sequence of vectors sharing dimension and field.
pub fn sum(xs: &[Vector]) -> Result<Vector> {
    let first = xs
        .first()
        .ok_or_else(|| Error::Usage("cannot sum an empty family".into()))?;
    let mut acc = Vector::zeros(first.field, first.dim());
    for x in xs {
        first.check_compatible(x)?;
        acc.add_scaled(1.0, x);
    }
    Ok(acc)
}

/// Checks that every vector in `xs` shares the dimension and field of `like`.
pub fn check_uniform(xs: &[Vector], like: &Vector) -> Result<()> {
    xs.iter().try_for_each(|x| like.check_compatible(x))
}

/// Fails with a precondition error unless `|‖u‖ - 1|` is within tolerance.
pub fn require_unit(u: &Vector, name: &str, tol: &Tolerances) -> Result<()> {
    let n = u.norm();
    if tol.close(n, 1.0) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "`{name}` must be a unit vector, has norm {n}"
        )))
    }
}

/// A family `{a_1, ..., a_m}` with `<a_j, a_k> = delta_jk` up to tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalFamily {
    members: Vec<Vector>,
    tol: Tolerances,
}

impl OrthonormalFamily {
    pub fn members(&self) -> &[Vector] {
        &self.members
    }

    /// Family size (the index bound `m`).
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn field(&self) -> Field {
        self.members[0].field()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// `sum_k a_k`, of norm `sqrt(m)`.
    pub fn sum(&self) -> Vector {
        sum(&self.members).expect("validated family is uniform")
    }

    /// Sub-family made of the first member only.
    pub fn first_only(&self) -> OrthonormalFamily {
        OrthonormalFamily {
            members: vec![self.members[0].clone()],
            tol: self.tol,
        }
    }
}

/// Validates orthonormality, reporting the worst offending pair on failure.
pub fn validate_orthonormal(members: Vec<Vector>, tol: Tolerances) -> Result<OrthonormalFamily> {
    let first = members
        .first()
        .ok_or_else(|| Error::Usage("orthonormal family must be nonempty".into()))?;
    check_uniform(&members, first)?;
    let mut worst: Option<(usize, usize, f64)> = None;
    for j in 0..members.len() {
        for k in j..members.len() {
            let g = members[j].inner_unchecked(&members[k]);
            let target = if j == k { 1.0 } else { 0.0 };
            let dev = (g - Complex64::new(target, 0.0)).norm();
            if worst.is_none_or(|(_, _, w)| dev > w) {
                worst = Some((j, k, dev));
            }
        }
    }
    let (row, col, deviation) = worst.expect("nonempty family");
    // Gram entries are O(1), so the scaled allowance reduces to abs + rel.
    if deviation > tol.allowance(1.0) {
        return Err(Error::NotOrthonormal {
            row,
            col,
            deviation,
        });
    }
    Ok(OrthonormalFamily { members, tol })
}
