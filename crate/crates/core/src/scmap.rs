//! The half-plane Schwarz–Christoffel map
//! `F(z) = A ∫_{[i, z]} ∏_{j<n} (ζ - z_j)^(α_j - 1) dζ + B`
//! with `z_n = ∞`, and the forward map from normalized parameters to
//! labelled polygons.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::map_indexed;
use crate::geometry::{interior_angles, AngleVector, LabelledPolygon};
use crate::quadrature::ScIntegrator;
use crate::{Error, Result};

/// Whether exponents are confined to `(0, 2)` or may reach `2` and beyond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Standard,
    Extended,
}

/// Exponents `α_1, ..., α_n` with `Σ α_j = n - 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentVector {
    alphas: Vec<f64>,
    mode: Mode,
}

impl ExponentVector {
    pub fn new(alphas: Vec<f64>, mode: Mode) -> Result<Self> {
        let n = alphas.len();
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        for (index, &value) in alphas.iter().enumerate() {
            let ok = match mode {
                Mode::Standard => value > 0.0 && value < 2.0,
                Mode::Extended => value > 0.0 && value.is_finite(),
            };
            if !ok {
                return Err(Error::ExponentRange { index, value });
            }
        }
        let sum: f64 = alphas.iter().sum();
        let expected = n as f64 - 2.0;
        if (sum - expected).abs() > 1e-12 * n as f64 {
            return Err(Error::ExponentSum { sum, expected });
        }
        Ok(ExponentVector { alphas, mode })
    }

    pub fn standard(alphas: Vec<f64>) -> Result<Self> {
        Self::new(alphas, Mode::Standard)
    }

    pub fn extended(alphas: Vec<f64>) -> Result<Self> {
        Self::new(alphas, Mode::Extended)
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Interior angles `α_j π` the map realizes.
    pub fn angles(&self) -> AngleVector {
        AngleVector { values: self.alphas.iter().map(|a| a * PI).collect() }
    }
}

/// Finite prevertices `z_1 < ... < z_{n-1}`; `z_n = ∞` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Prevertices {
    points: Vec<f64>,
}

impl Prevertices {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewVertices(points.len() + 1));
        }
        if points.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite);
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::NotIncreasing);
        }
        Ok(Prevertices { points })
    }

    /// `(-1, 0, rest...)`.
    pub fn normalized(rest: &[f64]) -> Result<Self> {
        let mut points = vec![-1.0, 0.0];
        points.extend_from_slice(rest);
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of polygon vertices, counting the one at infinity.
    pub fn n(&self) -> usize {
        self.points.len() + 1
    }

    pub fn is_normalized(&self) -> bool {
        self.points[0] == -1.0 && self.points[1] == 0.0
    }
}

/// A Schwarz–Christoffel map on the closed upper half-plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScMapJson", into = "ScMapJson")]
pub struct ScMap {
    prevertices: Prevertices,
    exponents: ExponentVector,
    a: Complex64,
    b: Complex64,
}

#[derive(Serialize, Deserialize)]
struct ScMapJson {
    n: usize,
    prevertices: Vec<f64>,
    alphas: Vec<f64>,
    #[serde(rename = "A")]
    a: [f64; 2],
    #[serde(rename = "B")]
    b: [f64; 2],
    #[serde(default)]
    mode: Mode,
}

impl TryFrom<ScMapJson> for ScMap {
    type Error = Error;

    fn try_from(raw: ScMapJson) -> Result<Self> {
        if raw.alphas.len() != raw.n {
            return Err(Error::CountMismatch { expected: raw.n, got: raw.alphas.len() });
        }
        ScMap::new(
            Prevertices::new(raw.prevertices)?,
            ExponentVector::new(raw.alphas, raw.mode)?,
            Complex64::new(raw.a[0], raw.a[1]),
            Complex64::new(raw.b[0], raw.b[1]),
        )
    }
}

impl From<ScMap> for ScMapJson {
    fn from(m: ScMap) -> Self {
        ScMapJson {
            n: m.n(),
            prevertices: m.prevertices.points,
            mode: m.exponents.mode,
            alphas: m.exponents.alphas,
            a: [m.a.re, m.a.im],
            b: [m.b.re, m.b.im],
        }
    }
}

impl ScMap {
    pub fn new(prevertices: Prevertices, exponents: ExponentVector, a: Complex64, b: Complex64) -> Result<Self> {
        if prevertices.n() != exponents.len() {
            return Err(Error::CountMismatch { expected: exponents.len() - 1, got: prevertices.points.len() });
        }
        if a == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroScale);
        }
        if ![a.re, a.im, b.re, b.im].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ScMap { prevertices, exponents, a, b })
    }

    /// Map with `A = 1`, `B = 0`.
    pub fn bare(prevertices: Prevertices, exponents: ExponentVector) -> Result<Self> {
        Self::new(prevertices, exponents, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn n(&self) -> usize {
        self.exponents.len()
    }

    pub fn prevertices(&self) -> &Prevertices {
        &self.prevertices
    }

    pub fn exponents(&self) -> &ExponentVector {
        &self.exponents
    }

    pub fn mode(&self) -> Mode {
        self.exponents.mode
    }

    pub fn constants(&self) -> (Complex64, Complex64) {
        (self.a, self.b)
    }

    pub fn with_constants(&self, a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(self.prevertices.clone(), self.exponents.clone(), a, b)
    }

    pub fn integrator(&self) -> ScIntegrator {
        ScIntegrator::new(&self.exponents)
    }

    /// `F(z)` for `z` in the closed upper half-plane, integrating from `i`.
    pub fn evaluate(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        self.evaluate_with(&self.integrator(), z, tol)
    }

    pub fn evaluate_with(&self, integ: &ScIntegrator, z: Complex64, tol: f64) -> Result<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        Ok(self.a * integ.integrate(self.prevertices.points(), i, z, tol)? + self.b)
    }

    /// [`ScMap::evaluate`] over a batch, sharing the quadrature rules; points
    /// are evaluated in parallel when enabled.
    pub fn evaluate_many(&self, points: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
        let integ = self.integrator();
        map_indexed(points.len(), |k| self.evaluate_with(&integ, points[k], tol)).into_iter().collect()
    }

    /// `F(∞)`, reached through the fixed real waypoint right of all
    /// prevertices and the `1/ζ` tail.
    pub fn evaluate_at_infinity(&self, tol: f64) -> Result<Complex64> {
        let integ = self.integrator();
        let z = self.prevertices.points();
        let r = ScIntegrator::right_waypoint(z);
        let i = Complex64::new(0.0, 1.0);
        let head = integ.integrate(z, i, Complex64::new(r, 0.0), tol)?;
        Ok(self.a * (head + integ.to_infinity(z, r, tol)?) + self.b)
    }

    /// The polygon `F(z_1), ..., F(z_{n-1}), F(∞)`.
    ///
    /// `F(z_1)` is integrated from `i`; each later vertex adds the side
    /// integral along the real axis from the previous prevertex.
    pub fn polygon(&self, tol: f64) -> Result<LabelledPolygon> {
        let integ = self.integrator();
        let z = self.prevertices.points();
        let first = integ.integrate(z, Complex64::new(0.0, 1.0), Complex64::new(z[0], 0.0), tol)?;
        let sides = integ.side_vectors(z, tol)?;
        let mut w = first;
        let mut vertices = Vec::with_capacity(self.n());
        for side in &sides[..self.n() - 1] {
            vertices.push(self.a * w + self.b);
            w += side;
        }
        vertices.push(self.a * w + self.b);
        LabelledPolygon::new(vertices)
    }
}

fn verify_angles(poly: &LabelledPolygon, exponents: &ExponentVector, tol: f64) -> Result<()> {
    let angles = interior_angles(poly)?;
    let lengths = poly.side_lengths();
    let perimeter: f64 = lengths.iter().sum();
    let shortest = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    // Vertex positions carry errors of order tol * perimeter; directions of
    // short sides amplify them.
    let bound = 10.0 * tol * (perimeter / shortest).max(1.0);
    for (index, (&got, &alpha)) in angles.values.iter().zip(exponents.alphas()).enumerate() {
        if alpha >= 2.0 {
            continue;
        }
        let expected = alpha * PI;
        if !((got - expected).abs() <= bound) {
            return Err(Error::AngleMismatch { index, got, expected });
        }
    }
    Ok(())
}

/// The forward map: normalized prevertices and standard-mode exponents to the
/// polygon of the map with `A = 1`, `B = 0`. The interior angles of the result
/// are checked against `α_j π`.
pub fn forward(prevertices: &Prevertices, exponents: &ExponentVector, tol: f64) -> Result<LabelledPolygon> {
    if exponents.mode() != Mode::Standard {
        return Err(Error::InvalidConfig("forward requires standard-mode exponents".into()));
    }
    forward_extended(prevertices, exponents, tol)
}

/// As [`forward`], but exponents may be in extended mode. Vertices with
/// `α_j >= 2` are exempt from the angle check; the result is not certified
/// immersed.
pub fn forward_extended(
    prevertices: &Prevertices,
    exponents: &ExponentVector,
    tol: f64,
) -> Result<LabelledPolygon> {
    if !prevertices.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let map = ScMap::bare(prevertices.clone(), exponents.clone())?;
    let poly = map.polygon(tol)?;
    verify_angles(&poly, exponents, tol)?;
    Ok(poly)
}

/// `w ↦ a w + b` applied to every vertex.
pub fn apply_similarity(poly: &LabelledPolygon, a: Complex64, b: Complex64) -> Result<LabelledPolygon> {
    if a == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroScale);
    }
    LabelledPolygon::new(poly.vertices().iter().map(|w| a * w + b).collect())
}
