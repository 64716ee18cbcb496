//! Labelled polygons in the plane and the predicates used on them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub mod predicates;
mod simplicity;

pub use simplicity::{
    check_immersion_necessary, check_immersion_with_angles, face_samples,
    find_multiwound_witness, is_simple, ImmersionReport,
};

/// A point of the complex plane.
pub type PlanePoint = Complex64;

/// Coincidence tolerance, relative to the polygon's bounding-box diagonal.
pub const COINCIDENCE_TOL: f64 = 1e-12;
/// Tolerance used for angle-valued conditions.
pub const ANGLE_TOL: f64 = 1e-6;

/// Vertices `w_1, ..., w_n` of a labelled polygon, in label order.
///
/// Non-consecutive vertices may coincide. Consecutive coincidences are not
/// rejected here; the operations that need distinct sides report
/// [`Error::DegenerateSide`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonJson", into = "PolygonJson")]
pub struct LabelledPolygon {
    vertices: Vec<PlanePoint>,
}

#[derive(Serialize, Deserialize)]
struct PolygonJson {
    n: usize,
    vertices: Vec<[f64; 2]>,
}

impl TryFrom<PolygonJson> for LabelledPolygon {
    type Error = Error;

    fn try_from(raw: PolygonJson) -> Result<Self> {
        if raw.n != raw.vertices.len() {
            return Err(Error::CountMismatch { expected: raw.n, got: raw.vertices.len() });
        }
        LabelledPolygon::new(raw.vertices.iter().map(|v| Complex64::new(v[0], v[1])).collect())
    }
}

impl From<LabelledPolygon> for PolygonJson {
    fn from(p: LabelledPolygon) -> Self {
        PolygonJson { n: p.len(), vertices: p.vertices.iter().map(|w| [w.re, w.im]).collect() }
    }
}

impl LabelledPolygon {
    pub fn new(vertices: Vec<PlanePoint>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        if vertices.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(LabelledPolygon { vertices })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Complex64::new(x, y)).collect())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[PlanePoint] {
        &self.vertices
    }

    pub fn vertex(&self, j: usize) -> PlanePoint {
        self.vertices[j % self.len()]
    }

    /// Side `j` runs from vertex `j` to vertex `j + 1` (cyclically).
    pub fn side(&self, j: usize) -> (PlanePoint, PlanePoint) {
        (self.vertex(j), self.vertex(j + 1))
    }

    pub fn side_lengths(&self) -> Vec<f64> {
        (0..self.len()).map(|j| (self.vertex(j + 1) - self.vertex(j)).norm()).collect()
    }

    /// Diagonal of the axis-aligned bounding box.
    pub fn scale(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    pub fn bounding_box(&self) -> (PlanePoint, PlanePoint) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for w in &self.vertices[1..] {
            lo.re = lo.re.min(w.re);
            lo.im = lo.im.min(w.im);
            hi.re = hi.re.max(w.re);
            hi.im = hi.im.max(w.im);
        }
        (lo, hi)
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Cyclic relabelling: vertex `k` becomes vertex `0`.
    pub fn rotated(&self, k: usize) -> Self {
        let n = self.len();
        LabelledPolygon { vertices: (0..n).map(|j| self.vertex(j + k % n)).collect() }
    }

    pub(crate) fn check_sides(&self) -> Result<()> {
        let n = self.len();
        for j in 0..n {
            if self.vertex(j) == self.vertex(j + 1) {
                return Err(Error::DegenerateSide(j, (j + 1) % n));
            }
        }
        Ok(())
    }
}

/// Interior angles `θ_1, ..., θ_n` in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector {
    pub values: Vec<f64>,
}

impl AngleVector {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Indices whose angle is within `tol` of `0` or `2π`.
    pub fn straight_vertices(&self, tol: f64) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &t)| t <= tol || t >= TAU - tol)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn has_straight_vertex(&self) -> bool {
        !self.straight_vertices(ANGLE_TOL).is_empty()
    }
}

/// Counter-clockwise angle from direction `u` to direction `v`, in `(0, 2π]`.
pub(crate) fn ccw_angle(u: PlanePoint, v: PlanePoint) -> f64 {
    let cross = u.re * v.im - u.im * v.re;
    let dot = u.re * v.re + u.im * v.im;
    let t = cross.atan2(dot);
    if t <= 0.0 {
        t + TAU
    } else {
        t
    }
}

/// Interior angle at each vertex: the clockwise angle `∠ w_{j-1} w_j w_{j+1}`,
/// equivalently the counter-clockwise sweep from the outgoing side to the
/// reversed incoming side, normalised into `(0, 2π]`.
pub fn interior_angles(poly: &LabelledPolygon) -> Result<AngleVector> {
    poly.check_sides()?;
    let n = poly.len();
    let values = (0..n)
        .map(|j| {
            let w = poly.vertex(j);
            let next = poly.vertex(j + 1) - w;
            let prev = poly.vertex(j + n - 1) - w;
            ccw_angle(next, prev)
        })
        .collect();
    Ok(AngleVector { values })
}

/// Sum of the exterior angles `π - θ_j`, each in `[-π, π)`.
pub fn turning_angle_sum(poly: &LabelledPolygon) -> Result<f64> {
    Ok(interior_angles(poly)?.values.iter().map(|t| PI - t).sum())
}

/// Winding number of the closed polygonal curve around `p`.
pub fn winding_number(poly: &LabelledPolygon, p: PlanePoint) -> Result<i64> {
    let tol = COINCIDENCE_TOL * poly.scale().max(f64::MIN_POSITIVE);
    let n = poly.len();
    let mut total = 0.0;
    for j in 0..n {
        let (a, b) = poly.side(j);
        if predicates::point_segment_distance(p, a, b) <= tol {
            return Err(Error::PointOnCurve);
        }
        let u = a - p;
        let v = b - p;
        total += (u.re * v.im - u.im * v.re).atan2(u.re * v.re + u.im * v.im);
    }
    let turns = total / TAU;
    let rounded = turns.round();
    debug_assert!((turns - rounded).abs() < 1e-6, "winding residual {}", turns - rounded);
    Ok(rounded as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn square() -> LabelledPolygon {
        LabelledPolygon::from_xy(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]).unwrap()
    }

    fn bowtie() -> LabelledPolygon {
        LabelledPolygon::from_xy(&[(0., 0.), (1., 1.), (1., 0.), (0., 1.)]).unwrap()
    }

    #[test]
    fn square_angles() {
        let a = interior_angles(&square()).unwrap();
        for t in a.values {
            assert_abs_diff_eq!(t, PI / 2.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(turning_angle_sum(&square()).unwrap(), TAU, epsilon = 1e-14);
    }

    #[test]
    fn equilateral_angles() {
        let tri = LabelledPolygon::from_xy(&[(0., 0.), (1., 0.), (0.5, 3f64.sqrt() / 2.)]).unwrap();
        for t in interior_angles(&tri).unwrap().values {
            assert_abs_diff_eq!(t, PI / 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn bowtie_angle_sum_is_not_two_pi() {
        let a = interior_angles(&bowtie()).unwrap();
        // π/4, 7π/4, 7π/4, π/4
        assert_abs_diff_eq!(a.sum(), 4.0 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(turning_angle_sum(&bowtie()).unwrap(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn degenerate_side_reported() {
        let p = LabelledPolygon::from_xy(&[(0., 0.), (0., 0.), (1., 1.)]).unwrap();
        assert!(matches!(interior_angles(&p), Err(Error::DegenerateSide(0, 1))));
    }

    #[test]
    fn fold_back_vertex_is_flagged_straight() {
        let p = LabelledPolygon::from_xy(&[(0., 0.), (2., 0.), (1., 0.), (1., 1.)]).unwrap();
        let a = interior_angles(&p).unwrap();
        assert_eq!(a.straight_vertices(ANGLE_TOL), vec![1]);
        assert!(a.has_straight_vertex());
    }

    #[test]
    fn too_few_vertices() {
        assert!(matches!(
            LabelledPolygon::from_xy(&[(0., 0.), (1., 0.)]),
            Err(Error::TooFewVertices(2))
        ));
    }

    #[test]
    fn winding_of_square() {
        let sq = square();
        assert_eq!(winding_number(&sq, Complex64::new(0.5, 0.5)).unwrap(), 1);
        assert_eq!(winding_number(&sq, Complex64::new(10., 10.)).unwrap(), 0);
        assert!(matches!(
            winding_number(&sq, Complex64::new(0.5, 0.0)),
            Err(Error::PointOnCurve)
        ));
        // clockwise traversal
        let cw = LabelledPolygon::from_xy(&[(0., 0.), (0., 1.), (1., 1.), (1., 0.)]).unwrap();
        assert_eq!(winding_number(&cw, Complex64::new(0.5, 0.5)).unwrap(), -1);
    }

    #[test]
    fn polygon_json_shape() {
        let json = serde_json::to_string(&square()).unwrap();
        assert_eq!(json, r#"{"n":4,"vertices":[[0.0,0.0],[1.0,0.0],[1.0,1.0],[0.0,1.0]]}"#);
        let bad = r#"{"n":3,"vertices":[[0.0,0.0],[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<LabelledPolygon>(bad).is_err());
    }
}
