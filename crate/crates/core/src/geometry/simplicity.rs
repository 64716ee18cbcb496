//! Simplicity, necessary immersion conditions and multiply-wound witnesses.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::predicates::{
    adjacent_sides_overlap, point_line_distance, point_segment_distance, segments_intersect,
};
use super::{interior_angles, winding_number, AngleVector, LabelledPolygon, PlanePoint};
use super::{ANGLE_TOL, COINCIDENCE_TOL};
use crate::Result;

/// Whether the closed curve through the vertices is injective.
///
/// Non-adjacent sides must be disjoint, adjacent sides may only share their
/// common vertex. Coincident non-consecutive vertices therefore make the
/// polygon non-simple.
pub fn is_simple(poly: &LabelledPolygon) -> Result<bool> {
    poly.check_sides()?;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = poly.side(i);
        if adjacent_sides_overlap(a, b, poly.vertex(i + 2)) {
            return Ok(false);
        }
        // Non-adjacent pairs (i, k) with i < k; side n-1 is adjacent to side 0.
        for k in (i + 2)..n {
            if i == 0 && k == n - 1 {
                continue;
            }
            let (c, d) = poly.side(k);
            if segments_intersect(a, b, c, d) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of [`check_immersion_necessary`].
///
/// All three conditions are necessary for membership in the space of
/// immersed polygons; together they are not known to be sufficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmersionReport {
    /// Every interior angle lies strictly inside `(0, 2π)`.
    pub angles_in_range: bool,
    /// The interior angles sum to `(n - 2)π`.
    pub angle_sum_ok: bool,
    /// The winding number is nonnegative in every sampled face.
    pub winding_nonnegative: bool,
    pub angle_sum: f64,
    pub min_winding: i64,
    /// Vertices whose angle violates the range condition.
    pub bad_vertices: Vec<usize>,
}

impl ImmersionReport {
    pub fn passes(&self) -> bool {
        self.angles_in_range && self.angle_sum_ok && self.winding_nonnegative
    }
}

/// Necessary conditions for the polygon to bound an immersed disk, computed
/// from the vertices alone. Angles are only known modulo `2π` here, so a vertex
/// that wraps past a full turn shows up through the angle sum.
pub fn check_immersion_necessary(poly: &LabelledPolygon) -> Result<ImmersionReport> {
    let angles = interior_angles(poly)?;
    report(poly, &angles)
}

/// As [`check_immersion_necessary`] but with interior angles supplied by the
/// caller, e.g. the angles `α_j π` a Schwarz–Christoffel map realizes. Each
/// supplied angle must agree with the geometric angle modulo `2π`; a vertex
/// where it does not is reported as out of range.
pub fn check_immersion_with_angles(
    poly: &LabelledPolygon,
    angles: &AngleVector,
) -> Result<ImmersionReport> {
    let geometric = interior_angles(poly)?;
    if angles.values.len() != poly.len() {
        return Err(crate::Error::CountMismatch { expected: poly.len(), got: angles.values.len() });
    }
    let mut rep = report(poly, angles)?;
    for (j, (&t, &g)) in angles.values.iter().zip(&geometric.values).enumerate() {
        let diff = (t - g) / TAU;
        if (diff - diff.round()).abs() * TAU > ANGLE_TOL && !rep.bad_vertices.contains(&j) {
            rep.bad_vertices.push(j);
            rep.angles_in_range = false;
        }
    }
    rep.bad_vertices.sort_unstable();
    Ok(rep)
}

fn report(poly: &LabelledPolygon, angles: &AngleVector) -> Result<ImmersionReport> {
    let n = poly.len();
    let bad_vertices: Vec<usize> = angles
        .values
        .iter()
        .enumerate()
        .filter(|(_, &t)| !(t > ANGLE_TOL && t < TAU - ANGLE_TOL))
        .map(|(j, _)| j)
        .collect();
    let angle_sum = angles.sum();
    let angle_sum_ok = (angle_sum - (n as f64 - 2.0) * PI).abs() <= ANGLE_TOL;
    let min_winding = face_samples(poly)
        .into_iter()
        .filter_map(|p| winding_number(poly, p).ok())
        .min()
        .unwrap_or(0);
    Ok(ImmersionReport {
        angles_in_range: bad_vertices.is_empty(),
        angle_sum_ok,
        winding_nonnegative: min_winding >= 0,
        angle_sum,
        min_winding,
        bad_vertices,
    })
}

/// Parameters along side `i` where other sides meet it, including `0` and `1`.
fn cut_parameters(poly: &LabelledPolygon, i: usize) -> Vec<f64> {
    let n = poly.len();
    let (a, b) = poly.side(i);
    let d = b - a;
    let mut ts = vec![0.0, 1.0];
    for k in 0..n {
        if k == i {
            continue;
        }
        let (c, e) = poly.side(k);
        if !segments_intersect(a, b, c, e) {
            continue;
        }
        let f = e - c;
        let denom = d.re * f.im - d.im * f.re;
        if denom != 0.0 {
            let w = c - a;
            let t = (w.re * f.im - w.im * f.re) / denom;
            ts.push(t.clamp(0.0, 1.0));
        } else {
            // collinear overlap: both endpoints of the other side project in
            let len2 = d.norm_sqr();
            for q in [c, e] {
                ts.push((((q - a) * d.conj()).re / len2).clamp(0.0, 1.0));
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    ts
}

/// Points off the curve, at least one in every face of the arrangement cut out
/// by the sides, and none within tolerance of a side-supporting line.
///
/// Each side is split at its crossings; next to the midpoint of each piece a
/// point is placed on both sides, closer than any other side, so the two
/// faces bordering that piece are both sampled.
pub fn face_samples(poly: &LabelledPolygon) -> Vec<PlanePoint> {
    let n = poly.len();
    let line_tol = COINCIDENCE_TOL * poly.scale().max(f64::MIN_POSITIVE) * 10.0;
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = poly.side(i);
        let d = b - a;
        let len = d.norm();
        if len == 0.0 {
            continue;
        }
        let normal = PlanePoint::new(-d.im, d.re) / len;
        let ts = cut_parameters(poly, i);
        for w in ts.windows(2) {
            let piece = (w[1] - w[0]) * len;
            if piece <= line_tol {
                continue;
            }
            'placement: for frac in [0.5, 0.382, 0.618, 0.25, 0.75] {
                let m = a + d * (w[0] + frac * (w[1] - w[0]));
                let clearance = (0..n)
                    .filter(|&k| k != i)
                    .map(|k| {
                        let (c, e) = poly.side(k);
                        point_segment_distance(m, c, e)
                    })
                    .fold(f64::INFINITY, f64::min);
                let eta = 0.25 * clearance.min(piece * frac.min(1.0 - frac));
                if eta <= line_tol {
                    continue;
                }
                let candidates = [m + normal * eta, m - normal * eta];
                let clear_of_lines = candidates.iter().all(|&p| {
                    (0..n).all(|k| {
                        let (c, e) = poly.side(k);
                        c == e || point_line_distance(p, c, e) > line_tol
                    })
                });
                if clear_of_lines {
                    out.extend(candidates);
                    break 'placement;
                }
            }
        }
    }
    out
}

/// Searches for a point off every side-supporting line around which the
/// polygon winds at least twice. Face samples are tried first, then jittered
/// stratified samples over the bounding box, until `budget` points have been
/// examined.
pub fn find_multiwound_witness(poly: &LabelledPolygon, budget: usize) -> Option<PlanePoint> {
    if poly.check_sides().is_err() {
        return None;
    }
    let mut used = 0;
    let hit = |p: PlanePoint| matches!(winding_number(poly, p), Ok(w) if w >= 2);
    for p in face_samples(poly) {
        if used >= budget {
            return None;
        }
        used += 1;
        if hit(p) {
            return Some(p);
        }
    }
    let remaining = budget - used;
    if remaining == 0 {
        return None;
    }
    let n = poly.len();
    let line_tol = COINCIDENCE_TOL * poly.scale().max(f64::MIN_POSITIVE) * 10.0;
    let (lo, hi) = poly.bounding_box();
    let cells = (remaining as f64).sqrt().floor().max(1.0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0005_eed0_fa11);
    let span = hi - lo;
    for r in 0..cells {
        for c in 0..cells {
            let x = lo.re + span.re * (c as f64 + rng.random::<f64>()) / cells as f64;
            let y = lo.im + span.im * (r as f64 + rng.random::<f64>()) / cells as f64;
            let p = PlanePoint::new(x, y);
            let off_lines = (0..n).all(|k| {
                let (a, b) = poly.side(k);
                point_line_distance(p, a, b) > line_tol
            });
            if off_lines && hit(p) {
                return Some(p);
            }
        }
    }
    None
}
