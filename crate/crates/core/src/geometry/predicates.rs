//! Orientation and segment-intersection predicates.
//!
//! `orient` runs a floating-point filter with a certified error bound and
//! falls back to exact rational arithmetic when the filter cannot decide.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::PlanePoint;

/// `(3 + 16 eps) * eps` with `eps = 2^-53`.
const CCW_ERRBOUND: f64 = 3.330_669_073_875_471_6e-16;

/// Sign of the oriented area of `(a, b, c)`: `1` for a left turn, `-1` for a
/// right turn, `0` when the three points are exactly collinear.
pub fn orient(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> i8 {
    let detleft = (a.re - c.re) * (b.im - c.im);
    let detright = (a.im - c.im) * (b.re - c.re);
    let det = detleft - detright;
    let bound = CCW_ERRBOUND * (detleft.abs() + detright.abs());
    if det > bound {
        1
    } else if det < -bound {
        -1
    } else {
        orient_exact(a, b, c)
    }
}

fn rational(x: f64) -> BigRational {
    // Finite doubles are dyadic rationals; conversion is exact.
    BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

pub(crate) fn orient_exact(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> i8 {
    let (ax, ay) = (rational(a.re), rational(a.im));
    let (bx, by) = (rational(b.re), rational(b.im));
    let (cx, cy) = (rational(c.re), rational(c.im));
    let det = (&ax - &cx) * (&by - &cy) - (&ay - &cy) * (&bx - &cx);
    if det.is_positive() {
        1
    } else if det.is_negative() {
        -1
    } else {
        0
    }
}

/// For `p` exactly collinear with segment `[a, b]`, whether it lies on the
/// closed segment. Uses only exact comparisons.
fn on_collinear_segment(a: PlanePoint, b: PlanePoint, p: PlanePoint) -> bool {
    let within = |lo: f64, hi: f64, x: f64| lo.min(hi) <= x && x <= lo.max(hi);
    within(a.re, b.re, p.re) && within(a.im, b.im, p.im)
}

/// Whether the closed segments `[p1, p2]` and `[q1, q2]` share a point.
pub fn segments_intersect(p1: PlanePoint, p2: PlanePoint, q1: PlanePoint, q2: PlanePoint) -> bool {
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_collinear_segment(p1, p2, q1))
        || (o2 == 0 && on_collinear_segment(p1, p2, q2))
        || (o3 == 0 && on_collinear_segment(q1, q2, p1))
        || (o4 == 0 && on_collinear_segment(q1, q2, p2))
}

/// Whether adjacent sides `[a, b]` and `[b, c]` meet anywhere besides `b`,
/// i.e. the path folds back onto itself at `b`.
pub fn adjacent_sides_overlap(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> bool {
    if orient(a, b, c) != 0 {
        return false;
    }
    // Exactly collinear: overlap iff a and c lie on the same side of b.
    let same = |x: f64, y: f64, z: f64| (x > y) == (z > y);
    if a.re != b.re {
        same(a.re, b.re, c.re) && c.re != b.re
    } else {
        same(a.im, b.im, c.im) && c.im != b.im
    }
}

/// Euclidean distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: PlanePoint, a: PlanePoint, b: PlanePoint) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// Distance from `p` to the infinite line through `a` and `b` (`a != b`).
pub fn point_line_distance(p: PlanePoint, a: PlanePoint, b: PlanePoint) -> f64 {
    let d = b - a;
    ((p - a) * d.conj()).im.abs() / d.norm()
}
