//! Quadrature for the Schwarz–Christoffel integrand
//! `∏_{j<n} (ζ - z_j)^(α_j - 1)`.
//!
//! Paths are cut into panels. A panel that starts at a prevertex carries the
//! endpoint singularity in a Gauss–Jacobi weight; every other panel uses
//! Gauss–Legendre. Panel lengths obey the half-distance rule: no singularity
//! other than a panel's own singular endpoint comes closer to the panel than
//! the panel's length, so panels shrink geometrically toward foreign
//! singularities. Accuracy is controlled by comparing successive levels of
//! rule order (8, 16, 32, 64 points per panel).

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::scmap::{ExponentVector, ScMap};
use crate::{Error, Result};

mod rule;

pub use rule::{gauss_jacobi, jacobi_mass, QuadratureRule};

/// Points per panel at the coarsest level.
pub const BASE_ORDER: usize = 8;
const LEVELS: usize = 4;
const MAX_PANELS: usize = 4000;

fn level_order(level: usize) -> usize {
    BASE_ORDER << level
}

fn legendre(level: usize) -> &'static QuadratureRule {
    static RULES: [OnceLock<QuadratureRule>; LEVELS] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    RULES[level].get_or_init(|| gauss_jacobi(level_order(level), 0.0, 0.0).expect("legendre"))
}

/// Logarithm on the closed upper half-plane agreeing with `ln` on `(0, ∞)`.
/// Points on (or rounded just below) the real axis get argument exactly `0`
/// or `π`.
#[inline]
pub(crate) fn branch_log(w: Complex64) -> Complex64 {
    if w.im <= 0.0 {
        if w.re > 0.0 {
            Complex64::new(w.re.ln(), 0.0)
        } else {
            Complex64::new((-w.re).ln(), PI)
        }
    } else {
        Complex64::new(w.norm().ln(), w.im.atan2(w.re))
    }
}

/// Something integrable by the panel engine: a smooth factor times powers
/// `(ζ - s_k)^(e_k)` at finitely many singular points `s_k`.
trait Integrand {
    fn singularities(&self) -> &[Complex64];
    /// Integrand at `ζ`, omitting the factor of singularity `skip`.
    fn eval(&self, zeta: Complex64, skip: Option<usize>) -> Complex64;
    /// `(h)^(e_k)` on the branch used by the integrand, for `ζ - s_k = h`.
    fn singular_power(&self, k: usize, h: Complex64) -> Complex64;
    /// Slot in the [`RuleBook`] holding the Jacobi rules for singularity `k`.
    fn rule_slot(&self, k: usize) -> usize;
}

/// Gauss–Jacobi rules for a fixed set of endpoint exponents, built lazily per
/// level. Safe to share between threads.
#[derive(Debug)]
pub struct RuleBook {
    exponents: Vec<f64>,
    rules: Vec<[OnceLock<QuadratureRule>; LEVELS]>,
}

impl RuleBook {
    fn new(exponents: Vec<f64>) -> Self {
        let rules = exponents.iter().map(|_| Default::default()).collect();
        RuleBook { exponents, rules }
    }

    fn jacobi(&self, slot: usize, level: usize) -> Result<&QuadratureRule> {
        if let Some(r) = self.rules[slot][level].get() {
            return Ok(r);
        }
        let r = gauss_jacobi(level_order(level), 0.0, self.exponents[slot])?;
        Ok(self.rules[slot][level].get_or_init(|| r))
    }
}

/// Largest panel length from `p` in unit direction `dir` that keeps the
/// panel at least its own length away from `s`.
fn admissible_length(p: Complex64, dir: Complex64, s: Complex64) -> f64 {
    let rel = (s - p) * dir.conj();
    let (t, h) = (rel.re, rel.im.abs());
    if t <= 0.0 {
        (s - p).norm()
    } else if h >= t {
        h
    } else {
        (t * t + h * h) / (2.0 * t)
    }
}

struct Sum {
    value: Complex64,
    magnitude: f64,
}

/// Integral from `start` to a regular point `end`, where `start` may be the
/// singular point `sing`.
fn compound<I: Integrand>(
    f: &I,
    book: &RuleBook,
    start: Complex64,
    end: Complex64,
    sing: Option<usize>,
    level: usize,
) -> Result<Sum> {
    let mut p = start;
    let mut first = true;
    let mut value = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for _ in 0..MAX_PANELS {
        let rem = (end - p).norm();
        if rem == 0.0 {
            return Ok(Sum { value, magnitude });
        }
        let dir = (end - p) / rem;
        let mut len = rem;
        for (k, &s) in f.singularities().iter().enumerate() {
            if first && sing == Some(k) {
                continue;
            }
            len = len.min(admissible_length(p, dir, s));
        }
        let q = if len >= rem { end } else { p + dir * len };
        let half = (q - p) * 0.5;
        let contribution = match sing.filter(|_| first) {
            Some(k) => {
                let rule = book.jacobi(f.rule_slot(k), level)?;
                let scale = f.singular_power(k, half) * half;
                rule.apply(|x| f.eval(p + half * (1.0 + x), Some(k))) * scale
            }
            None => {
                let mid = (p + q) * 0.5;
                legendre(level).apply(|x| f.eval(mid + half * x, None)) * half
            }
        };
        if !contribution.re.is_finite() || !contribution.im.is_finite() {
            return Err(Error::NoConvergence("non-finite panel contribution".into()));
        }
        value += contribution;
        magnitude += contribution.norm();
        p = q;
        first = false;
    }
    let nearest = f
        .singularities()
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - p).norm().total_cmp(&(b.1 - p).norm()))
        .map(|(k, _)| k)
        .unwrap_or(0);
    Err(Error::PathThroughSingularity(nearest))
}

/// Straight leg between two points, each possibly a singular point.
fn leg<I: Integrand>(
    f: &I,
    book: &RuleBook,
    a: Complex64,
    b: Complex64,
    sa: Option<usize>,
    sb: Option<usize>,
    level: usize,
) -> Result<Sum> {
    match (sa, sb) {
        (_, _) if a == b => Ok(Sum { value: Complex64::new(0.0, 0.0), magnitude: 0.0 }),
        (Some(_), Some(_)) => {
            let m = (a + b) * 0.5;
            let left = compound(f, book, a, m, sa, level)?;
            let right = compound(f, book, b, m, sb, level)?;
            Ok(Sum { value: left.value - right.value, magnitude: left.magnitude + right.magnitude })
        }
        (None, Some(_)) => {
            let r = compound(f, book, b, a, sb, level)?;
            Ok(Sum { value: -r.value, magnitude: r.magnitude })
        }
        (_, None) => compound(f, book, a, b, sa, level),
    }
}

/// Runs `at_level` at increasing levels until two successive results agree
/// to `tol` relative to the summed panel magnitudes.
fn refine<F>(tol: f64, mut at_level: F) -> Result<Complex64>
where
    F: FnMut(usize) -> Result<Sum>,
{
    let mut prev = at_level(0)?;
    for level in 1..LEVELS {
        let cur = at_level(level)?;
        let scale = cur.magnitude.max(f64::MIN_POSITIVE);
        if (cur.value - prev.value).norm() <= tol * scale {
            return Ok(cur.value);
        }
        prev = cur;
    }
    Err(Error::NoConvergence(format!(
        "quadrature did not reach relative tolerance {tol:e} at {} points per panel",
        level_order(LEVELS - 1)
    )))
}

struct ScIntegrand<'a> {
    points: Vec<Complex64>,
    exps: &'a [f64],
}

impl Integrand for ScIntegrand<'_> {
    fn singularities(&self) -> &[Complex64] {
        &self.points
    }

    #[inline]
    fn eval(&self, zeta: Complex64, skip: Option<usize>) -> Complex64 {
        let mut log = Complex64::new(0.0, 0.0);
        for (k, (s, e)) in self.points.iter().zip(self.exps).enumerate() {
            if skip != Some(k) {
                log += branch_log(zeta - s) * *e;
            }
        }
        log.exp()
    }

    fn singular_power(&self, k: usize, h: Complex64) -> Complex64 {
        (branch_log(h) * self.exps[k]).exp()
    }

    fn rule_slot(&self, k: usize) -> usize {
        k
    }
}

/// Tail integrand after the substitution `ζ = σ / v`:
/// `v^(α_n - 1) ∏ (1 - σ z_k v)^(α_k - 1)` on `v > 0`, real and positive.
struct TailIntegrand<'a> {
    sign: f64,
    z: &'a [f64],
    exps: &'a [f64],
    tail_exp: f64,
    /// `v = 0` first, then the zeros of `1 - σ z_k v` on the positive axis.
    points: Vec<Complex64>,
    slot: usize,
}

impl<'a> TailIntegrand<'a> {
    fn new(sign: f64, z: &'a [f64], exps: &'a [f64], tail_exp: f64) -> Self {
        let mut points = vec![Complex64::new(0.0, 0.0)];
        points.extend(
            z.iter().filter(|&&zk| sign * zk > 0.0).map(|&zk| Complex64::new(1.0 / (sign * zk), 0.0)),
        );
        TailIntegrand { sign, z, exps, tail_exp, points, slot: exps.len() }
    }
}

impl Integrand for TailIntegrand<'_> {
    fn singularities(&self) -> &[Complex64] {
        &self.points
    }

    fn eval(&self, v: Complex64, skip: Option<usize>) -> Complex64 {
        let v = v.re;
        let mut log = 0.0;
        for (zk, e) in self.z.iter().zip(self.exps) {
            log += e * (1.0 - self.sign * zk * v).ln();
        }
        if skip != Some(0) {
            log += self.tail_exp * v.ln();
        }
        Complex64::new(log.exp(), 0.0)
    }

    fn singular_power(&self, _k: usize, h: Complex64) -> Complex64 {
        Complex64::new(h.re.powf(self.tail_exp), 0.0)
    }

    fn rule_slot(&self, _k: usize) -> usize {
        self.slot
    }
}

/// Reusable integrator for a fixed exponent vector; prevertices are supplied
/// per call so a parameter solve can vary them without rebuilding rules.
#[derive(Debug)]
pub struct ScIntegrator {
    /// `α_j - 1` for `j < n`.
    exps: Vec<f64>,
    /// `α_n - 1`, the exponent at infinity after inversion.
    tail_exp: f64,
    book: RuleBook,
}

impl ScIntegrator {
    pub fn new(exponents: &ExponentVector) -> Self {
        let alphas = exponents.alphas();
        let n = alphas.len();
        let exps: Vec<f64> = alphas[..n - 1].iter().map(|a| a - 1.0).collect();
        let tail_exp = alphas[n - 1] - 1.0;
        let mut slots = exps.clone();
        slots.push(tail_exp);
        ScIntegrator { exps, tail_exp, book: RuleBook::new(slots) }
    }

    fn check_prevertices(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.exps.len() {
            return Err(Error::CountMismatch { expected: self.exps.len(), got: z.len() });
        }
        Ok(())
    }

    fn integrand<'a>(&'a self, z: &[f64]) -> ScIntegrand<'a> {
        ScIntegrand { points: z.iter().map(|&x| Complex64::new(x, 0.0)).collect(), exps: &self.exps }
    }

    /// Path integral of the bare integrand from `from` to `to`.
    ///
    /// Two real endpoints are joined along the real axis, passing through any
    /// prevertices in between (the integrand is integrable there). Otherwise
    /// the path is the straight segment, which meets the real axis at most at
    /// its endpoints.
    pub fn integrate(&self, z: &[f64], from: Complex64, to: Complex64, tol: f64) -> Result<Complex64> {
        self.check_prevertices(z)?;
        for w in [from, to] {
            if !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::NonFinite);
            }
            if w.im < 0.0 {
                return Err(Error::OutsideHalfPlane(w));
            }
        }
        if from == to {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let f = self.integrand(z);
        let index = |w: Complex64| {
            if w.im == 0.0 {
                z.iter().position(|&zk| zk == w.re)
            } else {
                None
            }
        };
        let mut waypoints = vec![(from, index(from))];
        if from.im == 0.0 && to.im == 0.0 {
            let (lo, hi) = (from.re.min(to.re), from.re.max(to.re));
            let mut inner: Vec<(Complex64, Option<usize>)> = z
                .iter()
                .enumerate()
                .filter(|(_, &zk)| lo < zk && zk < hi)
                .map(|(k, &zk)| (Complex64::new(zk, 0.0), Some(k)))
                .collect();
            if to.re < from.re {
                inner.reverse();
            }
            waypoints.extend(inner);
        }
        waypoints.push((to, index(to)));
        refine(tol, |level| {
            let mut total = Sum { value: Complex64::new(0.0, 0.0), magnitude: 0.0 };
            for w in waypoints.windows(2) {
                let s = leg(&f, &self.book, w[0].0, w[1].0, w[0].1, w[1].1, level)?;
                total.value += s.value;
                total.magnitude += s.magnitude;
            }
            Ok(total)
        })
    }

    /// `∫_{X}^{σ∞}` of the bare integrand in the `v = σ/ζ` variable, as a real
    /// number; the caller supplies the phase.
    fn tail(&self, z: &[f64], sign: f64, x_abs: f64, tol: f64) -> Result<f64> {
        let f = TailIntegrand::new(sign, z, &self.exps, self.tail_exp);
        let end = Complex64::new(1.0 / x_abs, 0.0);
        let origin = Complex64::new(0.0, 0.0);
        let v = refine(tol, |level| compound(&f, &self.book, origin, end, Some(0), level))?;
        Ok(v.re)
    }

    /// Fixed real waypoint to the right of every prevertex.
    pub fn right_waypoint(z: &[f64]) -> f64 {
        let (first, last) = (z[0], z[z.len() - 1]);
        last.max(0.0) + 1.0 + (last - first)
    }

    /// Mirror image of [`Self::right_waypoint`] to the left of every prevertex.
    pub fn left_waypoint(z: &[f64]) -> f64 {
        let (first, last) = (z[0], z[z.len() - 1]);
        first.min(0.0) - 1.0 - (last - first)
    }

    /// `∫_{from}^{+∞}` along the real axis, `from > z_{n-1}`.
    pub fn to_infinity(&self, z: &[f64], from: f64, tol: f64) -> Result<Complex64> {
        self.check_prevertices(z)?;
        if !(from > z[z.len() - 1]) {
            return Err(Error::InvalidConfig(format!(
                "tail start {from} must exceed the last finite prevertex"
            )));
        }
        let r = Self::right_waypoint(z).max(from);
        let finite = self.integrate(z, Complex64::new(from, 0.0), Complex64::new(r, 0.0), tol)?;
        Ok(finite + self.tail(z, 1.0, r, tol)?)
    }

    /// `∫_{-∞}^{to}` along the real axis, `to < z_1`.
    pub fn from_neg_infinity(&self, z: &[f64], to: f64, tol: f64) -> Result<Complex64> {
        self.check_prevertices(z)?;
        if !(to < z[0]) {
            return Err(Error::InvalidConfig(format!(
                "tail end {to} must precede the first prevertex"
            )));
        }
        let l = Self::left_waypoint(z).min(to);
        let finite = self.integrate(z, Complex64::new(l, 0.0), Complex64::new(to, 0.0), tol)?;
        let total_exp: f64 = self.exps.iter().sum();
        let phase = Complex64::from_polar(1.0, PI * total_exp);
        Ok(finite + phase * self.tail(z, -1.0, -l, tol)?)
    }

    /// Side vectors `w_{j+1} - w_j` of the bare polygon (`A = 1`, `B = 0`)
    /// for `j = 1..n`, each integrated along the real axis between its own
    /// prevertices; the last two pass through infinity.
    pub fn side_vectors(&self, z: &[f64], tol: f64) -> Result<Vec<Complex64>> {
        self.check_prevertices(z)?;
        let m = z.len();
        let mut sides = Vec::with_capacity(m + 1);
        for j in 0..m - 1 {
            sides.push(self.integrate(
                z,
                Complex64::new(z[j], 0.0),
                Complex64::new(z[j + 1], 0.0),
                tol,
            )?);
        }
        let r = Self::right_waypoint(z);
        sides.push(
            self.integrate(z, Complex64::new(z[m - 1], 0.0), Complex64::new(r, 0.0), tol)?
                + self.tail(z, 1.0, r, tol)?,
        );
        let l = Self::left_waypoint(z);
        sides.push(self.from_neg_infinity(z, l, tol)? + self.integrate(
            z,
            Complex64::new(l, 0.0),
            Complex64::new(z[0], 0.0),
            tol,
        )?);
        Ok(sides)
    }
}

/// Path integral of the bare integrand of `map` from `z_from` to `z_to`.
pub fn integrate_sc(map: &ScMap, z_from: Complex64, z_to: Complex64, tol: f64) -> Result<Complex64> {
    ScIntegrator::new(map.exponents()).integrate(map.prevertices().points(), z_from, z_to, tol)
}

/// `∫_{z_from}^{∞}` of the bare integrand along the real axis.
pub fn integrate_to_infinity(map: &ScMap, z_from: f64, tol: f64) -> Result<Complex64> {
    ScIntegrator::new(map.exponents()).to_infinity(map.prevertices().points(), z_from, tol)
}
