//! Global coordinates on the parameter space.
//!
//! The prevertex part uses logarithms of successive gaps,
//! `(log z_3, log(z_4 - z_3), ..., log(z_{n-1} - z_{n-2}))`. The exponent
//! part uses radial coordinates about the barycenter of the open polytope
//! `{α ∈ (0, 2)^n : Σ α_j = n - 2}`: a point at distance `r` along unit
//! direction `u` goes to `r / (ρ(u) - r) · u`, where `ρ(u)` is the distance to
//! the boundary along `u`. Directions are expressed in the orthonormal basis
//! obtained by Gram–Schmidt on `e_1 - e_2, e_2 - e_3, ..., e_{n-1} - e_n`.

use serde::{Deserialize, Serialize};

use crate::scmap::{ExponentVector, Mode, Prevertices, ScMap};
use crate::{Error, Result};

/// Exponents closer than this to `0` or `2` count as boundary points.
const BOUNDARY_TOL: f64 = 1e-14;

/// A point of `R^(2n-4)` split into `n - 3` prevertex coordinates and `n - 1`
/// exponent coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChartJson", into = "ChartJson")]
pub struct ChartPoint {
    n: usize,
    z: Vec<f64>,
    a: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ChartJson {
    n: usize,
    z: Vec<f64>,
    a: Vec<f64>,
}

impl TryFrom<ChartJson> for ChartPoint {
    type Error = Error;

    fn try_from(raw: ChartJson) -> Result<Self> {
        ChartPoint::new(raw.n, raw.z, raw.a)
    }
}

impl From<ChartPoint> for ChartJson {
    fn from(p: ChartPoint) -> Self {
        ChartJson { n: p.n, z: p.z, a: p.a }
    }
}

impl ChartPoint {
    pub fn new(n: usize, z: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        if z.len() != n - 3 {
            return Err(Error::CountMismatch { expected: n - 3, got: z.len() });
        }
        if a.len() != n - 1 {
            return Err(Error::CountMismatch { expected: n - 1, got: a.len() });
        }
        if z.iter().chain(&a).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ChartPoint { n, z, a })
    }

    /// Splits a flat vector of length `2n - 4`.
    pub fn from_flat(n: usize, coords: &[f64]) -> Result<Self> {
        if n < 3 || coords.len() != 2 * n - 4 {
            return Err(Error::CountMismatch { expected: (2 * n).saturating_sub(4), got: coords.len() });
        }
        Self::new(n, coords[..n - 3].to_vec(), coords[n - 3..].to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.z.len() + self.a.len()
    }

    pub fn flat(&self) -> Vec<f64> {
        self.z.iter().chain(&self.a).copied().collect()
    }

    /// Largest coordinate difference.
    pub fn sup_distance(&self, other: &ChartPoint) -> f64 {
        self.flat().iter().zip(other.flat()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

pub fn z_chart(prevertices: &Prevertices) -> Result<Vec<f64>> {
    if !prevertices.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let p = prevertices.points();
    Ok(p[1..].windows(2).map(|w| (w[1] - w[0]).ln()).collect())
}

pub fn z_unchart(coords: &[f64]) -> Result<Prevertices> {
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut rest = Vec::with_capacity(coords.len());
    let mut z = 0.0;
    for c in coords {
        z += c.exp();
        rest.push(z);
    }
    Prevertices::normalized(&rest)
}

/// Orthonormal basis of `{v ∈ R^n : Σ v_j = 0}`, row `k` built from
/// `e_k - e_{k+1}` by modified Gram–Schmidt.
pub fn direction_basis(n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        v[k + 1] = -1.0;
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    basis
}

fn barycenter(n: usize) -> f64 {
    (n as f64 - 2.0) / n as f64
}

/// Distance from the barycenter to the boundary along unit direction `u`.
fn boundary_distance(u: &[f64], c: f64) -> f64 {
    u.iter()
        .filter(|&&x| x != 0.0)
        .map(|&x| if x > 0.0 { (2.0 - c) / x } else { c / -x })
        .fold(f64::INFINITY, f64::min)
}

pub fn a_chart(exponents: &ExponentVector) -> Result<Vec<f64>> {
    let alphas = exponents.alphas();
    if alphas.iter().any(|&a| !(a > BOUNDARY_TOL && a < 2.0 - BOUNDARY_TOL)) {
        return Err(Error::OnBoundary);
    }
    let n = alphas.len();
    let c = barycenter(n);
    let v: Vec<f64> = alphas.iter().map(|a| a - c).collect();
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if r == 0.0 {
        return Ok(vec![0.0; n - 1]);
    }
    let u: Vec<f64> = v.iter().map(|x| x / r).collect();
    let rho = boundary_distance(&u, c);
    let s = r / (rho - r);
    Ok(direction_basis(n)
        .iter()
        .map(|b| s * b.iter().zip(&u).map(|(x, y)| x * y).sum::<f64>())
        .collect())
}

pub fn a_unchart(coords: &[f64]) -> Result<ExponentVector> {
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = coords.len() + 1;
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let c = barycenter(n);
    let s = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
    if s == 0.0 {
        return ExponentVector::standard(vec![c; n]);
    }
    let mut u = vec![0.0; n];
    for (b, &k) in direction_basis(n).iter().zip(coords) {
        u.iter_mut().zip(b).for_each(|(x, y)| *x += k / s * y);
    }
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    u.iter_mut().for_each(|x| *x /= norm);
    let rho = boundary_distance(&u, c);
    // ρ - r computed directly so the component that heads for the boundary
    // keeps its tiny slack.
    let gap = rho / (1.0 + s);
    let mut alphas: Vec<f64> = u
        .iter()
        .map(|&x| {
            if x < 0.0 {
                (c - rho * -x).max(0.0) + gap * -x
            } else if x > 0.0 {
                2.0 - ((2.0 - c - rho * x).max(0.0) + gap * x)
            } else {
                c
            }
        })
        .map(|a| a.clamp(f64::MIN_POSITIVE, 2.0 - f64::EPSILON))
        .collect();
    fix_sum(&mut alphas);
    ExponentVector::new(alphas, Mode::Standard)
}

/// Adjusts one component, preferring those farthest from the boundary, so
/// that the left-to-right floating sum equals `n - 2` exactly. The sum is
/// monotone in each component, so an ulp walk either hits the target or steps
/// over it; in the latter case the next component is tried.
pub(crate) fn fix_sum(alphas: &mut [f64]) {
    let target = alphas.len() as f64 - 2.0;
    let defect = |a: &[f64]| target - a.iter().sum::<f64>();
    if defect(alphas) == 0.0 {
        return;
    }
    let slack = |a: f64| a.min(2.0 - a);
    let mut order: Vec<usize> = (0..alphas.len()).collect();
    order.sort_by(|&i, &j| slack(alphas[j]).total_cmp(&slack(alphas[i])));
    let mut best = alphas.to_vec();
    for &k in &order {
        let mut trial = alphas.to_vec();
        trial[k] += defect(&trial);
        for _ in 0..64 {
            let d = defect(&trial);
            if d.abs() < defect(&best).abs() {
                best.clone_from(&trial);
            }
            if d == 0.0 {
                alphas.copy_from_slice(&trial);
                return;
            }
            let next = if d > 0.0 { trial[k].next_up() } else { trial[k].next_down() };
            trial[k] = next;
            if defect(&trial).signum() == -d.signum() && defect(&trial) != 0.0 {
                break;
            }
        }
    }
    alphas.copy_from_slice(&best);
}

/// Chart coordinates of a normalized standard-mode map; `A` and `B` are
/// ignored.
pub fn moduli_chart(map: &ScMap) -> Result<ChartPoint> {
    if map.mode() != Mode::Standard {
        return Err(Error::OnBoundary);
    }
    let z = z_chart(map.prevertices())?;
    let a = a_chart(map.exponents())?;
    ChartPoint::new(map.n(), z, a)
}

pub fn moduli_unchart(point: &ChartPoint) -> Result<(Prevertices, ExponentVector)> {
    Ok((z_unchart(point.z())?, a_unchart(point.a())?))
}
