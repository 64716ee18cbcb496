//! The parameter problem: recover the normalized map behind a polygon.
//!
//! Exponents are read off the interior angles. The free prevertices are
//! parametrized by log-gaps (the same coordinates as [`crate::charts::z_chart`]),
//! so any real vector of unknowns gives admissible, increasing prevertices.
//! The gaps are found by Levenberg–Marquardt on side-length ratios, and the
//! constants `A`, `B` are then fitted to the target.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charts::{fix_sum, z_unchart};
use crate::exec::map_indexed;
use crate::geometry::{interior_angles, LabelledPolygon, ANGLE_TOL};
use crate::quadrature::ScIntegrator;
use crate::scmap::{ExponentVector, ScMap};
use crate::{Error, Result};

/// Relative step of the central-difference Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-5;
/// Reconstruction mismatch, relative to the target diameter, above which a
/// converged solve is flagged.
pub const RECONSTRUCTION_TOL: f64 = 1e-6;
/// Largest accepted change of any log-gap in one iteration.
const MAX_STEP: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub quadrature_tol: f64,
    pub initial_gaps: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_iterations: 200, residual_tol: 1e-10, quadrature_tol: 1e-11, initial_gaps: None }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if !(self.quadrature_tol > 0.0) || !(self.residual_tol > self.quadrature_tol) {
            return Err(Error::InvalidConfig(
                "tolerances must satisfy 0 < quadrature_tol < residual_tol".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual_norm: f64,
    /// Residual norm at the start and after every accepted step.
    pub residual_history: Vec<f64>,
    /// `max_j |A u_j + B - w_j|` over the target diameter.
    pub reconstruction_error: f64,
    pub reconstruction_ok: bool,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub map: ScMap,
    pub report: SolveReport,
}

impl Solution {
    /// Turns an unconverged solve into [`Error::SolveFailed`].
    pub fn into_result(self) -> Result<Self> {
        if self.report.converged {
            Ok(self)
        } else {
            Err(Error::SolveFailed(Box::new(self.report)))
        }
    }
}

/// `α_j = θ_j / π`, with the rounding defect of `Σ α_j` spread evenly.
pub fn extract_exponents(poly: &LabelledPolygon) -> Result<ExponentVector> {
    let angles = interior_angles(poly)?;
    let n = poly.len();
    if let Some(j) = angles.straight_vertices(ANGLE_TOL).first() {
        return Err(Error::NotImmersedInput(format!("interior angle at vertex {j} is not in (0, 2π)")));
    }
    let expected = (n as f64 - 2.0) * PI;
    if (angles.sum() - expected).abs() > ANGLE_TOL {
        return Err(Error::NotImmersedInput(format!(
            "interior angles sum to {}, expected {expected}",
            angles.sum()
        )));
    }
    let mut alphas: Vec<f64> = angles.values.iter().map(|t| t / PI).collect();
    let defect = (n as f64 - 2.0 - alphas.iter().sum::<f64>()) / n as f64;
    alphas.iter_mut().for_each(|a| *a += defect);
    fix_sum(&mut alphas);
    ExponentVector::standard(alphas)
}

fn lengths(poly: &LabelledPolygon) -> Result<Vec<f64>> {
    poly.check_sides()?;
    Ok(poly.side_lengths())
}

/// Side-length ratio residual `r_j = s_j / s_1 - t_j / t_1` for the `n - 3`
/// sides `j = 2, ..., n - 2` that avoid the vertex at infinity. `s` are the
/// side lengths of the bare map with prevertices from the log-gaps `gaps`,
/// `t` those of `target`.
pub fn side_length_residual(
    gaps: &[f64],
    exponents: &ExponentVector,
    target: &LabelledPolygon,
    tol: f64,
) -> Result<Vec<f64>> {
    let n = exponents.len();
    if gaps.len() != n - 3 || target.len() != n {
        return Err(Error::CountMismatch { expected: n - 3, got: gaps.len() });
    }
    if n == 3 {
        return Ok(Vec::new());
    }
    let t = lengths(target)?;
    let z = z_unchart(gaps)?;
    let integ = ScIntegrator::new(exponents);
    let z = z.points();
    let s: Vec<f64> = (0..n - 2)
        .map(|j| {
            integ
                .integrate(z, Complex64::new(z[j], 0.0), Complex64::new(z[j + 1], 0.0), tol)
                .map(|v| v.norm())
        })
        .collect::<Result<_>>()?;
    Ok((1..n - 2).map(|j| s[j] / s[0] - t[j] / t[0]).collect())
}

/// Residual driven by the solver: log side-length ratios against side 1 for
/// every other side, including the two that meet the vertex at infinity.
struct LogRatioResidual<'a> {
    integ: ScIntegrator,
    target_logs: Vec<f64>,
    tol: f64,
    _exponents: &'a ExponentVector,
}

impl<'a> LogRatioResidual<'a> {
    fn new(exponents: &'a ExponentVector, target: &LabelledPolygon, tol: f64) -> Result<Self> {
        let t = lengths(target)?;
        let target_logs = t[1..].iter().map(|x| (x / t[0]).ln()).collect();
        Ok(LogRatioResidual { integ: ScIntegrator::new(exponents), target_logs, tol, _exponents: exponents })
    }

    fn eval(&self, gaps: &[f64]) -> Result<Vec<f64>> {
        let z = z_unchart(gaps)?;
        let sides = self.integ.side_vectors(z.points(), self.tol)?;
        let s0 = sides[0].norm();
        Ok(sides[1..]
            .iter()
            .zip(&self.target_logs)
            .map(|(s, t)| (s.norm() / s0).ln() - t)
            .collect())
    }
}

/// Central-difference Jacobian of `f` at `x`, columns evaluated
/// independently (in parallel when enabled).
pub fn central_jacobian<F>(f: F, x: &[f64], step: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let cols = map_indexed(x.len(), |k| {
        let h = step * x[k].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let (fp, fm) = (f(&xp)?, f(&xm)?);
        Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<f64>>())
    });
    let cols: Vec<Vec<f64>> = cols.into_iter().collect::<Result<_>>()?;
    let rows = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows, x.len(), |i, k| cols[k][i]))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `A = (t_2 - t_1) / (u_2 - u_1)`, `B = t_1 - A u_1`.
pub fn fit_affine_constants(bare: &[Complex64], target: &LabelledPolygon) -> Result<(Complex64, Complex64)> {
    let (u1, u2) = (bare[0], bare[1]);
    let (t1, t2) = (target.vertex(0), target.vertex(1));
    if u1 == u2 || t1 == t2 {
        return Err(Error::DegenerateSide(0, 1));
    }
    let a = (t2 - t1) / (u2 - u1);
    Ok((a, t1 - a * u1))
}

/// Levenberg–Marquardt with Marquardt scaling. Returns the final point, the
/// residual history and the number of accepted steps.
fn levenberg_marquardt<F>(f: &F, start: Vec<f64>, opts: &SolveOptions) -> Result<(Vec<f64>, Vec<f64>, usize)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let mut x = start;
    let mut r = f(&x)?;
    let mut fnorm = norm(&r);
    let mut history = vec![fnorm];
    let mut lambda = 1e-3;
    let mut iterations = 0;
    // Past residual_tol, keep polishing toward the quadrature noise floor so
    // that nearby inputs land on the same answer.
    let polish_target = opts.residual_tol * 1e-3;
    while iterations < opts.max_iterations && fnorm > polish_target {
        let jac = central_jacobian(f, &x, JACOBIAN_STEP)?;
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * DVector::from_column_slice(&r);
        let mut accepted = None;
        for _ in 0..16 {
            let mut lhs = jtj.clone();
            for i in 0..x.len() {
                lhs[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let Some(step) = lhs.lu().solve(&(-&grad)) else {
                lambda *= 4.0;
                continue;
            };
            let largest = step.amax();
            let step = if largest > MAX_STEP { step * (MAX_STEP / largest) } else { step };
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            match f(&trial) {
                Ok(rt) if norm(&rt) < fnorm => {
                    accepted = Some((trial, rt, step.amax()));
                    break;
                }
                _ => lambda *= 4.0,
            }
        }
        let Some((trial, rt, step_size)) = accepted else {
            break;
        };
        lambda = (lambda / 5.0).max(1e-12);
        x = trial;
        r = rt;
        fnorm = norm(&r);
        history.push(fnorm);
        iterations += 1;
        if step_size <= 1e-14 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            break;
        }
    }
    Ok((x, history, iterations))
}

/// Recovers the normalized map whose polygon is `poly` up to similarity.
///
/// A solve that fails to reach `residual_tol` is returned with
/// `converged = false`; see [`Solution::into_result`].
pub fn solve_parameter_problem(poly: &LabelledPolygon, opts: &SolveOptions) -> Result<Solution> {
    opts.validate()?;
    let exponents = extract_exponents(poly)?;
    let n = poly.len();
    let start = match &opts.initial_gaps {
        Some(g) if g.len() != n - 3 => {
            return Err(Error::CountMismatch { expected: n - 3, got: g.len() });
        }
        Some(g) => g.clone(),
        None => vec![0.0; n - 3],
    };
    let (gaps, history, iterations) = if n == 3 {
        (Vec::new(), vec![0.0], 0)
    } else {
        let residual = LogRatioResidual::new(&exponents, poly, opts.quadrature_tol)?;
        levenberg_marquardt(&|g: &[f64]| residual.eval(g), start, opts)?
    };
    let final_residual_norm = *history.last().unwrap_or(&0.0);
    let bare = ScMap::bare(z_unchart(&gaps)?, exponents)?;
    let bare_poly = bare.polygon(opts.quadrature_tol)?;
    let (a, b) = fit_affine_constants(bare_poly.vertices(), poly)?;
    let reconstruction_error = bare_poly
        .vertices()
        .iter()
        .zip(poly.vertices())
        .map(|(u, t)| (a * u + b - t).norm())
        .fold(0.0, f64::max)
        / poly.diameter();
    let report = SolveReport {
        converged: final_residual_norm <= opts.residual_tol,
        iterations,
        final_residual_norm,
        residual_history: history,
        reconstruction_error,
        reconstruction_ok: reconstruction_error <= RECONSTRUCTION_TOL,
    };
    Ok(Solution { map: bare.with_constants(a, b)?, report })
}
