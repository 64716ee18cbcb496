//! Gauss–Jacobi rules for the weight `(1 - x)^a (1 + x)^b` on `[-1, 1]`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Nodes and weights of an `order`-point Gauss–Jacobi rule.
///
/// `exponent_left` is the power of `(1 + x)` and `exponent_right` the power of
/// `(1 - x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exponent_left: f64,
    pub exponent_right: f64,
    pub order: usize,
}

impl QuadratureRule {
    /// Applies the rule to `f` on the reference interval; the weight function
    /// is implicit.
    pub fn apply<T, F>(&self, mut f: F) -> T
    where
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
        F: FnMut(f64) -> T,
    {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

/// Total mass `2^(a+b+1) B(a+1, b+1)` of the Jacobi weight.
pub fn jacobi_mass(a: f64, b: f64) -> f64 {
    ((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0))
    .exp()
}

/// Three-term recurrence coefficients of the monic Jacobi polynomials:
/// diagonal `d_k` for `k < m` and off-diagonal squares `β_k` for `1 <= k <= m`.
fn recurrence(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = a + b;
    let diag = (0..m)
        .map(|k| {
            if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let s = 2.0 * k as f64 + ab;
                (b * b - a * a) / (s * (s + 2.0))
            }
        })
        .collect();
    let beta = (1..=m)
        .map(|k| {
            if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let k = k as f64;
                let s = 2.0 * k + ab;
                4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
            }
        })
        .collect();
    (diag, beta)
}

/// Orthonormal polynomial values `p_0..p_{m-1}` at `x`, plus the scaled
/// degree-`m` polynomial and its derivative (for Newton polishing).
fn evaluate_family(x: f64, diag: &[f64], sqrt_beta: &[f64]) -> (f64, f64, f64) {
    let m = diag.len();
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut dp_prev, mut dp) = (0.0, 0.0);
    let mut sum_sq = 1.0;
    for k in 0..m {
        let off_prev = if k == 0 { 0.0 } else { sqrt_beta[k - 1] };
        let next = (x - diag[k]) * p - off_prev * p_prev;
        let dnext = p + (x - diag[k]) * dp - off_prev * dp_prev;
        if k + 1 < m {
            let s = sqrt_beta[k];
            p_prev = p;
            dp_prev = dp;
            p = next / s;
            dp = dnext / s;
            sum_sq += p * p;
        } else {
            return (sum_sq, next, dnext);
        }
    }
    unreachable!("m >= 1")
}

/// Gauss–Jacobi rule of the given order for the weight `(1 - x)^a (1 + x)^b`.
///
/// Nodes come from the eigenvalues of the symmetric Jacobi matrix and are
/// then polished by Newton's method on the three-term recurrence; weights are
/// the Christoffel numbers `μ_0 / Σ p_k(x_i)^2` of the orthonormal family.
pub fn gauss_jacobi(order: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::InvalidOrder);
    }
    for e in [a, b] {
        if !(e > -1.0) || !e.is_finite() {
            return Err(Error::InvalidExponent(e));
        }
    }
    let (diag, beta) = recurrence(order, a, b);
    let sqrt_beta: Vec<f64> = beta.iter().map(|v| v.sqrt()).collect();
    let mut jac = DMatrix::<f64>::zeros(order, order);
    for k in 0..order {
        jac[(k, k)] = diag[k];
        if k + 1 < order {
            jac[(k, k + 1)] = sqrt_beta[k];
            jac[(k + 1, k)] = sqrt_beta[k];
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let mass = jacobi_mass(a, b);
    let mut weights = Vec::with_capacity(order);
    for x in nodes.iter_mut() {
        for _ in 0..4 {
            let (_, pm, dpm) = evaluate_family(*x, &diag, &sqrt_beta);
            if dpm == 0.0 {
                break;
            }
            let step = pm / dpm;
            if !(step.abs() < 1e-6) {
                break;
            }
            *x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1e-300) {
                break;
            }
        }
        let (sum_sq, _, _) = evaluate_family(*x, &diag, &sqrt_beta);
        weights.push(mass / sum_sq);
    }
    Ok(QuadratureRule { nodes, weights, exponent_left: b, exponent_right: a, order })
}
