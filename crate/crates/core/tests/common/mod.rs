//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's numerical paths.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// `ln Γ(x)` for `x > 0` by upward recurrence and the Stirling series.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 0.0;
    let mut y = x;
    while y < 20.0 {
        shift += y.ln();
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2 * (-1.0 / 1680.0 + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0))))));
    (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + series - shift
}

pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Moments `∫ x^k (1-x)^a (1+x)^b dx`, `k = 0..=kmax`, from the recursion
/// `(a+b+k+2) m_{k+1} = (b-a) m_k + k m_{k-1}`.
pub fn jacobi_moments(a: f64, b: f64, kmax: usize) -> Vec<f64> {
    let mut m = vec![0.0; kmax + 2];
    m[0] = 2f64.powf(a + b + 1.0) * beta(a + 1.0, b + 1.0);
    for k in 0..=kmax {
        let prev = if k == 0 { 0.0 } else { m[k - 1] };
        m[k + 1] = ((b - a) * m[k] + k as f64 * prev) / (a + b + k as f64 + 2.0);
    }
    m.truncate(kmax + 1);
    m
}

/// Tanh–sinh quadrature of `f` on `[a, b]`. `f` receives the point together
/// with its distances to `a` and `b`, computed without cancellation so that
/// endpoint singularities can be evaluated accurately.
pub fn tanh_sinh<F>(a: f64, b: f64, f: F) -> Complex64
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    let half = 0.5 * (b - a);
    let mut prev = Complex64::new(f64::NAN, 0.0);
    let mut h = 0.125;
    for _ in 0..8 {
        let kmax = (4.5 / h) as i64;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in -kmax..=kmax {
            let t = k as f64 * h;
            let u = 0.5 * PI * t.sinh();
            let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
            // distances from the endpoints as fractions of the half-length
            let e = (-2.0 * u.abs()).exp();
            let near = 2.0 * e / (1.0 + e);
            let far = 2.0 - near;
            let (da, db) = if u < 0.0 { (near, far) } else { (far, near) };
            if da == 0.0 || db == 0.0 {
                continue;
            }
            let x = if u < 0.0 { a + half * da } else { b - half * db };
            sum += f(x, half * da, half * db) * w;
        }
        let cur = sum * half * h;
        if (cur - prev).norm() <= 1e-14 * cur.norm() {
            return cur;
        }
        prev = cur;
        h *= 0.5;
    }
    prev
}

/// Bare Schwarz–Christoffel integral along the real axis between
/// consecutive prevertices `z[j]` and `z[j+1]`. Each half of the interval is
/// mapped by `x - z_j = u^(1/α_j)` (and its mirror), which cancels the
/// endpoint singularity exactly; the smooth remainder goes to tanh–sinh.
pub fn side_oracle(z: &[f64], alphas: &[f64], j: usize) -> Complex64 {
    let (a, b) = (z[j], z[j + 1]);
    let mid = 0.5 * (a + b);
    let phase: f64 = alphas[j + 1..z.len()].iter().map(|al| (al - 1.0) * PI).sum();
    let others = |x: f64, skip: usize| -> f64 {
        let mut log = 0.0;
        for (k, (&zk, &al)) in z.iter().zip(alphas).enumerate() {
            if k != skip {
                log += (al - 1.0) * (x - zk).abs().ln();
            }
        }
        log.exp()
    };
    let (aj, ak) = (alphas[j], alphas[j + 1]);
    let left = tanh_sinh(0.0, (mid - a).powf(aj), |u, _, _| {
        let x = a + u.powf(1.0 / aj);
        Complex64::new(others(x, j) / aj, 0.0)
    });
    let right = tanh_sinh(0.0, (b - mid).powf(ak), |u, _, _| {
        let x = b - u.powf(1.0 / ak);
        Complex64::new(others(x, j + 1) / ak, 0.0)
    });
    (left + right) * Complex64::from_polar(1.0, phase)
}

/// Straight-segment integral of an analytic function by composite
/// Gauss–Legendre with recursive bisection (no singular endpoints).
pub fn adaptive_segment<F>(f: &F, a: Complex64, b: Complex64, tol: f64, depth: u32) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    // 10-point Gauss–Legendre nodes/weights (hard-coded).
    const X: [f64; 5] = [
        0.148_874_338_981_631_2,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ];
    const W: [f64; 5] = [
        0.295_524_224_714_752_9,
        0.269_266_719_309_996_4,
        0.219_086_362_515_982,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_1,
    ];
    let gl = |a: Complex64, b: Complex64| {
        let m = (a + b) * 0.5;
        let h = (b - a) * 0.5;
        let mut s = Complex64::new(0.0, 0.0);
        for (x, w) in X.iter().zip(W) {
            s += (f(m + h * *x) + f(m - h * *x)) * w;
        }
        s * h
    };
    let whole = gl(a, b);
    let m = (a + b) * 0.5;
    let split = gl(a, m) + gl(m, b);
    if depth == 0 || (split - whole).norm() <= tol * split.norm().max(1e-300) {
        split
    } else {
        adaptive_segment(f, a, m, tol, depth - 1) + adaptive_segment(f, m, b, tol, depth - 1)
    }
}

/// Bare integrand evaluated directly from its definition, for points off the
/// real axis.
pub fn sc_integrand(z: &[f64], alphas: &[f64], zeta: Complex64) -> Complex64 {
    let mut log = Complex64::new(0.0, 0.0);
    for (&zk, &al) in z.iter().zip(alphas) {
        let w = zeta - zk;
        log += Complex64::new(w.norm().ln(), w.im.atan2(w.re)) * (al - 1.0);
    }
    log.exp()
}

/// Winding number by signed crossings of the rightward horizontal ray.
pub fn winding_by_crossings(vertices: &[Complex64], p: Complex64) -> i64 {
    let n = vertices.len();
    let mut w = 0;
    for j in 0..n {
        let a = vertices[j];
        let b = vertices[(j + 1) % n];
        let cross = (b.re - a.re) * (p.im - a.im) - (p.re - a.re) * (b.im - a.im);
        if a.im <= p.im {
            if b.im > p.im && cross > 0.0 {
                w += 1;
            }
        } else if b.im <= p.im && cross < 0.0 {
            w -= 1;
        }
    }
    w
}

/// Deterministic uniform samples without pulling in the library's RNG setup.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// A non-simple immersed hexagon met in a seeded sweep, kept verbatim.
pub fn frozen_hexagon() -> Vec<Complex64> {
    [
        (-1.439709758244059, 2.389540825859408),
        (-0.6635415721305761, 0.19218648502724678),
        (-0.6693703976979954, 0.18813354185206932),
        (-0.9804651744893584, 1.1991834369597332),
        (-3.968822048604034, -1.4092683727486637),
        (7.535752420343419, -1.4092683727486637),
    ]
    .iter()
    .map(|&(x, y)| Complex64::new(x, y))
    .collect()
}

/// Random exponents with `Σ α = n - 2`, each in `(lo, 2 - lo)`, by rejection.
pub fn random_exponents(rng: &mut Lcg, n: usize, lo: f64) -> Vec<f64> {
    loop {
        let mut a: Vec<f64> = (0..n - 1).map(|_| rng.uniform(lo, 2.0 - lo)).collect();
        let last = n as f64 - 2.0 - a.iter().sum::<f64>();
        if last > lo && last < 2.0 - lo {
            a.push(last);
            return a;
        }
    }
}

/// Random increasing normalized prevertices `(-1, 0, z_3, ...)`.
pub fn random_prevertices(rng: &mut Lcg, n: usize) -> Vec<f64> {
    let mut z = vec![-1.0, 0.0];
    for _ in 3..n {
        let last = *z.last().unwrap();
        z.push(last + rng.uniform(-2.0, 2.0).exp());
    }
    z
}
