//! Randomized simplicity sweeps over the moduli chart.
//!
//! Sample `i` draws its chart coordinates from ChaCha8 seeded with `seed`
//! on stream `i`, so results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charts::{moduli_unchart, ChartPoint};
use crate::exec::{map_indexed, map_indexed_serial};
use crate::geometry::{find_multiwound_witness, is_simple, winding_number, PlanePoint};
use crate::scmap::forward;
use crate::{Error, Result, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_box")]
    pub chart_box: f64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_box() -> f64 {
    3.0
}

fn default_budget() -> usize {
    4096
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl SweepConfig {
    pub fn new(n: usize, samples: usize, seed: u64) -> Self {
        SweepConfig { n, samples, seed, chart_box: default_box(), budget: default_budget(), tol: default_tol() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::TooFewVertices(self.n));
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        if !(self.chart_box > 0.0 && self.chart_box.is_finite()) {
            return Err(Error::InvalidConfig("chart_box must be positive and finite".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidConfig("tol must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Chart point of sample `index`.
    pub fn sample(&self, index: usize) -> ChartPoint {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let coords: Vec<f64> =
            (0..2 * self.n - 4).map(|_| rng.random_range(-self.chart_box..=self.chart_box)).collect();
        ChartPoint::from_flat(self.n, &coords).expect("dimension matches n")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonsimpleInstance {
    pub index: usize,
    pub chart: ChartPoint,
    /// `None` when the witness search ran out of budget.
    pub witness: Option<PlanePoint>,
    pub winding: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub tested: usize,
    pub simple_count: usize,
    pub nonsimple_instances: Vec<NonsimpleInstance>,
    pub failures: usize,
}

enum Outcome {
    Simple,
    Nonsimple(NonsimpleInstance),
    Failed,
}

fn run_sample(cfg: &SweepConfig, index: usize) -> Outcome {
    let chart = cfg.sample(index);
    let attempt = || -> Result<Outcome> {
        let (z, alphas) = moduli_unchart(&chart)?;
        let poly = forward(&z, &alphas, cfg.tol)?;
        if is_simple(&poly)? {
            return Ok(Outcome::Simple);
        }
        let witness = find_multiwound_witness(&poly, cfg.budget);
        let winding = match witness {
            Some(p) => winding_number(&poly, p)?,
            None => 0,
        };
        Ok(Outcome::Nonsimple(NonsimpleInstance { index, chart: chart.clone(), witness, winding }))
    };
    attempt().unwrap_or(Outcome::Failed)
}

fn collect(outcomes: Vec<Outcome>) -> SweepResult {
    let mut result =
        SweepResult { tested: outcomes.len(), simple_count: 0, nonsimple_instances: Vec::new(), failures: 0 };
    for o in outcomes {
        match o {
            Outcome::Simple => result.simple_count += 1,
            Outcome::Nonsimple(inst) => result.nonsimple_instances.push(inst),
            Outcome::Failed => result.failures += 1,
        }
    }
    result
}

/// Runs the sweep, in parallel when the `parallel` feature is on.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    Ok(collect(map_indexed(cfg.samples, |i| run_sample(cfg, i))))
}

/// Same as [`sweep`] on the calling thread.
pub fn sweep_serial(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    Ok(collect(map_indexed_serial(cfg.samples, |i| run_sample(cfg, i))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_depend_only_on_index() {
        let cfg = SweepConfig::new(6, 10, 42);
        assert_eq!(cfg.sample(7), cfg.sample(7));
        assert_ne!(cfg.sample(7), cfg.sample(8));
        assert!(cfg.sample(3).flat().iter().all(|x| x.abs() <= 3.0));
    }

    #[test]
    fn validation() {
        assert!(SweepConfig::new(5, 0, 1).validate().is_err());
        assert!(SweepConfig { chart_box: 0.0, ..SweepConfig::new(5, 1, 1) }.validate().is_err());
        assert!(SweepConfig::new(2, 1, 1).validate().is_err());
    }

    #[test]
    fn counts_add_up() {
        let r = sweep(&SweepConfig::new(4, 20, 3)).unwrap();
        assert_eq!(r.tested, r.simple_count + r.nonsimple_instances.len() + r.failures);
        assert_eq!(r.simple_count, 20);
    }
}
