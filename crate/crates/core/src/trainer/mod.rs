//! Sequential minimal optimization of the circuit parameters.
//!
//! Parameters are visited in ascending index order. For each one the cost
//! is rebuilt as an explicit function of that parameter alone (see
//! [`scalar`]) and the parameter jumps to its minimizer. A sweep is one
//! pass over all parameters; sweeps repeat until the relative change in
//! cost drops below `rel_tol` or `max_sweeps` is reached.

pub mod scalar;
pub mod trig;

use std::f64::consts::TAU;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{sample_probability, CircuitSpec, Theta};
use crate::data::Dataset;
use crate::error::{Error, Result};

pub use scalar::{
    build_scalar_problem, minimize_scalar, phase_poly, scalar_cost, two_photon_coefficients, ProbeMode,
    ScalarProblem, ScalarTerm,
};
pub use trig::{probe_phases, recover_trig_poly, recovery_matrix, TrigPoly};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub max_sweeps: usize,
    pub rel_tol: f64,
    pub grid_size: usize,
    pub refine_iters: usize,
    /// Half-width (radians) of the search window around a weight's current value.
    pub weight_search_halfwidth: f64,
    pub probe: ProbeMode,
    /// Seeds shot sampling; unused in exact modes.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_sweeps: 30,
            rel_tol: 1e-6,
            grid_size: 2048,
            refine_iters: 5,
            weight_search_halfwidth: TAU,
            probe: ProbeMode::Analytic,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, spec: &CircuitSpec) -> Result<()> {
        let min_grid = 2 * (2 * spec.photon_number() + 1);
        if self.grid_size < min_grid {
            return Err(Error::InvalidConfig(format!("grid_size must be at least {min_grid}")));
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::InvalidConfig("rel_tol must be positive".into()));
        }
        if !self.weight_search_halfwidth.is_finite() || self.weight_search_halfwidth <= 0.0 {
            return Err(Error::InvalidConfig("weight_search_halfwidth must be positive".into()));
        }
        if let ProbeMode::Sampled { shots: 0 } = self.probe {
            return Err(Error::ZeroShots);
        }
        Ok(())
    }
}

fn check_data(spec: &CircuitSpec, data: &Dataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.feature_dim() != spec.feature_dim() {
        return Err(Error::DimensionMismatch { expected: spec.feature_dim(), found: data.feature_dim() });
    }
    Ok(())
}

/// Mean squared residual `(1/n) Σ (p(x⁽ⁱ⁾) − y⁽ⁱ⁾)²` with exact probabilities.
pub fn cost(spec: &CircuitSpec, theta: &Theta, data: &Dataset) -> Result<f64> {
    check_data(spec, data)?;
    let mut total = 0.0;
    for p in data.points() {
        let r = spec.forward(theta, &p.x)? - f64::from(p.y);
        total += r * r;
    }
    Ok(total / data.len() as f64)
}

/// [`cost`] with every probability replaced by a `shots`-shot estimate.
pub fn sampled_cost<R: Rng + ?Sized>(
    spec: &CircuitSpec,
    theta: &Theta,
    data: &Dataset,
    shots: u64,
    rng: &mut R,
) -> Result<f64> {
    check_data(spec, data)?;
    let mut total = 0.0;
    for p in data.points() {
        let r = sample_probability(spec.forward(theta, &p.x)?, shots, rng)? - f64::from(p.y);
        total += r * r;
    }
    Ok(total / data.len() as f64)
}

fn sweep_cost<R: Rng + ?Sized>(
    spec: &CircuitSpec,
    theta: &Theta,
    data: &Dataset,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<f64> {
    match config.probe {
        ProbeMode::Sampled { shots } => sampled_cost(spec, theta, data, shots, rng),
        _ => cost(spec, theta, data),
    }
}

/// One pass over all parameters in ascending order. Returns the updated
/// parameters and the cost after the pass (estimated from shots in
/// sampled mode).
pub fn smo_sweep<R: Rng + ?Sized>(
    spec: &CircuitSpec,
    theta: &Theta,
    data: &Dataset,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<(Theta, f64)> {
    check_data(spec, data)?;
    let mut theta = theta.clone();
    for param in 0..spec.param_count() {
        let problem = build_scalar_problem(spec, &theta, data, param, config.probe, rng)?;
        let (s, _) = minimize_scalar(&problem, config);
        theta.set(param, s);
    }
    let after = sweep_cost(spec, &theta, data, config, rng)?;
    Ok((theta, after))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Parameters with the lowest recorded cost.
    pub theta: Theta,
    /// Parameters after the last sweep.
    pub final_theta: Theta,
    /// `history[0]` is the initial cost, `history[k]` the cost after sweep `k`.
    pub history: Vec<f64>,
    /// Index into `history` of the returned parameters.
    pub best_index: usize,
    /// Whether the relative-change criterion fired before `max_sweeps`.
    pub converged: bool,
}

impl TrainOutcome {
    pub fn sweeps(&self) -> usize {
        self.history.len() - 1
    }

    /// Writes `sweep_index,cost` rows.
    pub fn write_history_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["sweep_index", "cost"])?;
        for (k, c) in self.history.iter().enumerate() {
            writer.write_record([k.to_string(), c.to_string()])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Runs sweeps from `theta0` and keeps the lowest-cost parameters seen.
pub fn train(spec: &CircuitSpec, theta0: &Theta, data: &Dataset, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate(spec)?;
    check_data(spec, data)?;
    if theta0.len() != spec.param_count() {
        return Err(Error::DimensionMismatch { expected: spec.param_count(), found: theta0.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut history = vec![sweep_cost(spec, theta0, data, config, &mut rng)?];
    let mut best = (theta0.clone(), history[0], 0);
    let mut theta = theta0.clone();
    let mut converged = false;

    for sweep in 1..=config.max_sweeps {
        let previous = history[sweep - 1];
        let (next, c) = smo_sweep(spec, &theta, data, config, &mut rng)?;
        if !c.is_finite() {
            return Err(Error::Numeric(format!("cost became {c} at sweep {sweep}")));
        }
        theta = next;
        history.push(c);
        if c <= best.1 {
            best = (theta.clone(), c, sweep);
        }
        let change = (previous - c).abs() / previous.abs().max(f64::MIN_POSITIVE);
        if change < config.rel_tol {
            converged = true;
            break;
        }
    }

    Ok(TrainOutcome { theta: best.0, final_theta: theta, history, best_index: best.2, converged })
}
