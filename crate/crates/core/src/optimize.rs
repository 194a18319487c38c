//! Monotone gradient ascent on the amplitude vector with backtracking.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dynamics::{gradient, objective, PiecewiseControl};
use crate::error::{Error, Result};
use crate::problem::ControlSystem;

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub start_seed: Option<u64>,
    pub iterations: usize,
    /// Objective after every accepted step, starting with the initial value.
    pub trace: Vec<f64>,
    pub final_control: PiecewiseControl,
    pub final_j: f64,
    pub final_gradient_norm: f64,
    pub converged: bool,
}

/// Seeded start on `intervals` equal pieces with normal(0, σ²) amplitudes.
pub fn random_start(horizon: f64, intervals: usize, sigma: f64, seed: u64) -> Result<PiecewiseControl> {
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::Precondition(format!("amplitude distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PiecewiseControl::uniform(horizon, (0..intervals).map(|_| normal.sample(&mut rng)).collect())
}

fn max_norm(g: &[f64]) -> f64 {
    g.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Gradient ascent from `start` (which must have `intervals` pieces). Stops
/// when the gradient max-norm drops below `tol`, after `max_iter` steps, or
/// when no step along the gradient increases the objective.
pub fn optimize<S: ControlSystem>(
    sys: &S,
    intervals: usize,
    start: &PiecewiseControl,
    max_iter: usize,
    tol: f64,
) -> Result<OptimizeReport> {
    if start.len() != intervals {
        return Err(Error::InvalidControl(format!(
            "start has {} intervals, expected {intervals}",
            start.len()
        )));
    }
    let mut control = start.clone();
    let mut j = objective(sys, &control)?;
    let mut g = gradient(sys, &control)?;
    let mut trace = vec![j];
    let mut step = 1.0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        if max_norm(&g) < tol {
            converged = true;
            break;
        }
        let g2: f64 = g.iter().map(|x| x * x).sum();
        step *= 2.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let amps = control
                .amplitudes()
                .iter()
                .zip(&g)
                .map(|(a, d)| a + step * d)
                .collect();
            let candidate = control.with_amplitudes(amps)?;
            let jc = objective(sys, &candidate)?;
            if jc >= j + ARMIJO * step * g2 {
                accepted = Some((candidate, jc));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, jc)) = accepted else {
            break;
        };
        control = candidate;
        j = jc;
        g = gradient(sys, &control)?;
        trace.push(j);
        iterations += 1;
    }
    if !converged && max_norm(&g) < tol {
        converged = true;
    }
    Ok(OptimizeReport {
        start_seed: None,
        iterations,
        trace,
        final_gradient_norm: max_norm(&g),
        final_control: control,
        final_j: j,
        converged,
    })
}
