//! Monte Carlo probability maps over the `(φ, ψ)` parameter grid.
//!
//! For each cell the coupling is `v = (cos φ, sin φ, 0)`, the target is the
//! projector with `a0 = (cos ψ, sin ψ, 0)` and the initial Bloch vector is
//! fixed. `P` is the fraction of random piecewise-constant controls with
//! `J[f] < J[0]`.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{objective, PiecewiseControl};
use crate::error::{Error, Result};
use crate::landscape::{classify, DomainLabel};
use crate::problem::{vectors, ReducedProblem};
use crate::su2::Bloch3;

pub const CSV_HEADER: &str = "phi,psi,J0,P,count_below,samples,label";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub horizon: f64,
    pub grid_phi: usize,
    pub grid_psi: usize,
    pub samples: usize,
    pub intervals: usize,
    pub amplitude_sigma: f64,
    pub seed: u64,
    pub r: Bloch3,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            horizon: std::f64::consts::PI / 12.0,
            grid_phi: 101,
            grid_psi: 101,
            samples: 300,
            intervals: 100,
            amplitude_sigma: 1.0,
            seed: 0,
            r: Bloch3::EY,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidHorizon(self.horizon));
        }
        if self.grid_phi < 2 || self.grid_psi < 2 {
            return Err(Error::Precondition(format!(
                "grid must be at least 2x2, got {}x{}",
                self.grid_phi, self.grid_psi
            )));
        }
        if self.samples == 0 || self.intervals == 0 {
            return Err(Error::Precondition(
                "samples and intervals must be positive".into(),
            ));
        }
        if !(self.amplitude_sigma.is_finite() && self.amplitude_sigma >= 0.0) {
            return Err(Error::Precondition(format!(
                "amplitude sigma must be non-negative, got {}",
                self.amplitude_sigma
            )));
        }
        if self.r.z != 0.0 || self.r.norm() > 1.0 + 1e-12 {
            return Err(Error::OutOfRegime(
                "scan initial vector must be planar with |r| <= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.grid_phi * self.grid_psi
    }

    /// Cell centre `2π(j + ½)/n`.
    pub fn phi_at(&self, j: usize) -> f64 {
        cell_centre(j, self.grid_phi)
    }

    pub fn psi_at(&self, k: usize) -> f64 {
        cell_centre(k, self.grid_psi)
    }

    /// Reduced problem for row-major cell index `(φ index, ψ index)`.
    pub fn problem_at(&self, cell: usize) -> Result<ReducedProblem> {
        let (j, k) = (cell / self.grid_psi, cell % self.grid_psi);
        ReducedProblem::projector(
            Bloch3::planar(self.phi_at(j)),
            self.r,
            Bloch3::planar(self.psi_at(k)),
            self.horizon,
        )
    }
}

fn cell_centre(j: usize, n: usize) -> f64 {
    2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64
}

/// Random stream keyed by `(seed, cell, sample)`; amplitudes are drawn in
/// interval order from it.
fn stream(seed: u64, cell: usize, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((cell as u64) << 32) | sample as u64);
    rng
}

/// The `sample`-th random control of cell `cell`: `intervals` equal pieces
/// with independent normal amplitudes.
pub fn sample_control(cfg: &ScanConfig, cell: usize, sample: usize) -> Result<PiecewiseControl> {
    let normal = Normal::new(0.0, cfg.amplitude_sigma)
        .map_err(|e| Error::Precondition(format!("amplitude distribution: {e}")))?;
    let mut rng = stream(cfg.seed, cell, sample);
    let amplitudes = (0..cfg.intervals).map(|_| normal.sample(&mut rng)).collect();
    PiecewiseControl::uniform(cfg.horizon, amplitudes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub phi: f64,
    pub psi: f64,
    #[serde(rename = "J0")]
    pub j0: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub count_below: usize,
    pub samples: usize,
    pub label: DomainLabel,
}

/// Estimates `P` for one problem using the random stream of `cell`.
/// Returns `(J[0], count of J[f] < J[0])`.
pub fn estimate_p(rp: &ReducedProblem, cfg: &ScanConfig, cell: usize) -> Result<(f64, usize)> {
    let j0 = objective(rp, &PiecewiseControl::zero(rp.horizon)?)?;
    let mut below = 0;
    for sample in 0..cfg.samples {
        let f = sample_control(cfg, cell, sample)?;
        if objective(rp, &f)? < j0 {
            below += 1;
        }
    }
    Ok((j0, below))
}

pub fn scan_cell(cfg: &ScanConfig, cell: usize) -> Result<ScanCell> {
    let rp = cfg.problem_at(cell)?;
    let label = classify(&vectors(&rp)?)?;
    let (j0, count_below) = estimate_p(&rp, cfg, cell)?;
    Ok(ScanCell {
        phi: cfg.phi_at(cell / cfg.grid_psi),
        psi: cfg.psi_at(cell % cfg.grid_psi),
        j0,
        p: count_below as f64 / cfg.samples as f64,
        count_below,
        samples: cfg.samples,
        label,
    })
}

/// Cells in row-major order by `(φ index, ψ index)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub config: ScanConfig,
    pub cells: Vec<ScanCell>,
}

impl ScanGrid {
    pub fn cell(&self, j: usize, k: usize) -> &ScanCell {
        &self.cells[j * self.config.grid_psi + k]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.cells.len() * 96);
        s.push_str(CSV_HEADER);
        s.push('\n');
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{},{},{}",
                c.phi,
                c.psi,
                c.j0,
                c.p,
                c.count_below,
                c.samples,
                c.label.code()
            );
        }
        s
    }
}

/// Runs every cell; cells are independent and evaluated in parallel.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanGrid> {
    cfg.validate()?;
    let cells = (0..cfg.cell_count())
        .into_par_iter()
        .map(|cell| scan_cell(cfg, cell))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanGrid {
        config: cfg.clone(),
        cells,
    })
}
