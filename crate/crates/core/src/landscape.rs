//! Domain classification of planar problems and the trap-free conditions.
//!
//! All sign conditions use strict inequalities; anything within
//! [`DOMAIN_TOL`] of zero is treated as a boundary and no claim is made.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::kernel_direction;
use crate::error::{Error, Result};
use crate::problem::ProblemVectors;
use crate::su2::cross_z;

pub const DOMAIN_TOL: f64 = 1e-10;
pub const PLANAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainLabel {
    /// Φ > 0, Ψ > 0
    D1,
    /// Φ < 0, Ψ < 0
    D2,
    /// Φ > 0, Ψ < 0
    D3,
    /// Φ < 0, Ψ > 0
    D4,
    Boundary,
}

impl DomainLabel {
    pub fn from_signs(phi: f64, psi: f64) -> Self {
        if phi.abs() <= DOMAIN_TOL || psi.abs() <= DOMAIN_TOL {
            return DomainLabel::Boundary;
        }
        match (phi > 0.0, psi > 0.0) {
            (true, true) => DomainLabel::D1,
            (false, false) => DomainLabel::D2,
            (true, false) => DomainLabel::D3,
            (false, true) => DomainLabel::D4,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            DomainLabel::D1 => "D1",
            DomainLabel::D2 => "D2",
            DomainLabel::D3 => "D3",
            DomainLabel::D4 => "D4",
            DomainLabel::Boundary => "B",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        Some(match code {
            "D1" => DomainLabel::D1,
            "D2" => DomainLabel::D2,
            "D3" => DomainLabel::D3,
            "D4" => DomainLabel::D4,
            "B" => DomainLabel::Boundary,
            _ => return None,
        })
    }

    /// D_III or D_IV, where the exceptional control is a saddle.
    pub fn is_saddle_domain(&self) -> bool {
        matches!(self, DomainLabel::D3 | DomainLabel::D4)
    }
}

impl fmt::Display for DomainLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// `Φ = (v×r)_z (v×a)_z` and `Ψ = (r×a)_z`, with `a` the Heisenberg-frame
/// target at the horizon.
pub fn phi_psi(pv: &ProblemVectors) -> (f64, f64) {
    (
        cross_z(pv.v, pv.r) * cross_z(pv.v, pv.a_t),
        cross_z(pv.r, pv.a_t),
    )
}

fn require_planar(pv: &ProblemVectors) -> Result<()> {
    if pv.is_planar(PLANAR_TOL) {
        Ok(())
    } else {
        Err(Error::OutOfRegime(format!(
            "non-planar vectors: r_z = {:e}, a_z = {:e}, v_z = {:e}",
            pv.r.z, pv.a_t.z, pv.v.z
        )))
    }
}

pub fn classify(pv: &ProblemVectors) -> Result<DomainLabel> {
    require_planar(pv)?;
    let (phi, psi) = phi_psi(pv);
    Ok(DomainLabel::from_signs(phi, psi))
}

/// Left-hand side of the horizon-dependent condition, written with `a0`.
pub fn trap_free_product(pv: &ProblemVectors, horizon: f64) -> f64 {
    let (s, c) = (2.0 * horizon).sin_cos();
    let (v, r, a0) = (pv.v, pv.r, pv.a0);
    cross_z(v, r)
        * (cross_z(v, a0) * c - v.dot(a0) * s)
        * (cross_z(r, a0) * c - r.dot(a0) * s)
}

/// True iff the horizon-dependent trap-free inequality holds strictly.
pub fn trap_free_t(pv: &ProblemVectors, horizon: f64) -> bool {
    trap_free_product(pv, horizon) < 0.0
}

/// Angle form `sin(α−β) sin(2T−α) sin(2T−β) < 0`.
pub fn trap_free_t_angles(pv: &ProblemVectors, horizon: f64) -> bool {
    let (a, b) = (pv.alpha, pv.beta);
    (a - b).sin() * (2.0 * horizon - a).sin() * (2.0 * horizon - b).sin() < 0.0
}

/// `(v×r)_z (v×a0)_z (r×a0)_z`.
pub fn small_t_product(pv: &ProblemVectors) -> f64 {
    cross_z(pv.v, pv.r) * cross_z(pv.v, pv.a0) * cross_z(pv.r, pv.a0)
}

/// True iff the small-horizon condition holds strictly.
pub fn trap_free_small_t(pv: &ProblemVectors) -> bool {
    small_t_product(pv) < 0.0
}

/// Angle form `sin(α−β) sin α sin β < 0`.
pub fn trap_free_small_t_angles(pv: &ProblemVectors) -> bool {
    (pv.alpha - pv.beta).sin() * pv.alpha.sin() * pv.beta.sin() < 0.0
}

/// Largest grid horizon `k·step` such that the horizon-dependent condition
/// holds at every grid point `step, 2·step, …, k·step`. `None` if it already
/// fails at `step`.
pub fn small_t_horizon(pv: &ProblemVectors, step: f64, max_horizon: f64) -> Option<f64> {
    let mut last = None;
    let mut k = 1usize;
    loop {
        let t = step * k as f64;
        if t > max_horizon || !trap_free_t(pv, t) {
            return last;
        }
        last = Some(t);
        k += 1;
    }
}

/// Coefficients `(p, q, s)` of `G(λ, μ) = pλ² + 2qλμ + sμ²` at probe times
/// `t1 < t2`: `p = (r·r₂)(a·r₂)`, `q = (r·r₁)(a·r₂)`, `s = (r·r₁)(a·r₁)`.
pub fn g_coefficients(pv: &ProblemVectors, t1: f64, t2: f64) -> (f64, f64, f64) {
    let d1 = kernel_direction(t1, pv.phi_v);
    let d2 = kernel_direction(t2, pv.phi_v);
    let (r, a) = (pv.r, pv.a_t);
    (r.dot(d2) * a.dot(d2), r.dot(d1) * a.dot(d2), r.dot(d1) * a.dot(d1))
}

pub fn quadratic_form_g(pv: &ProblemVectors, t1: f64, t2: f64, lambda: f64, mu: f64) -> f64 {
    let (p, q, s) = g_coefficients(pv, t1, t2);
    p * lambda * lambda + 2.0 * q * lambda * mu + s * mu * mu
}

/// `q² − p·s`; positive iff `G` is indefinite.
pub fn g_discriminant(pv: &ProblemVectors, t1: f64, t2: f64) -> f64 {
    let (p, q, s) = g_coefficients(pv, t1, t2);
    q * q - p * s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrapFreeReason {
    /// Some of r, a, v leave the x–y plane: trap-free for every horizon.
    NonPlanar,
    /// Parameters lie in D_III ∪ D_IV at this horizon.
    SaddleDomain,
    /// The small-horizon condition holds: trap-free below `small_t_horizon`.
    SmallTCondition,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictDetails {
    pub phi: f64,
    pub psi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub horizon: f64,
    pub r_z: f64,
    pub a_z: f64,
    pub v_z: f64,
    pub trap_free_product: f64,
    pub trap_free_angles: bool,
    pub small_t_product: f64,
    pub small_t_angles: bool,
    /// Grid estimate (step 1e-3) of the horizon below which the
    /// horizon-dependent condition keeps holding.
    pub small_t_horizon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapFreeVerdict {
    pub reason: TrapFreeReason,
    /// Whether the reason covers the problem's own horizon.
    pub covers_horizon: bool,
    pub details: VerdictDetails,
}

fn details(pv: &ProblemVectors) -> VerdictDetails {
    let (phi, psi) = phi_psi(pv);
    let small = trap_free_small_t(pv);
    VerdictDetails {
        phi,
        psi,
        alpha: pv.alpha,
        beta: pv.beta,
        horizon: pv.horizon,
        r_z: pv.r.z,
        a_z: pv.a_t.z,
        v_z: pv.v.z,
        trap_free_product: trap_free_product(pv, pv.horizon),
        trap_free_angles: trap_free_t_angles(pv, pv.horizon),
        small_t_product: small_t_product(pv),
        small_t_angles: trap_free_small_t_angles(pv),
        small_t_horizon: if small {
            small_t_horizon(pv, 1e-3, std::f64::consts::PI)
        } else {
            None
        },
    }
}

/// Returns the non-planar verdict if any of `r_z`, `a_z`, `v_z` exceeds the
/// planarity tolerance.
pub fn theorem2_guard(pv: &ProblemVectors) -> Option<TrapFreeVerdict> {
    if pv.is_planar(PLANAR_TOL) {
        None
    } else {
        Some(TrapFreeVerdict {
            reason: TrapFreeReason::NonPlanar,
            covers_horizon: true,
            details: details(pv),
        })
    }
}

/// Evaluates every trap-free condition and reports the strongest one that
/// holds.
pub fn trap_free_verdict(pv: &ProblemVectors) -> TrapFreeVerdict {
    if let Some(v) = theorem2_guard(pv) {
        return v;
    }
    let d = details(pv);
    let (reason, covers_horizon) = if d.trap_free_product < 0.0 {
        (TrapFreeReason::SaddleDomain, true)
    } else if d.small_t_product < 0.0 {
        let covers = d.small_t_horizon.is_some_and(|t| pv.horizon <= t);
        (TrapFreeReason::SmallTCondition, covers)
    } else {
        (TrapFreeReason::Inconclusive, false)
    };
    TrapFreeVerdict {
        reason,
        covers_horizon,
        details: d,
    }
}
