//! Control landscape of a single qubit driven by ultrafast pulses.
//!
//! The crate propagates piecewise-constant controls exactly, evaluates the
//! objective `J_A[f] = Tr(U ρ0 U† A)`, and analyses the exceptional control
//! `f = 0` of the canonical problem `H = σ_z + f(t)(v_x σ_x + v_y σ_y)`:
//! domain classification, trap-free conditions, saddle certification, and
//! Monte Carlo probability maps.

pub mod dynamics;
pub mod error;
pub mod expr;
pub mod format;
pub mod landscape;
pub mod optimize;
pub mod problem;
pub mod regularity;
pub mod saddle;
pub mod scan;
pub mod su2;

pub use dynamics::{
    gradient, hessian_kernel_at_zero, objective, propagate, transition_probability,
    HessianSample, PiecewiseControl,
};
pub use error::{Error, Result};
pub use landscape::{classify, phi_psi, DomainLabel, TrapFreeReason, TrapFreeVerdict};
pub use problem::{
    critical_time, exceptional_control, reduce, vectors, ControlProblem, ControlSystem, Preset,
    ProblemVectors, ReducedProblem,
};
pub use saddle::{probe_saddle, SaddleProbeReport, SaddleVerdict};
pub use scan::{run_scan, ScanCell, ScanConfig, ScanGrid};
pub use su2::{Bloch3, Hermitian2, Unitary2};
