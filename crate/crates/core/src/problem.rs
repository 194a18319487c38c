//! Control problems, the exceptional control, and the reduced Bloch-frame form.

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::{signed_planar_angle, rotate_about_z, Bloch3, Hermitian2};

/// Tolerance on `Tr V` and `Tr(H0 V)` when reducing.
pub const REDUCIBILITY_TOL: f64 = 1e-10;
const STATE_TOL: f64 = 1e-12;

/// Anything that can be driven by a scalar control `f(t)` through
/// `H(t) = drift + f(t)·coupling`.
pub trait ControlSystem {
    fn drift(&self) -> Hermitian2;
    fn coupling(&self) -> Hermitian2;
    fn initial_state(&self) -> Hermitian2;
    fn observable(&self) -> Hermitian2;
    fn horizon(&self) -> f64;

    fn hamiltonian(&self, amplitude: f64) -> Hermitian2 {
        let d = self.drift();
        let c = self.coupling();
        Hermitian2::new(d.c0 + amplitude * c.c0, d.h + c.h.scale(amplitude))
    }
}

/// Full problem data with `ħ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlProblem {
    pub h0: Hermitian2,
    pub v: Hermitian2,
    pub rho0: Hermitian2,
    pub a: Hermitian2,
    pub horizon: f64,
}

impl ControlProblem {
    pub fn new(
        h0: Hermitian2,
        v: Hermitian2,
        rho0: Hermitian2,
        a: Hermitian2,
        horizon: f64,
    ) -> Result<Self> {
        for (m, name) in [(&h0, "H0"), (&v, "V"), (&rho0, "rho0"), (&a, "A")] {
            if !m.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidHorizon(horizon));
        }
        check_density(&rho0)?;
        if v.h.norm() == 0.0 {
            return Err(Error::ZeroCoupling);
        }
        Ok(Self {
            h0,
            v,
            rho0,
            a,
            horizon,
        })
    }

    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidHorizon(horizon));
        }
        self.horizon = horizon;
        Ok(self)
    }

    pub fn exceptional_control(&self) -> Result<f64> {
        exceptional_control(&self.h0, &self.v)
    }

    pub fn critical_time(&self) -> Result<f64> {
        critical_time(&self.h0, &self.v)
    }
}

impl ControlSystem for ControlProblem {
    fn drift(&self) -> Hermitian2 {
        self.h0
    }
    fn coupling(&self) -> Hermitian2 {
        self.v
    }
    fn initial_state(&self) -> Hermitian2 {
        self.rho0
    }
    fn observable(&self) -> Hermitian2 {
        self.a
    }
    fn horizon(&self) -> f64 {
        self.horizon
    }
}

fn check_density(rho: &Hermitian2) -> Result<()> {
    if (rho.trace() - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "trace is {}, expected 1",
            rho.trace()
        )));
    }
    let (lo, _) = rho.eigenvalues();
    if lo < -STATE_TOL {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {lo:e}"
        )));
    }
    Ok(())
}

/// `f0 = −Tr(H0 V) / Tr(V²)`.
pub fn exceptional_control(h0: &Hermitian2, v: &Hermitian2) -> Result<f64> {
    let vv = v.trace_product(v);
    if vv <= 0.0 {
        return Err(Error::UndefinedExceptionalControl);
    }
    Ok(0.0 - h0.trace_product(v) / vv)
}

/// `T0 = π / ‖H0 − ½Tr H0 + f0 V‖` with the spectral norm.
pub fn critical_time(h0: &Hermitian2, v: &Hermitian2) -> Result<f64> {
    let f0 = exceptional_control(h0, v)?;
    let shifted = Hermitian2::new(f0 * v.c0, h0.h + v.h.scale(f0));
    // spectral norm of c·I + h·σ is |c| + |h|
    let norm = shifted.c0.abs() + shifted.h.norm();
    if norm == 0.0 {
        return Err(Error::InfiniteCriticalTime);
    }
    Ok(std::f64::consts::PI / norm)
}

/// Problem in the canonical frame `H = σ_z + f(t)(v_x σ_x + v_y σ_y)`.
///
/// `r` and `a0` follow the `Tr(·σ)` convention, so `ρ0 = ½(I + r·σ)` and
/// `A = ½(Tr A·I + a0·σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedProblem {
    pub v: Bloch3,
    pub r: Bloch3,
    pub a0: Bloch3,
    pub a_trace: f64,
    pub horizon: f64,
    /// `|h0|` of the original free Hamiltonian; original time × scale =
    /// reduced time.
    pub time_scale: f64,
}

impl ReducedProblem {
    pub fn new(v: Bloch3, r: Bloch3, a0: Bloch3, a_trace: f64, horizon: f64) -> Result<Self> {
        if !(v.is_finite() && r.is_finite() && a0.is_finite() && a_trace.is_finite()) {
            return Err(Error::NonFinite("reduced problem"));
        }
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::InvalidHorizon(horizon));
        }
        if v.z != 0.0 {
            return Err(Error::OutOfRegime(format!(
                "coupling vector must lie in the x-y plane, v_z = {:e}",
                v.z
            )));
        }
        if v.norm() == 0.0 {
            return Err(Error::ZeroCoupling);
        }
        if r.norm() > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!("|r| = {} > 1", r.norm())));
        }
        Ok(Self {
            v,
            r,
            a0,
            a_trace,
            horizon,
            time_scale: 1.0,
        })
    }

    /// Problem with a projector target `A = ½(I + a0·σ)`.
    pub fn projector(v: Bloch3, r: Bloch3, a0: Bloch3, horizon: f64) -> Result<Self> {
        Self::new(v, r, a0, 1.0, horizon)
    }

    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::InvalidHorizon(horizon));
        }
        self.horizon = horizon;
        Ok(self)
    }

    /// Objective at `f ≡ 0`, using free precession of `r` about `e_z`.
    pub fn free_objective(&self) -> f64 {
        let r_t = rotate_about_z(self.r, -2.0 * self.horizon);
        0.5 * (self.a_trace + r_t.dot(self.a0))
    }

    /// Maps a control in the original time units to the reduced frame.
    pub fn rescale_control(
        &self,
        f: &crate::dynamics::PiecewiseControl,
    ) -> Result<crate::dynamics::PiecewiseControl> {
        let s = self.time_scale;
        crate::dynamics::PiecewiseControl::new(
            f.breakpoints().iter().map(|t| t * s).collect(),
            f.amplitudes().iter().map(|a| a / s).collect(),
        )
    }
}

impl ControlSystem for ReducedProblem {
    fn drift(&self) -> Hermitian2 {
        Hermitian2::pauli(Bloch3::EZ)
    }
    fn coupling(&self) -> Hermitian2 {
        Hermitian2::pauli(self.v)
    }
    fn initial_state(&self) -> Hermitian2 {
        Hermitian2::density(self.r)
    }
    fn observable(&self) -> Hermitian2 {
        Hermitian2::new(0.5 * self.a_trace, self.a0.scale(0.5))
    }
    fn horizon(&self) -> f64 {
        self.horizon
    }
}

fn to_vector(b: Bloch3) -> Vector3<f64> {
    Vector3::new(b.x, b.y, b.z)
}

/// Adding `0.0` folds negative zeros into `+0`.
fn from_vector(v: Vector3<f64>) -> Bloch3 {
    Bloch3::new(v.x + 0.0, v.y + 0.0, v.z + 0.0)
}

/// Change of basis and time rescaling onto `σ_z + f(t)(v_x σ_x + v_y σ_y)`.
pub fn reduce(p: &ControlProblem) -> Result<ReducedProblem> {
    let trace_v = p.v.trace();
    let trace_h0_v = p.h0.trace_product(&p.v);
    if trace_v.abs() > REDUCIBILITY_TOL || trace_h0_v.abs() > REDUCIBILITY_TOL {
        return Err(Error::NotReducible {
            trace_v,
            trace_h0_v,
        });
    }
    let scale = p.h0.h.norm();
    if scale < 1e-12 {
        return Err(Error::NoPreferredBasis);
    }
    let axis = to_vector(p.h0.h) / scale;
    let rot = Rotation3::rotation_between(&axis, &Vector3::z()).unwrap_or_else(|| {
        Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI)
    });
    let map = |b: Bloch3| from_vector(rot * to_vector(b));

    let mut v = map(p.v.h);
    if v.z.abs() > REDUCIBILITY_TOL * (1.0 + v.norm()) {
        return Err(Error::NotReducible {
            trace_v,
            trace_h0_v,
        });
    }
    v.z = 0.0;
    let mut rp = ReducedProblem::new(
        v,
        map(p.rho0.bloch()),
        map(p.a.bloch()),
        p.a.trace(),
        p.horizon * scale,
    )?;
    rp.time_scale = scale;
    Ok(rp)
}

/// Bloch-frame parameters of a reduced problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemVectors {
    pub r: Bloch3,
    pub a0: Bloch3,
    /// Target vector in the Heisenberg frame at the horizon.
    pub a_t: Bloch3,
    pub v: Bloch3,
    pub h0: Bloch3,
    /// Signed planar angle from `v` to `a0`.
    pub alpha: f64,
    /// Signed planar angle from `r` to `a0`.
    pub beta: f64,
    pub phi_v: f64,
    pub horizon: f64,
}

impl ProblemVectors {
    /// Builds the vector set directly, e.g. for classification sweeps.
    pub fn from_parts(r: Bloch3, a0: Bloch3, v: Bloch3, horizon: f64) -> Result<Self> {
        if a0.norm() == 0.0 {
            return Err(Error::TrivialObservable);
        }
        Ok(Self {
            r,
            a0,
            a_t: rotate_about_z(a0, 2.0 * horizon),
            v,
            h0: Bloch3::EZ,
            alpha: signed_planar_angle(v, a0),
            beta: signed_planar_angle(r, a0),
            phi_v: v.y.atan2(v.x),
            horizon,
        })
    }

    /// Same problem at another horizon.
    pub fn at_horizon(&self, horizon: f64) -> Self {
        Self {
            a_t: rotate_about_z(self.a0, 2.0 * horizon),
            horizon,
            ..*self
        }
    }

    /// Applies a common rotation about `e_z` to `r`, `a0`, `a_t` and `v`.
    pub fn rotated(&self, angle: f64) -> Self {
        let r = rotate_about_z(self.r, angle);
        let a0 = rotate_about_z(self.a0, angle);
        let v = rotate_about_z(self.v, angle);
        Self {
            r,
            a0,
            a_t: rotate_about_z(self.a_t, angle),
            v,
            phi_v: v.y.atan2(v.x),
            ..*self
        }
    }

    pub fn is_planar(&self, tol: f64) -> bool {
        self.r.z.abs() <= tol && self.a_t.z.abs() <= tol && self.v.z.abs() <= tol
    }
}

pub fn vectors(rp: &ReducedProblem) -> Result<ProblemVectors> {
    ProblemVectors::from_parts(rp.r, rp.a0, rp.v, rp.horizon)
}

/// Named problem presets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `ρ0 = ½(1 − σ_y)`, `A = ½(1 + σ_x)`, coupling `v_x σ_x + v_y σ_y`.
    SpinRotation { vx: f64, vy: f64 },
    /// `H = σ_z + f σ_x`, transfer `|↑⟩ → |↓⟩`.
    LandauZener,
    /// `r = e_y`, unit planar `v` at angle `phi`, projector target at `psi`.
    ScanDefault { phi: f64, psi: f64 },
}

impl Preset {
    pub const NAMES: [&'static str; 3] = ["spin-rotation", "landau-zener", "scan-default"];

    pub fn by_name(name: &str) -> Option<Preset> {
        match name {
            "spin-rotation" => Some(Preset::SpinRotation { vx: 1.0, vy: 0.0 }),
            "landau-zener" => Some(Preset::LandauZener),
            "scan-default" => Some(Preset::ScanDefault { phi: 0.0, psi: 0.0 }),
            _ => None,
        }
    }

    pub fn problem(&self, horizon: f64) -> Result<ControlProblem> {
        let sz = Hermitian2::pauli(Bloch3::EZ);
        match *self {
            Preset::SpinRotation { vx, vy } => ControlProblem::new(
                sz,
                Hermitian2::pauli(Bloch3::new(vx, vy, 0.0)),
                Hermitian2::density(-Bloch3::EY),
                Hermitian2::density(Bloch3::EX),
                horizon,
            ),
            Preset::LandauZener => ControlProblem::new(
                sz,
                Hermitian2::pauli(Bloch3::EX),
                Hermitian2::density(Bloch3::EZ),
                Hermitian2::density(-Bloch3::EZ),
                horizon,
            ),
            Preset::ScanDefault { phi, psi } => ControlProblem::new(
                sz,
                Hermitian2::pauli(Bloch3::planar(phi)),
                Hermitian2::density(Bloch3::EY),
                Hermitian2::density(Bloch3::planar(psi)),
                horizon,
            ),
        }
    }
}
