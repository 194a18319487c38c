//! Exact 2×2 complex linear algebra for a single qubit.
//!
//! Operators are kept in Pauli form `c0·I + h·σ` wherever possible. Unitary
//! exponentials are evaluated in closed form, so propagation carries no
//! step-size error.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;

/// Absolute max-entry tolerance used when validating Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub fn sigma_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// Real 3-vector in the Bloch (Pauli coefficient) frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bloch3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Bloch3 {
    pub const ZERO: Bloch3 = Bloch3::new(0.0, 0.0, 0.0);
    pub const EX: Bloch3 = Bloch3::new(1.0, 0.0, 0.0);
    pub const EY: Bloch3 = Bloch3::new(0.0, 1.0, 0.0);
    pub const EZ: Bloch3 = Bloch3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Unit vector in the x–y plane at polar angle `angle`.
    pub fn planar(angle: f64) -> Self {
        Self::new(angle.cos(), angle.sin(), 0.0)
    }

    pub fn dot(self, other: Bloch3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, o: Bloch3) -> Bloch3 {
        Bloch3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Bloch3 {
        Bloch3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn max_abs_diff(self, o: Bloch3) -> f64 {
        (self.x - o.x)
            .abs()
            .max((self.y - o.y).abs())
            .max((self.z - o.z).abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// `v·σ` as a dense matrix.
    pub fn dot_sigma(self) -> Mat2 {
        Mat2::new(
            C64::new(self.z, 0.0),
            C64::new(self.x, -self.y),
            C64::new(self.x, self.y),
            C64::new(-self.z, 0.0),
        )
    }
}

impl Add for Bloch3 {
    type Output = Bloch3;
    fn add(self, o: Bloch3) -> Bloch3 {
        Bloch3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Bloch3 {
    type Output = Bloch3;
    fn sub(self, o: Bloch3) -> Bloch3 {
        Bloch3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Bloch3 {
    type Output = Bloch3;
    fn neg(self) -> Bloch3 {
        Bloch3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<Bloch3> for f64 {
    type Output = Bloch3;
    fn mul(self, v: Bloch3) -> Bloch3 {
        v.scale(self)
    }
}

/// z-component of `u × v`.
pub fn cross_z(u: Bloch3, v: Bloch3) -> f64 {
    u.x * v.y - u.y * v.x
}

/// `u cos(angle) + (u × e_z) sin(angle)`: a clockwise rotation about `e_z`
/// viewed from `+z`.
pub fn rotate_about_z(u: Bloch3, angle: f64) -> Bloch3 {
    let (s, c) = angle.sin_cos();
    // u × e_z = (u_y, -u_x, 0)
    Bloch3::new(u.x * c + u.y * s, u.y * c - u.x * s, u.z)
}

/// Signed angle from `u` to `v` in the x–y plane, counterclockwise from `+z`,
/// in `(-π, π]`.
pub fn signed_planar_angle(u: Bloch3, v: Bloch3) -> f64 {
    let a = cross_z(u, v).atan2(u.x * v.x + u.y * v.y);
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

/// Hermitian operator `c0·I + h·σ`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Hermitian2 {
    pub c0: f64,
    pub h: Bloch3,
}

impl Hermitian2 {
    pub const fn new(c0: f64, h: Bloch3) -> Self {
        Self { c0, h }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, Bloch3::ZERO)
    }

    pub const fn pauli(h: Bloch3) -> Self {
        Self::new(0.0, h)
    }

    /// Density matrix `½(I + r·σ)` for a Bloch vector `r`.
    pub fn density(r: Bloch3) -> Self {
        Self::new(0.5, r.scale(0.5))
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn projector(psi: [C64; 2]) -> Self {
        let (a, b) = (psi[0], psi[1]);
        let off = a.conj() * b; // ⟨0|ψ⟩* ⟨1|ψ⟩ is the (1,0) entry
        Self::new(
            0.5 * (a.norm_sqr() + b.norm_sqr()),
            Bloch3::new(off.re, off.im, 0.5 * (a.norm_sqr() - b.norm_sqr())),
        )
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.c0
    }

    pub fn to_matrix(&self) -> Mat2 {
        Mat2::identity() * C64::new(self.c0, 0.0) + self.h.dot_sigma()
    }

    /// `Tr(σ M)`, the Bloch vector convention used for states and observables.
    pub fn bloch(&self) -> Bloch3 {
        self.h.scale(2.0)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let n = self.h.norm();
        (self.c0 - n, self.c0 + n)
    }

    /// `Tr(self · other)`.
    pub fn trace_product(&self, other: &Hermitian2) -> f64 {
        2.0 * (self.c0 * other.c0 + self.h.dot(other.h))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.c0 * s, self.h.scale(s))
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.h.is_finite()
    }
}

impl Add for Hermitian2 {
    type Output = Hermitian2;
    fn add(self, o: Hermitian2) -> Hermitian2 {
        Hermitian2::new(self.c0 + o.c0, self.h + o.h)
    }
}

/// Decompose a dense Hermitian matrix into Pauli coefficients.
pub fn pauli_decompose(m: &Mat2) -> Result<Hermitian2> {
    let adj = m.adjoint();
    let asym = (m - adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !asym.is_finite() || asym > HERMITIAN_TOL {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let tr = |p: &Mat2| (m * p).trace().re * 0.5;
    Ok(Hermitian2::new(
        m.trace().re * 0.5,
        Bloch3::new(tr(&sigma_x()), tr(&sigma_y()), tr(&sigma_z())),
    ))
}

/// A 2×2 unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2(Mat2);

impl Unitary2 {
    pub fn identity() -> Self {
        Self(Mat2::identity())
    }

    /// Wraps a matrix without checking unitarity.
    pub fn from_matrix_unchecked(m: Mat2) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `self · other` (apply `other` first).
    pub fn then_after(&self, other: &Unitary2) -> Self {
        Self(self.0 * other.0)
    }

    pub fn det(&self) -> C64 {
        self.0.determinant()
    }

    /// Max entry of `|U†U − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.0.adjoint() * self.0 - Mat2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `U M U†` for a Hermitian `M`.
    pub fn conjugate(&self, m: &Hermitian2) -> Hermitian2 {
        let dense = self.0 * m.to_matrix() * self.0.adjoint();
        hermitian_part(&dense)
    }

    /// `U† M U` for a Hermitian `M`.
    pub fn conjugate_adjoint(&self, m: &Hermitian2) -> Hermitian2 {
        let dense = self.0.adjoint() * m.to_matrix() * self.0;
        hermitian_part(&dense)
    }

    pub fn apply(&self, psi: [C64; 2]) -> [C64; 2] {
        [
            self.0[(0, 0)] * psi[0] + self.0[(0, 1)] * psi[1],
            self.0[(1, 0)] * psi[0] + self.0[(1, 1)] * psi[1],
        ]
    }

    pub fn max_abs_diff(&self, other: &Unitary2) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Pauli coefficients of a matrix known to be Hermitian up to roundoff.
pub(crate) fn hermitian_part(m: &Mat2) -> Hermitian2 {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let off = 0.5 * (m[(1, 0)] + m[(0, 1)].conj());
    Hermitian2::new(0.5 * (a + d), Bloch3::new(off.re, off.im, 0.5 * (a - d)))
}

/// `exp(−i·H·t)` in closed form.
pub fn expi(h: &Hermitian2, t: f64) -> Unitary2 {
    let n = h.h.norm();
    let phase = if h.c0 == 0.0 {
        ONE
    } else {
        C64::from_polar(1.0, -h.c0 * t)
    };
    if n < 1e-300 {
        return Unitary2(Mat2::identity() * phase);
    }
    let (s, c) = (n * t).sin_cos();
    let k = s / n;
    // cos(|h|t) I − i sin(|h|t) ĥ·σ
    let m = Mat2::new(
        C64::new(c, -k * h.h.z),
        C64::new(-k * h.h.y, -k * h.h.x),
        C64::new(k * h.h.y, -k * h.h.x),
        C64::new(c, k * h.h.z),
    );
    if h.c0 == 0.0 {
        Unitary2(m)
    } else {
        Unitary2(m * phase)
    }
}
