//! Certifies that the exceptional control `f = 0` is a saddle by exhibiting
//! two bump-pair controls, one raising and one lowering the objective.
//!
//! The search follows the asymptotic argument: pick probe times `t1 < t2`
//! near zero where the quadratic form `G` is indefinite, take its
//! eigenvectors as the ascent and descent directions, and realise them as
//! rectangular bumps of width `ε` and area `s·λ`, `s·μ`. `ε` and `s` are
//! halved until the measured signs agree with `G` on two consecutive
//! refinements.

use serde::{Deserialize, Serialize};

use crate::dynamics::{bump_control, objective, PiecewiseControl};
use crate::error::{Error, Result};
use crate::landscape::{classify, g_coefficients};
use crate::problem::{vectors, ReducedProblem};

/// Number of (ε, s) halvings before giving up.
pub const REFINEMENT_BUDGET: usize = 20;
const TIME_SHRINK_BUDGET: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SaddleVerdict {
    Saddle,
    NoSplitFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleProbeReport {
    pub t1: f64,
    pub t2: f64,
    pub epsilon: f64,
    pub amplitude_scale: f64,
    /// `(λ, μ)` with `G < 0`: bump `s·λ` at `t2`, `s·μ` at `t1`.
    pub ascent_pair: (f64, f64),
    /// `(λ, μ)` with `G > 0`.
    pub descent_pair: (f64, f64),
    pub g_ascent: f64,
    pub g_descent: f64,
    pub j0: f64,
    pub j_up: f64,
    pub j_down: f64,
    pub refinements: usize,
    pub verdict: SaddleVerdict,
}

/// Unit eigenvectors of `[[p, q], [q, s]]` for the larger and smaller
/// eigenvalue.
fn eigen_pairs(p: f64, q: f64, s: f64) -> ((f64, f64, f64), (f64, f64, f64)) {
    let mean = 0.5 * (p + s);
    let rad = (0.25 * (p - s) * (p - s) + q * q).sqrt();
    let vec_for = |e: f64| {
        let a = (q, e - p);
        let b = (e - s, q);
        let pick = if a.0.hypot(a.1) >= b.0.hypot(b.1) { a } else { b };
        let n = pick.0.hypot(pick.1);
        (pick.0 / n, pick.1 / n, e)
    };
    (vec_for(mean + rad), vec_for(mean - rad))
}

fn pair_control(
    rp: &ReducedProblem,
    t1: f64,
    t2: f64,
    width: f64,
    scale: f64,
    pair: (f64, f64),
) -> Result<PiecewiseControl> {
    // G's λ multiplies the later probe time
    bump_control(
        rp.horizon,
        width,
        &[(t1, scale * pair.1), (t2, scale * pair.0)],
    )
}

pub fn probe_saddle(rp: &ReducedProblem) -> Result<SaddleProbeReport> {
    let pv = vectors(rp)?;
    let label = classify(&pv)?;
    if !label.is_saddle_domain() {
        return Err(Error::Precondition(format!(
            "saddle probe needs D3 or D4, got {label}"
        )));
    }
    let horizon = rp.horizon;
    if horizon <= 0.0 {
        return Err(Error::Precondition("horizon must be positive".into()));
    }
    // D3 needs (r·r₁)(a·r₂) > 0, D4 needs it < 0
    let want = if label == crate::landscape::DomainLabel::D3 {
        1.0
    } else {
        -1.0
    };

    let (mut t1, mut t2) = (horizon / 8.0, horizon / 4.0);
    let mut coeffs = g_coefficients(&pv, t1, t2);
    for _ in 0..TIME_SHRINK_BUDGET {
        let (p, q, s) = coeffs;
        if q * want > 0.0 && q * q - p * s > 0.0 {
            break;
        }
        t1 *= 0.5;
        t2 *= 0.5;
        coeffs = g_coefficients(&pv, t1, t2);
    }
    let (p, q, s) = coeffs;
    let ((dx, dy, g_descent), (ax, ay, g_ascent)) = eigen_pairs(p, q, s);

    let zero = PiecewiseControl::zero(horizon)?;
    let j0 = objective(rp, &zero)?;
    let mut width = 0.5 * (t2 - t1).min(t1);
    let mut scale = 0.25 / rp.v.norm();

    let mut report = SaddleProbeReport {
        t1,
        t2,
        epsilon: width,
        amplitude_scale: scale,
        ascent_pair: (ax, ay),
        descent_pair: (dx, dy),
        g_ascent,
        g_descent,
        j0,
        j_up: j0,
        j_down: j0,
        refinements: 0,
        verdict: SaddleVerdict::NoSplitFound,
    };
    if !(q * q - p * s > 0.0 && g_ascent < 0.0 && g_descent > 0.0) {
        return Ok(report);
    }

    let mut previous_ok = false;
    for k in 0..=REFINEMENT_BUDGET {
        // odd orders in s cancel between ±s, so take the better of the two
        let eval = |pair: (f64, f64)| -> Result<(f64, f64)> {
            let plus = objective(rp, &pair_control(rp, t1, t2, width, scale, pair)?)?;
            let minus = objective(rp, &pair_control(rp, t1, t2, width, -scale, pair)?)?;
            Ok((plus, minus))
        };
        let (up_p, up_m) = eval((ax, ay))?;
        let (down_p, down_m) = eval((dx, dy))?;
        let (j_up, ascent) = if up_p >= up_m {
            (up_p, (ax, ay))
        } else {
            (up_m, (-ax, -ay))
        };
        let (j_down, descent) = if down_p <= down_m {
            (down_p, (dx, dy))
        } else {
            (down_m, (-dx, -dy))
        };
        let ok = j_down < j0 && j0 < j_up;
        report = SaddleProbeReport {
            epsilon: width,
            amplitude_scale: scale,
            ascent_pair: ascent,
            descent_pair: descent,
            j_up,
            j_down,
            refinements: k,
            ..report
        };
        if ok && previous_ok {
            report.verdict = SaddleVerdict::Saddle;
            return Ok(report);
        }
        previous_ok = ok;
        width *= 0.5;
        scale *= 0.5;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{reduce, Preset};
    use std::f64::consts::PI;

    #[test]
    fn eigen_pairs_diagonalize() {
        let (p, q, s) = (0.3, 0.8, -0.1);
        let ((x1, y1, e1), (x2, y2, e2)) = eigen_pairs(p, q, s);
        assert!(e1 > e2);
        for (x, y, e) in [(x1, y1, e1), (x2, y2, e2)] {
            assert!((p * x + q * y - e * x).abs() < 1e-14);
            assert!((q * x + s * y - e * y).abs() < 1e-14);
        }
    }

    #[test]
    fn spin_rotation_is_a_saddle() {
        let v = 5f64.sqrt().recip();
        let p = Preset::SpinRotation { vx: v, vy: -2.0 * v }
            .problem(PI / 12.0)
            .unwrap();
        let rp = reduce(&p).unwrap();
        let report = probe_saddle(&rp).unwrap();
        assert_eq!(report.verdict, SaddleVerdict::Saddle, "{report:?}");
        assert!(report.j_down < report.j0 && report.j0 < report.j_up);
        assert!(report.g_ascent < 0.0 && report.g_descent > 0.0);
    }

    #[test]
    fn rejects_non_saddle_domain() {
        use crate::su2::Bloch3;
        // r = e_y, v = e_x, target at 3π/4 with T → 0 is D_I
        let rp = ReducedProblem::projector(Bloch3::EX, Bloch3::EY, Bloch3::planar(0.75 * PI), 1e-3)
            .unwrap();
        assert!(matches!(probe_saddle(&rp), Err(Error::Precondition(_))));
    }
}
