//! Span of the conjugated coupling operators `V_t = U_t† V U_t`.
//!
//! Rank 3 means small modulations of the control reach every direction of
//! `su(2)` around the end-point unitary.

use nalgebra::DMatrix;

use crate::dynamics::PiecewiseControl;
use crate::error::{Error, Result};
use crate::problem::ControlSystem;
use crate::su2::{expi, Unitary2};

pub const RANK_RTOL: f64 = 1e-9;

/// Numerical rank of the Pauli vectors of `V_t`, sampled at `samples`
/// equally spaced times (endpoints included) on every interval.
pub fn span_rank<S: ControlSystem>(
    sys: &S,
    f: &PiecewiseControl,
    samples: usize,
) -> Result<usize> {
    if samples < 3 {
        return Err(Error::Precondition(format!(
            "span rank needs at least 3 samples per interval, got {samples}"
        )));
    }
    let coupling = sys.coupling();
    let mut columns = Vec::with_capacity(3 * samples * f.len());
    let mut start = Unitary2::identity();
    for (dt, a) in f.intervals() {
        let h = sys.hamiltonian(a);
        for j in 0..samples {
            let tau = dt * (j as f64 / (samples - 1) as f64);
            let u = expi(&h, tau).then_after(&start);
            let w = u.conjugate_adjoint(&coupling).h;
            columns.extend_from_slice(&[w.x, w.y, w.z]);
        }
        start = expi(&h, dt).then_after(&start);
    }
    let m = DMatrix::from_column_slice(3, columns.len() / 3, &columns);
    let sv = m.singular_values();
    let largest = sv.max();
    Ok(sv.iter().filter(|&&s| s > RANK_RTOL * largest).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{reduce, Preset};

    fn lz(horizon: f64) -> crate::problem::ReducedProblem {
        reduce(&Preset::LandauZener.problem(horizon).unwrap()).unwrap()
    }

    #[test]
    fn landau_zener_ranks() {
        let rp = lz(1.0);
        let zero = PiecewiseControl::zero(1.0).unwrap();
        assert_eq!(span_rank(&rp, &zero, 5).unwrap(), 2);
        let one = PiecewiseControl::constant(1.0, 1.0).unwrap();
        assert_eq!(span_rank(&rp, &one, 5).unwrap(), 3);
        let two_piece = PiecewiseControl::uniform(1.0, vec![0.0, 0.7]).unwrap();
        assert_eq!(span_rank(&rp, &two_piece, 3).unwrap(), 3);
        let negative = PiecewiseControl::uniform(1.0, vec![0.5, -0.5]).unwrap();
        assert_eq!(span_rank(&rp, &negative, 3).unwrap(), 3);
    }

    #[test]
    fn too_few_samples() {
        let rp = lz(1.0);
        let zero = PiecewiseControl::zero(1.0).unwrap();
        assert!(matches!(span_rank(&rp, &zero, 2), Err(Error::Precondition(_))));
    }
}
