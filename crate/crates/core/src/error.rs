use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max asymmetry {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("exceptional control undefined: Tr(V²) = 0")]
    UndefinedExceptionalControl,

    #[error("critical time is infinite: shifted free Hamiltonian vanishes")]
    InfiniteCriticalTime,

    #[error("problem is not reducible: Tr V = {trace_v:e}, Tr(H0 V) = {trace_h0_v:e}")]
    NotReducible { trace_v: f64, trace_h0_v: f64 },

    #[error("free Hamiltonian is degenerate: no preferred basis")]
    NoPreferredBasis,

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("interaction Hamiltonian has zero Pauli part")]
    ZeroCoupling,

    #[error("observable has zero Pauli part")]
    TrivialObservable,

    #[error("invalid horizon T = {0}")]
    InvalidHorizon(f64),

    #[error("invalid control: {0}")]
    InvalidControl(String),

    #[error("control spans [0, {found}] but the horizon is {expected}")]
    HorizonMismatch { expected: f64, found: f64 },

    #[error("state is not normalized: ‖ψ‖² = {0}")]
    UnnormalizedState(f64),

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for errors raised because the input lies outside the regime an
    /// operation is defined for, as opposed to malformed input.
    pub fn is_regime(&self) -> bool {
        matches!(
            self,
            Error::OutOfRegime(_)
                | Error::Precondition(_)
                | Error::NotReducible { .. }
                | Error::NoPreferredBasis
                | Error::TrivialObservable
                | Error::UndefinedExceptionalControl
                | Error::InfiniteCriticalTime
        )
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
