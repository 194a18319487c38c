use std::fmt;

use qubit_landscape::Error;

/// Exit status 2 for bad configuration, 3 for inputs outside the regime an
/// operation is defined for.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Regime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Regime(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_regime() {
            Failure::Regime(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Regime(m) => write!(f, "out of regime: {m}"),
        }
    }
}
