use thiserror::Error;

use crate::params::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<Violation>),

    #[error("domain error: {0}")]
    Domain(String),

    /// A gamma argument sits on (or within tolerance of) a pole.
    #[error("singularity in {factor}: gamma argument {arg_re}{arg_im:+}i is a pole")]
    Singularity {
        factor: String,
        arg_re: f64,
        arg_im: f64,
    },

    #[error("contour error: {0}")]
    Contour(String),

    #[error("integral not guaranteed to converge: {0}")]
    NonConvergent(String),

    #[error("higher-order pole at s = {0}; use quadrature or the coincident-pole series")]
    HigherOrderPole(String),

    #[error("residue series hypotheses violated: {0}")]
    ProcedureViolation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("pole of order {0} exceeds the supported maximum of 6")]
    UnsupportedOrder(u32),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no admissible method: {}", .0.join("; "))]
    NoAdmissibleMethod(Vec<String>),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
