use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("shape point outside the chart domain: {0}")]
    Domain(String),
    #[error("singular configuration: {0}")]
    Singular(String),
    #[error("repeated eigenvalue at branch {branch} (gap {gap:.3e})")]
    RepeatedEigenvalue { branch: usize, gap: f64 },
    #[error("degenerate shape: {0}")]
    DegenerateShape(String),
    #[error("empty leaf: no sign change of the implicit function")]
    EmptyLeaf,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("no root in bracket [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },
    #[error("abnormal relative equilibrium at parameter {0}")]
    AbnormalAt(f64),
    #[error("point is not on the repeated-eigenvalue locus")]
    NotOnLocus,
    #[error("eigenvalue branch lost: {0}")]
    BranchLost(String),
    #[error("not a relative equilibrium (residual {0:.3e})")]
    NotAnRe(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
