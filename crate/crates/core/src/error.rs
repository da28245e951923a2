use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("perturbation theory breaks down: |omega0 - omegaB| = {gap:e} <= A/4 = {limit:e}")]
    Degenerate { gap: f64, limit: f64 },
    #[error("divergent expression {0}")]
    Divergent(&'static str),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("integration unstable: trace drift {0:e}; use a smaller step")]
    Unstable(f64),
    #[error("case hierarchy violated: {0}")]
    CaseViolation(String),
    #[error("target not bracketed: {0}")]
    NotBracketed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
