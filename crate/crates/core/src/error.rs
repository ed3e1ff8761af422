use thiserror::Error;

use crate::twins::TwinReport;

/// Errors raised while building or analysing states and observables.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is not one (trace = {0})")]
    TraceNotOne(f64),

    #[error("negative eigenvalue {0:.3e} beyond tolerance")]
    NegativeEigenvalue(f64),

    #[error("vector is not normalized (norm = {0})")]
    NotUnitVector(f64),

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),

    #[error("negative information value {0:.3e} beyond round-off")]
    NegativeInformation(f64),

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("observable acts on subsystem {found}, expected subsystem {expected}")]
    WrongSubsystem { expected: usize, found: usize },

    #[error("twin conditions disagree: {}", describe_disagreement(.0))]
    ConditionDisagreement(Box<TwinReport>),
}

fn describe_disagreement(report: &TwinReport) -> String {
    format!(
        "residuals a={:.3e} b={:.3e} c={:.3e} d={:.3e}",
        report.residual_a, report.residual_b, report.residual_c, report.residual_d
    )
}

pub type Result<T> = std::result::Result<T, Error>;
