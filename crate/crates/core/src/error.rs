use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix data has {len} entries, expected {expected} for dim {dim}")]
    BadShape {
        dim: usize,
        len: usize,
        expected: usize,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("not a density matrix: {reason}")]
    NotDensityMatrix { reason: String },

    #[error("constructed strategy matrix is not unitary (max |U†U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("{channel} Kraus set at p = {p} violates completeness: {summary} (max deviation {deviation:e})")]
    Incomplete {
        channel: String,
        p: f64,
        summary: String,
        deviation: f64,
    },

    #[error("payoff trace has imaginary part {imag:e}; state is not Hermitian")]
    ImaginaryPayoff { imag: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
