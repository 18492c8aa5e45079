use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("matrix is not Hermitian: ||A - A^*|| = {deviation:e} exceeds {allowed:e}")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("index ({i}, {j}) out of range for dimension {d} (indices are 1-based)")]
    IndexOutOfRange { i: usize, j: usize, d: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    /// At d = 2 the six coefficients are only defined up to a shift along the gauge direction.
    #[error(
        "coefficients are not unique at d = 2; use gauge-reduced fitting instead of extraction"
    )]
    GaugeAmbiguous,

    #[error(
        "coefficients of an {m}-copy map are only unique for d >= m + 1 = {needed}, got d = {d}"
    )]
    UniquenessUnavailable { m: usize, d: usize, needed: usize },

    #[error(
        "map has trace terms (l5 = {l5}, l6 = {l6}); operation requires the trace-free family"
    )]
    TraceTermsPresent { l5: String, l6: String },

    #[error("operator is not an orthogonal projector (||P^2 - P|| + ||P - P^*|| = {0:e})")]
    NotProjector(f64),

    #[error("corner coefficients violate mu1*mu4 = mu2*mu3 (|difference| = {0:e})")]
    VarietyViolated(f64),

    #[error("sample count must be at least 1")]
    NoSamples,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(op: &'static str, expected: impl ToString, got: impl ToString) -> Error {
    Error::DimensionMismatch {
        op,
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
