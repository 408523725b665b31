use thiserror::Error;

/// Errors produced by pattern construction, matrix parsing and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// The comparison graph is not weakly connected, so the weight vector of
    /// the requested method is not unique.
    #[error(
        "the comparison graph is not weakly connected: the weight vector is only unique \
         when every pair of alternatives is linked by a chain of known comparisons"
    )]
    NotConnected,

    #[error("at least 2 alternatives are required, got {n}")]
    TooFewAlternatives { n: usize },

    #[error("invalid edge ({i}, {j}) for {n} vertices: need 1 <= i < j <= n")]
    InvalidEdge { i: usize, j: usize, n: usize },

    #[error("pattern id {id} out of range for n = {n} ({bits} comparison positions)")]
    PatternIdOutOfRange { id: u64, n: usize, bits: usize },

    #[error("{n} vertices need {bits} comparison positions; at most 63 are supported")]
    PatternTooLarge { n: usize, bits: usize },

    #[error("entry ({i}, {j}) = {value} is not in {{b, 1/b}} for b = {b}")]
    NotOrdinal { i: usize, j: usize, value: f64, b: f64 },

    #[error("preference intensity must satisfy b > 1, got {b}")]
    InvalidIntensity { b: f64 },

    #[error("exponent must be positive, got {h}")]
    NonPositiveExponent { h: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("entry ({i}, {j}) must be positive")]
    NonPositiveEntry { i: usize, j: usize },

    #[error("diagonal entry ({i}, {i}) must be 1")]
    NonUnitDiagonal { i: usize },

    #[error("entries ({i}, {j}) and ({j}, {i}) are not reciprocal: {a} * {b} differs from 1 by more than 1e-9")]
    NonReciprocal { i: usize, j: usize, a: f64, b: f64 },

    #[error("entry ({i}, {j}) is missing but ({j}, {i}) is given; missing entries come in symmetric pairs")]
    AsymmetricMissing { i: usize, j: usize },

    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("line {line}: cannot parse '{token}' as a matrix entry")]
    BadEntry { line: usize, token: String },

    #[error("line {line}: {msg}")]
    BadPatternLine { line: usize, msg: String },

    #[error("the matrix has missing entries; this operation needs a complete matrix")]
    IncompleteMatrix,

    #[error("random index excess must be positive, got {excess}")]
    NonPositiveExcess { excess: f64 },

    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("completion search did not converge within {sweeps} sweeps")]
    CompletionDiverged { sweeps: usize },

    #[error("linear system is singular")]
    SingularSystem,

    #[error("invalid family parameters: need k >= 1 and m >= 2, got k = {k}, m = {m}")]
    InvalidFamily { k: usize, m: usize },

    #[error("invalid search task: {msg}")]
    InvalidTask { msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
