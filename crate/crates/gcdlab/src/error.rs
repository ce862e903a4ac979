use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot factorize 0")]
    ZeroFactorization,

    #[error("prime position {position} exceeds the table length {table_len}")]
    PrimePositionOutOfRange { position: usize, table_len: usize },

    #[error("remaining factor {remainder} has a prime divisor beyond the table (largest tabled prime: {largest})")]
    FactorBeyondTable { remainder: u64, largest: u64 },

    #[error("integer overflow while {context}")]
    Overflow { context: &'static str },

    #[error("weight t_{index} = {value} lies outside (0,1)")]
    WeightOutOfRange { index: usize, value: f64 },

    #[error("explicit weight list increases at index {index}: t_{prev_index} = {prev} < t_{index} = {value}")]
    WeightsNotDecreasing {
        index: usize,
        prev_index: usize,
        prev: f64,
        value: f64,
    },

    #[error("weight t_{index} is undefined for this sequence (length {len})")]
    WeightUndefined { index: usize, len: usize },

    #[error("alpha = {alpha} outside required range {required}")]
    AlphaOutOfRange { alpha: f64, required: &'static str },

    #[error("sequence must be nonempty")]
    EmptySequence,

    #[error("sequence is not strictly increasing at index {index}")]
    NotStrictlyIncreasing { index: usize },

    #[error("index set has a duplicate member at index {index}")]
    DuplicateMember { index: usize },

    #[error("length mismatch: {left} vs {right} ({context})")]
    LengthMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },

    #[error("kappa(t) = {kappa} must be smaller than N = {n}")]
    KappaNotBelowN { kappa: usize, n: usize },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})"
    )]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("grid quadrature supports at most {cap} torus dimensions, got {k}")]
    DimensionCap { k: usize, cap: usize },

    #[error("weight t_{index} = {value} exceeds {max} and makes the kernel too peaky for the grid method; use the Monte Carlo path")]
    WeightTooPeaky { index: usize, value: f64, max: f64 },

    #[error("Monte Carlo estimate requires at least one sample")]
    ZeroSamples,

    #[error("truncation would enumerate {states} states, over the budget of {budget}")]
    StateBudget { states: u128, budget: u64 },

    #[error("exact maximal-function path is limited to {max} terms, got {n}")]
    SystemTooLarge { n: usize, max: usize },

    #[error("N = {n} is too small; need N >= {min} so that log log N is defined")]
    NTooSmall { n: u64, min: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("line {line}: cannot parse {content:?}")]
    Parse { line: usize, content: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
