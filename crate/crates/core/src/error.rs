use thiserror::Error;

/// Errors raised by the library. The CLI maps each variant family onto an
/// exit code (see `cli::exit_code`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("indeterminate sum +inf + -inf")]
    Indeterminate,
    #[error("exponent arithmetic overflowed i64")]
    Overflow,
    #[error("result has no affine-tail presentation: {0}")]
    NonRepresentableTail(String),
    #[error("window of {0} entries exceeds the supported size")]
    WindowTooLarge(u64),
    #[error("incompatible primes {0} and {1}")]
    IncompatiblePrimes(u64, u64),
    #[error("field kind mismatch: {0}")]
    KindMismatch(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("the zero element has no rank-two valuation")]
    ZeroElement,
    #[error("non-admissible sequence: {0}")]
    NonAdmissibleSequence(String),
    #[error("submodule is not compactoid")]
    NotCompactoid,
    #[error("submodule is not bounded")]
    NotBounded,
    #[error("values do not define a series: {0}")]
    NonConvergentValues(String),
    #[error("unknown module name `{0}`")]
    UnknownName(String),
    #[error("oracle window insufficient: {0}")]
    WindowInsufficient(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
