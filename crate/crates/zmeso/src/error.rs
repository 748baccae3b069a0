use thiserror::Error;

/// Errors shared across the corpus, statistics, arithmetic, and ensemble modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A zero table failed to parse; the line number is 1-based.
    #[error("malformed zero table at line {line}: {reason}")]
    MalformedTable { line: usize, reason: String },

    /// A height or window reaches beyond the tabulated zeros.
    #[error("requested height {requested} exceeds tabulated range {max_height}")]
    OutOfTabulatedRange { requested: f64, max_height: f64 },

    /// A prime-side computation needs Lambda values past the sieve limit.
    #[error("sieve limit {limit} too small, need {needed}")]
    SieveTooSmall { needed: u64, limit: u64 },

    /// A requested table would not fit the memory budget.
    #[error("resource budget exceeded: {0}")]
    ResourceExceeded(String),

    /// The operation is defined only for a restricted family of inputs.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A scaled window does not fit on the eigenangle torus.
    #[error("window {window} exceeds torus half-length {torus}")]
    WindowExceedsTorus { window: f64, torus: f64 },

    /// Combined Fourier supports exceed the pairing-theorem budget.
    #[error("fourier support budget exceeded: total {total} > {budget}")]
    SupportBudgetExceeded { total: f64, budget: f64 },

    /// A configuration value is out of its documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
