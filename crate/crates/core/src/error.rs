use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation would need dyadic digits that are not certified.
    #[error("certified precision exhausted: {0}")]
    Precision(String),

    /// A numerical analysis step failed, e.g. a root bracket without a sign change.
    #[error("analysis error: {0}")]
    Analysis(String),

    /// A sample fell outside the support used for binning.
    #[error("sample {value} outside certified support [{lo}, {hi}]")]
    OutOfSupport { value: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
