use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported family index m={0}; expected 1..=4")]
    UnsupportedFamily(u32),

    #[error("unknown family name `{0}`; expected one of lc, ks, hurwitz8, hurwitz16")]
    UnknownFamilyName(String),

    #[error("shape mismatch: expected length {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("invalid φ operator index {index}; valid range is {first}..={last}")]
    InvalidOperator { index: usize, first: usize, last: usize },

    #[error("non-finite field value at {0:?}")]
    NonFinite(Vec<f64>),

    #[error("singular point: |u|^2 = {norm_sq:e} is below the floor {floor:e}")]
    SingularPoint { norm_sq: f64, floor: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unbound state: E = {0} must be negative")]
    UnboundState(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed matrix template on line {line}: {reason}")]
    Template { line: usize, reason: String },
}
