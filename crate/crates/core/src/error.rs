use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument in {op}: {msg}")]
    InvalidArgument { op: &'static str, msg: String },

    #[error("state not normalized: norm^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("{op}: value {value} outside [0, 1] beyond tolerance")]
    OutOfRange { op: &'static str, value: f64 },

    #[error("{op} did not converge: {msg}")]
    NoConvergence { op: &'static str, msg: String },

    #[error("{op}: tolerance breach ({msg})")]
    ToleranceBreach { op: &'static str, msg: String },

    #[error("{op}: near confinement-induced resonance (denominator {denominator})")]
    Resonance { op: &'static str, denominator: f64 },

    #[error("{op}: no root in bracket [{lo}, {hi}]")]
    NoRoot { op: &'static str, lo: f64, hi: f64 },
}

impl Error {
    pub(crate) fn invalid(op: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidArgument {
            op,
            msg: msg.into(),
        }
    }
}
