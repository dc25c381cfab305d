use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("triangle inequality violated: d({u},{w}) = {uw} > d({u},{v}) + d({v},{w}) = {via}")]
    Triangle {
        u: usize,
        v: usize,
        w: usize,
        uw: f64,
        via: f64,
    },

    #[error("invalid distance d({u},{v}) = {value}")]
    BadDistance { u: usize, v: usize, value: f64 },

    #[error("matrix marked symmetric but d({u},{v}) != d({v},{u})")]
    NotSymmetric { u: usize, v: usize },

    #[error("objective {0} requires a symmetric instance")]
    ObjectiveNeedsSymmetric(&'static str),

    #[error("objective mismatch: expected {expected}, got {got}")]
    ObjectiveMismatch { expected: &'static str, got: &'static str },

    #[error("invalid k = {k} for n = {n}")]
    BadK { k: usize, n: usize },

    #[error("invalid center list: {0}")]
    BadCenters(String),

    #[error("instance too large for exhaustive enumeration: C({n},{k}) = {count} > {limit}")]
    TooLarge {
        n: usize,
        k: usize,
        count: u128,
        limit: u128,
    },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("perturbation invariant violated at ({u},{v}): {msg}")]
    Perturbation { u: usize, v: usize, msg: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("generator failed: {0}")]
    Generator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
