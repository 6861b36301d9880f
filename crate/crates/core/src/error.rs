use thiserror::Error;

/// Errors raised by the arithmetic and topology routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: String, modulus: String },

    #[error("invalid torus knot T({a},{b}): {reason}")]
    InvalidTorusKnot { a: i64, b: i64, reason: String },

    #[error("invalid Alexander polynomial: {0}")]
    InvalidAlexander(String),

    #[error("invalid lens space L({p},{q}): {reason}")]
    InvalidLens { p: u64, q: i64, reason: String },

    #[error("label {label} out of range for modulus {modulus}")]
    LabelOutOfRange { label: u64, modulus: u64 },

    #[error("p = {0} is even, so there is no unique spin structure")]
    NoUniqueSpin(u64),

    #[error("slope {slope} is below 2g-1 = {bound}; the surgery formula does not apply")]
    FormulaOutOfRange { slope: String, bound: i64 },

    #[error("invalid slope {0}: numerator and denominator must be positive")]
    InvalidSlope(String),

    #[error("invalid K_p parameter p = {0}: need p >= 3 with 2p+1 prime")]
    InvalidKp(u64),

    #[error("invalid linking group: {0}")]
    InvalidGroup(String),

    #[error("group order {0} is not a perfect square, no metabolizer can exist")]
    NonSquareOrder(u64),

    #[error("group order {order} exceeds the enumeration bound {bound}; split by primes first")]
    TooLarge { order: u64, bound: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid chain complex: {0}")]
    InvalidComplex(String),

    #[error("isomorphism search inconclusive: {0}")]
    Inconclusive(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "division-by-zero",
            Error::NotInvertible { .. } => "not-invertible",
            Error::InvalidTorusKnot { .. } => "invalid-torus-knot",
            Error::InvalidAlexander(_) => "invalid-alexander",
            Error::InvalidLens { .. } => "invalid-lens",
            Error::LabelOutOfRange { .. } => "label-out-of-range",
            Error::NoUniqueSpin(_) => "no-unique-spin",
            Error::FormulaOutOfRange { .. } => "formula-out-of-range",
            Error::InvalidSlope(_) => "invalid-slope",
            Error::InvalidKp(_) => "invalid-kp",
            Error::InvalidGroup(_) => "invalid-group",
            Error::NonSquareOrder(_) => "no-metabolizer-possible",
            Error::TooLarge { .. } => "too-large",
            Error::InvalidInput(_) => "invalid-input",
            Error::InvalidComplex(_) => "invalid-complex",
            Error::Inconclusive(_) => "inconclusive",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
