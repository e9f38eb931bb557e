use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("invalid root datum: {0}")]
    InvalidDatum(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coweight {0} is not dominant")]
    NotDominant(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("entry is not a unit: {0}")]
    NonUnitEntry(String),
    #[error("element is not regular semisimple: {0}")]
    NotRegular(String),
    #[error("fiber is empty")]
    EmptyFiber,
    #[error("dimension {0} is not a non-negative integer")]
    NonIntegralDimension(String),
    #[error("c invariant must be non-negative, got {0}")]
    NegativeC(i64),
    #[error("not the unipotent radical of a standard parabolic: {0}")]
    InvalidParabolic(String),
    #[error("unsupported characteristic: {0}")]
    UnsupportedCharacteristic(String),
    #[error("characteristic two is not supported here")]
    CharTwo,
    #[error("matrix is not unimodular: {0}")]
    NotUnimodular(String),
    #[error("Kottwitz class mismatch: {0}")]
    KottwitzMismatch(String),
    #[error("length {length} exceeds bound {bound}")]
    LengthBound { length: usize, bound: usize },
    #[error("unsupported group type: {0}")]
    UnsupportedType(String),
    #[error("characteristic {p} divides the Weyl group order {order}")]
    CharDividesWeylOrder { p: u64, order: usize },
    #[error("enumeration budget of {0} points exceeded")]
    BudgetExceeded(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("coefficient fields differ")]
    FieldMismatch,
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable identifier used in machine-readable output.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidCartan(_) => "InvalidCartan",
            Error::InvalidDatum(_) => "InvalidDatum",
            Error::UnknownPreset(_) => "UnknownPreset",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotDominant(_) => "NotDominant",
            Error::InsufficientPrecision(_) => "InsufficientPrecision",
            Error::NonUnitEntry(_) => "NonUnitEntry",
            Error::NotRegular(_) => "NotRegular",
            Error::EmptyFiber => "EmptyFiber",
            Error::NonIntegralDimension(_) => "NonIntegralDimension",
            Error::NegativeC(_) => "NegativeC",
            Error::InvalidParabolic(_) => "InvalidParabolic",
            Error::UnsupportedCharacteristic(_) => "UnsupportedCharacteristic",
            Error::CharTwo => "CharTwo",
            Error::NotUnimodular(_) => "NotUnimodular",
            Error::KottwitzMismatch(_) => "KottwitzMismatch",
            Error::LengthBound { .. } => "LengthBound",
            Error::UnsupportedType(_) => "UnsupportedType",
            Error::CharDividesWeylOrder { .. } => "CharDividesWeylOrder",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::Parse(_) => "Parse",
            Error::FieldMismatch => "FieldMismatch",
            Error::NotInvertible(_) => "NotInvertible",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Errors that reflect a mathematical property of valid input rather than malformed input.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::EmptyFiber
                | Error::NotRegular(_)
                | Error::InsufficientPrecision(_)
                | Error::NonIntegralDimension(_)
                | Error::KottwitzMismatch(_)
                | Error::NotInvertible(_)
                | Error::BudgetExceeded(_)
                | Error::CharTwo
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
