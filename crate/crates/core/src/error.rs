use thiserror::Error;

/// Every failure the library reports. Warnings (for example a ping-pong
/// exponent below its threshold) are carried inside reports instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown letter {0:?}")]
    UnknownLetter(char),
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(char),
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("invalid generator name {0:?}: generators are single lowercase letters a-z")]
    InvalidGenerator(String),
    #[error("malformed presentation: {0}")]
    Malformed(String),
    #[error("relator {0} freely reduces to the empty word")]
    EmptyRelator(usize),
    #[error("presentation has no relators")]
    NoRelators,
    #[error("presentation is not verified C'(1/6); Dehn's algorithm is not available")]
    NotVerifiedC16,
    #[error("relators present but C'(1/6) not verified; no word-problem strategy")]
    UnsupportedWordProblem,
    #[error("resource cap exceeded: more than {cap} elements")]
    ResourceCap { cap: usize },
    #[error("generating set is not symmetric: inverse of {0:?} missing")]
    NotSymmetric(String),
    #[error("point out of range of the ball")]
    OutOfRange,
    #[error("empty generating set")]
    EmptyGeneratingSet,
    #[error("element is the identity")]
    IdentityElement,
    #[error("element is not loxodromic")]
    NotLoxodromic,
    #[error("unsupported strategy: {0}")]
    UnsupportedStrategy(String),
    #[error("stable translation length must be positive")]
    NonPositiveTranslation,
    #[error("word is not reduced over the generating set")]
    NotReducedWord,
    #[error("moving family is empty")]
    EmptyFamily,
    #[error("tau {tau} is below the gate {gate}")]
    TauBelowGate { tau: String, gate: String },
    #[error("input out of range: {0}")]
    InputOutOfRange(String),
    #[error("xi must be positive")]
    NonPositiveXi,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid rational {0:?}")]
    InvalidRational(String),
}

impl Error {
    /// Stable machine-readable name, used in structured CLI errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownLetter(_) => "UnknownLetter",
            Error::DuplicateGenerator(_) => "DuplicateGenerator",
            Error::EmptyGenerators => "EmptyGenerators",
            Error::InvalidGenerator(_) => "InvalidGenerator",
            Error::Malformed(_) => "Malformed",
            Error::EmptyRelator(_) => "EmptyRelator",
            Error::NoRelators => "NoRelators",
            Error::NotVerifiedC16 => "NotVerifiedC16",
            Error::UnsupportedWordProblem => "UnsupportedWordProblem",
            Error::ResourceCap { .. } => "ResourceCap",
            Error::NotSymmetric(_) => "NotSymmetric",
            Error::OutOfRange => "OutOfRange",
            Error::EmptyGeneratingSet => "EmptyGeneratingSet",
            Error::IdentityElement => "IdentityElement",
            Error::NotLoxodromic => "NotLoxodromic",
            Error::UnsupportedStrategy(_) => "UnsupportedStrategy",
            Error::NonPositiveTranslation => "NonPositiveTranslation",
            Error::NotReducedWord => "NotReducedWord",
            Error::EmptyFamily => "EmptyFamily",
            Error::TauBelowGate { .. } => "TauBelowGate",
            Error::InputOutOfRange(_) => "InputOutOfRange",
            Error::NonPositiveXi => "NonPositiveXi",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidRational(_) => "InvalidRational",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
