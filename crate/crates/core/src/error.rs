use core::fmt;

/// Every failure the core can report. Variants carry just enough context for
/// the CLI to render a one-line JSON error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    OutOfWindow,
    BudgetExceeded { what: &'static str, limit: u64 },
    WindowTooSmall { need: usize, have: usize },
    ZeroAlphabet,
    EmptySet,
    NoPatterns,
    HeaderMismatch,
    Overflow,
    DimensionMismatch { expected: usize, found: usize },
    LetterOutOfRange { letter: u32, size: u32 },
    BudgetExhausted { steps: u64 },
    MalformedMachine(&'static str),
    CapExceeded { cap: usize },
    InvalidParams(&'static str),
    SizeMismatch { expected: usize, found: usize },
    NoCompleteCell,
    InvalidWindow,
    AlphabetTooLarge { size: u32, layer: usize },
    NotSft,
    UnknownOperator(usize),
    InvalidClaim(&'static str),
    NotBit { value: u64 },
    Parse(alloc::string::String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfWindow => f.write_str("pattern cell falls outside the window"),
            Error::BudgetExceeded { what, limit } => {
                write!(f, "{what} exceeds the configured cap of {limit}")
            }
            Error::WindowTooSmall { need, have } => {
                write!(f, "window of length {have} is shorter than {need}")
            }
            Error::ZeroAlphabet => f.write_str("stream header declares an empty alphabet"),
            Error::EmptySet => f.write_str("cannot enumerate the empty set"),
            Error::NoPatterns => f.write_str("subshift forbids nothing and has no code"),
            Error::HeaderMismatch => f.write_str("code header does not describe a valid alphabet and dimension"),
            Error::Overflow => f.write_str("value does not fit in 64 bits"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "expected dimension {expected}, found {found}")
            }
            Error::LetterOutOfRange { letter, size } => {
                write!(f, "letter {letter} is outside an alphabet of size {size}")
            }
            Error::BudgetExhausted { steps } => write!(f, "step budget of {steps} exhausted"),
            Error::MalformedMachine(why) => write!(f, "malformed machine: {why}"),
            Error::CapExceeded { cap } => write!(f, "search cap {cap} exceeded"),
            Error::InvalidParams(why) => write!(f, "invalid parameters: {why}"),
            Error::SizeMismatch { expected, found } => {
                write!(f, "expected {expected} items, found {found}")
            }
            Error::NoCompleteCell => f.write_str("window holds no complete meta coding cell"),
            Error::InvalidWindow => f.write_str("window is not a factor of the skeleton"),
            Error::AlphabetTooLarge { size, layer } => {
                write!(f, "alphabet of size {size} does not fit in {layer} coding bits")
            }
            Error::NotSft => f.write_str("target is not of finite type"),
            Error::UnknownOperator(i) => write!(f, "no operator registered at index {i}"),
            Error::InvalidClaim(why) => write!(f, "invalid claim: {why}"),
            Error::NotBit { value } => write!(f, "{value} is not a bit"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

impl Error {
    /// Stable machine-readable tag, used as the `error` field of CLI output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OutOfWindow => "OutOfWindow",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::WindowTooSmall { .. } => "WindowTooSmall",
            Error::ZeroAlphabet => "ZeroAlphabet",
            Error::EmptySet => "EmptySet",
            Error::NoPatterns => "NoPatterns",
            Error::HeaderMismatch => "HeaderMismatch",
            Error::Overflow => "Overflow",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::LetterOutOfRange { .. } => "LetterOutOfRange",
            Error::BudgetExhausted { .. } => "BudgetExhausted",
            Error::MalformedMachine(_) => "MalformedMachine",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::InvalidParams(_) => "InvalidParams",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::NoCompleteCell => "NoCompleteCell",
            Error::InvalidWindow => "InvalidWindow",
            Error::AlphabetTooLarge { .. } => "AlphabetTooLarge",
            Error::NotSft => "NotSFT",
            Error::UnknownOperator(_) => "UnknownOperator",
            Error::InvalidClaim(_) => "InvalidClaim",
            Error::NotBit { .. } => "NotBit",
            Error::Parse(_) => "Parse",
        }
    }
}
