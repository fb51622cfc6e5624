use thiserror::Error;

use crate::shift::Word;

/// Errors raised by subshift, factor-map, potential and measure operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size must be at least 1")]
    InvalidAlphabet,

    #[error("transition matrix must be square, got {rows} rows with a row of width {width}")]
    NonSquareMatrix { rows: usize, width: usize },

    #[error("dead symbol {symbol}: its transition row or column is all zero")]
    DeadSymbol { symbol: usize },

    #[error("labeled graph is invalid: {0}")]
    BadGraph(String),

    #[error("word {word} is not admissible in the subshift")]
    InadmissibleWord { word: Word },

    #[error("word {word} has no admissible preimage under the factor map")]
    NotSurjective { word: Word },

    #[error("image {word} of an admissible domain word is not admissible in the codomain")]
    ImageLeavesCodomain { word: Word },

    #[error("symbol map has {got} entries but the domain alphabet has {expected}")]
    SymbolMapSize { got: usize, expected: usize },

    #[error("symbol map sends symbol {symbol} to {image}, outside the codomain alphabet of size {alphabet}")]
    SymbolMapRange {
        symbol: usize,
        image: usize,
        alphabet: usize,
    },

    #[error("potential table is missing an entry for window word {word}")]
    MissingTableEntry { word: Word },

    #[error("potential table entry for {word} is {value}, which is not finite")]
    NonFiniteTableEntry { word: Word, value: f64 },

    #[error("operation `{op}` requires {requirement}")]
    Unsupported { op: &'static str, requirement: String },

    #[error("transition matrix is not irreducible and aperiodic")]
    NotPrimitive,

    #[error("cylinder distributions are at mismatched levels {left} and {right}")]
    LevelMismatch { left: usize, right: usize },

    #[error("measure resolves cylinders only up to level {have}, but level {need} is required")]
    InsufficientLevel { have: usize, need: usize },

    #[error("near-multiplicativity of preimage counts failed up to the scan bound: {0}")]
    ConditionA(String),

    #[error("fiber-ratio bound failed; witness cylinder {word} has ratio {ratio:.6e} at level {level}")]
    RatioBound { word: Word, ratio: f64, level: usize },

    #[error("eventually periodic point is not admissible: {0}")]
    BadPeriodicPoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
