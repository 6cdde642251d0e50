use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sequence")]
    EmptySequence,
    #[error("array rank {0} outside supported range 1..=4")]
    UnsupportedRank(usize),
    #[error("zero extent in dims {0:?}")]
    ZeroExtent(Vec<usize>),
    #[error("data length {data} does not match dims {dims:?}")]
    DimsMismatch { dims: Vec<usize>, data: usize },
    #[error("chromosome exceeds array capacity ({len} > {capacity})")]
    ChromosomeOverflow { len: usize, capacity: usize },
    #[error("genome at maximum capacity")]
    GenomeAtCapacity,
    #[error("genome layout does not match scheme: {0}")]
    LayoutMismatch(String),
    #[error("mapping scheme {scheme} cannot target a {arch} network")]
    IncompatibleScheme { scheme: String, arch: String },
    #[error("dimension count must be at least 1")]
    ZeroDimension,
    #[error("population size must match distribution lambda ({got} != {expected})")]
    PopulationMismatch { got: usize, expected: usize },
    #[error("non-finite fitness value")]
    NonFiniteFitness,
    #[error("non-finite network input")]
    NonFiniteInput,
    #[error("input length {got}, expected {expected}")]
    InputLength { got: usize, expected: usize },
    #[error("action vector length {got}, expected {expected}")]
    ActionLength { got: usize, expected: usize },
    #[error("compartment count must be at least 1")]
    NoCompartments,
    #[error("simulation diverged")]
    SimulationDiverged,
    #[error("genome file: {0}")]
    GenomeFile(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
