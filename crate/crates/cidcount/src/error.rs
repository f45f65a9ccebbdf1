use std::io;

/// Errors shared across the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("arity {0} outside the supported range 2..=6")]
    ArityRange(usize),

    #[error("universe size {0} too small, need at least 4 vertices")]
    UniverseTooSmall(u32),

    #[error("vertex {vertex} out of range for a universe of {n} vertices")]
    VertexRange { vertex: u32, n: u32 },

    #[error("expected {expected} sets, got {got}")]
    SetCount { expected: usize, got: usize },

    #[error("sets {i} and {j} overlap but must be pairwise disjoint")]
    OverlappingSets { i: usize, j: usize },

    #[error("part multiplicities sum to {got}, expected {expected}")]
    BadMultiplicity { expected: u32, got: u32 },

    #[error("duplicate edge {edge:?}")]
    DuplicateEdge { edge: Vec<u32> },

    #[error("requested {m} edges but the universe only admits {max}")]
    TooManyEdges { m: u64, max: u128 },

    #[error("random generator stalled after {attempts} attempts")]
    GeneratorStalled { attempts: u64 },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("prefix entry {index}: vertex {vertex} does not lie in bucket {q} of its level")]
    PrefixBucketMismatch { index: usize, vertex: u32, q: u32 },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error(
        "estimation did not settle within the {cap}-iteration cap; last population {population}"
    )]
    IterationCap { cap: u64, population: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
