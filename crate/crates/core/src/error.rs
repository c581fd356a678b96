use alloc::string::String;
use core::fmt;

use thiserror::Error;

/// Which condition of triple admissibility failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleFailure {
    OddSum,
    SumTooLarge,
    Triangle,
}

impl fmt::Display for TripleFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TripleFailure::OddSum => "odd sum",
            TripleFailure::SumTooLarge => "sum exceeds 2(r-2)",
            TripleFailure::Triangle => "triangle inequality violated",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("r must be an odd integer >= 3, got {0}")]
    InvalidRoot(u32),
    #[error("argument {value} outside 0..={max}")]
    Domain { value: i64, max: i64 },
    #[error("color {color} outside I_r = 0..={max}")]
    ColorOutOfRange { color: u32, max: u32 },
    #[error("face ({},{},{}) {reason}", .triple[0], .triple[1], .triple[2])]
    NotAdmissible { triple: [u32; 3], reason: TripleFailure },
    #[error("cannot add real and imaginary values")]
    PhaseMix,
    #[error("growth rate undefined for a zero value")]
    UndefinedGrowth,
    #[error("region factor with nonzero modified gleam has a phase outside the quarter-turn lattice")]
    UnsupportedPhase,
    #[error("invalid gluing spec: {0}")]
    Spec(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("coloring has {got} entries, expected {expected}")]
    ColoringLength { expected: usize, got: usize },
    #[error("outside the oracle's supported range: {0}")]
    Range(String),
}
