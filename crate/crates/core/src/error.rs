use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fingerprint width {0} is outside 1..=64")]
    WidthOutOfRange(usize),

    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("invalid fingerprint text {text:?}: {reason}")]
    BadFingerprint { text: String, reason: &'static str },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("partition file line {line}: {reason}")]
    PartitionFormat { line: usize, reason: String },

    #[error("workload file line {line}: {reason}")]
    WorkloadFormat { line: usize, reason: String },

    #[error("solution line {line}: {reason}")]
    SolutionFormat { line: usize, reason: String },

    #[error("solution violates the assignment constraints: {0}")]
    InfeasibleSolution(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("cannot mark {n_seen} of {total} queries as seen")]
    SplitOutOfRange { n_seen: usize, total: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty pattern")]
    EmptyPattern,

    #[error("alphabet of {size} characters exceeds the exact-enumeration guard of {max}")]
    AlphabetTooLarge { size: usize, max: usize },

    #[error("empty {role} string at index {index} cannot enter the model")]
    EmptyModelString { role: &'static str, index: usize },

    #[error("{role} string {index} contains byte {byte} outside the alphabet")]
    ByteOutsideAlphabet {
        role: &'static str,
        index: usize,
        byte: u8,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}
