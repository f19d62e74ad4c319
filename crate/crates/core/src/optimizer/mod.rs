//! Choosing a partition that minimizes false positives on a training
//! workload.
//!
//! The objective counts `(query, word)` pairs where the word does not contain
//! the query and the fingerprints prove it, i.e. the query fingerprint has a
//! bin the word fingerprint lacks. [`exact_solve`] enumerates all partitions
//! of small alphabets, [`local_search`] is the anytime heuristic for real
//! alphabets, and [`build_mip`] produces the linearized integer program for
//! external solvers.

mod exact;
mod instance;
mod local_search;
pub mod mip;
mod solution;
mod trace;

pub use exact::{exact_solve, MAX_EXACT_ALPHABET};
pub use instance::{objective, Objective, TrainingInstance};
pub use local_search::{local_search, Init, LocalSearchConfig, TieBreak, DEFAULT_TIME_LIMIT};
pub use mip::{build_mip, export_lp, ModelInstance};
pub use solution::{import_solution, BINARY_TOLERANCE};
pub use trace::{Incumbent, SolveStatus, SolveTrace};
