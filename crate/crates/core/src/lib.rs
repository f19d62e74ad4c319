//! Instance-optimized string fingerprints.
//!
//! A fingerprint maps every byte of a string to one of `n` bins and records
//! which bins are hit, giving an `n`-bit mask. If the mask of a pattern is not
//! a subset of the mask of a value, the value cannot contain the pattern, so
//! `LIKE '%pattern%'` scans can skip it. The partition of bytes into bins
//! decides how often the test lets non-matching rows through, and
//! [`optimizer`] picks one that does so rarely on a given workload.
//!
//! ```
//! use strfp::{Alphabet, Partition};
//!
//! let p = Partition::round_robin(&Alphabet::printable_ascii(), 16).unwrap();
//! let word = p.fingerprint(b"nutella");
//! assert!(p.fingerprint(b"tell").is_candidate_for(word).unwrap());
//! ```

pub mod alphabet;
pub mod error;
pub mod evaluation;
pub mod fingerprint;
pub mod optimizer;
pub mod partition;
pub mod workload;

pub use alphabet::Alphabet;
pub use error::{Error, Result};
pub use fingerprint::{is_candidate, Fingerprint, MAX_WIDTH};
pub use partition::{Partition, Provenance, ProvenanceKind};
