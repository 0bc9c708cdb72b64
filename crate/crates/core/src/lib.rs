//! Trace-based repair of Reed-Solomon codewords.
//!
//! A full-length RS code over `F = GF(p^(m*t))` stores one symbol per node.
//! Repairing erased symbols by downloading whole symbols wastes bandwidth;
//! collecting subfield traces instead lets one, two, or three erasures be
//! repaired for `n-1`, `2(n-2)`..`2(n-1)`, and `3(n-3)`..`3(n-1)` sub-symbols
//! respectively. This crate implements the field tower, the subfield linear
//! algebra, the dual-code check construction, every repair scheme, and the
//! bandwidth accounting down to individual sub-symbol transfers.

pub mod analysis;
pub mod code;
pub mod error;
pub mod field;
pub mod linalg;
pub mod repair;
pub mod rng;

pub use code::{CheckVector, CodeParams, Codeword, PartialCodeword};
pub use error::{Error, Result};
pub use field::{Bel, Fel, FieldTower, DEFAULT_MAX_FIELD};
pub use linalg::{Subspace, TraceBasis};
pub use repair::{BandwidthLedger, ErasurePattern, NodeRef, RepairResult};
pub use rng::SplitMix64;
