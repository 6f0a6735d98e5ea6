//! Exact correlation measures of `±1` sequences and families of sequences.
//!
//! A [`Family`] of `S` sequences of length `N` has cross-correlation measure
//! `Phi_k`, the largest `|sum_{n=m1..m2} prod e_{n+d}(s)|` over canonical
//! patterns of `k` pairs `(s, d)` and admissible windows. For a single
//! sequence this is the correlation measure `C_k`.
//!
//! - [`oracle`]: direct brute-force definitions.
//! - [`engine`]: the fast exact evaluator and pattern counting.
//! - [`randstat`]: seeded random families and Monte Carlo experiments.
//! - [`extremal`]: constructions, bounds, certificates and exhaustive minima.

pub mod cli;
pub mod engine;
pub mod error;
pub mod extremal;
pub mod format;
pub mod oracle;
pub mod randstat;
pub mod sequence;

pub use error::{Error, Result};
pub use sequence::{BinarySequence, Family, MeasureResult, Pair, Pattern};
