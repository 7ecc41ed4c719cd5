//! Probabilistic Take The Best.
//!
//! TTB compares two items by scanning cues in a fixed order and deciding on
//! the first cue that discriminates. This crate treats the cue order,
//! directions and discrimination thresholds as unknowns, puts a flip-noise
//! likelihood on observed comparisons and computes the posterior over
//! strategies, either exactly or by collapsed Gibbs sampling.
//!
//! ```
//! use pttb::model::{build_comparisons, ItemTable, PairPolicy};
//! use pttb::inference::exhaustive_posterior;
//! use pttb::likelihood::NoisePrior;
//!
//! let table = ItemTable::from_rows(
//!     vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![2.0, 1.0]],
//!     vec![2.0, 1.0, 3.0],
//! ).unwrap();
//! let data = build_comparisons(&table, &PairPolicy::AllPairs, true).unwrap();
//! let post = exhaustive_posterior(&data, &NoisePrior::uniform(), None).unwrap();
//! assert_eq!(post.len(), 8);
//! ```

pub mod baselines;
pub mod embedding;
pub mod error;
pub mod harness;
pub mod inference;
pub mod likelihood;
pub mod model;
pub mod prediction;
pub mod special;
pub mod svg;

pub use error::{Error, Result};
