//! Visual summarization of event-sequence datasets.
//!
//! Three summarization algorithms share one data model and one output
//! representation:
//!
//! - [`coreflow`]: recursive rank-divide-trim, producing a tree.
//! - [`sententree`]: frequent pattern growth, producing a DAG.
//! - [`synopsis`]: MDL-driven agglomerative clustering, producing one linear
//!   pattern per cluster.
//!
//! Summaries are laid out by [`layout`] (tidy tree, layered DAG, equidistant
//! columns), drawn by [`render`] as deterministic SVG, and scored against
//! ground-truth insight queries by [`insight`].
//!
//! The crate is `no_std` and only needs `alloc`. File formats, measurement
//! and the command line live in the companion `seqsum` crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod coreflow;
pub mod insight;
pub mod layout;
pub mod model;
pub mod render;
pub mod sententree;
pub mod summary;
pub mod synopsis;

mod util;

pub use model::{Dataset, DatasetStats, EventId, EventType, ModelError, Sequence};
pub use summary::{Summary, SummaryEdge, SummaryKind, SummaryMeta, SummaryNode};

/// Minimum-support granularity shared by CoreFlow and SentenTree.
///
/// The absolute threshold is fixed once per mining run from the size of the
/// whole dataset and applied unchanged inside every branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinSupport(f64);

impl MinSupport {
    pub fn new(fraction: f64) -> Result<Self, MiningError> {
        if fraction.is_finite() && fraction > 0.0 && fraction <= 1.0 {
            Ok(MinSupport(fraction))
        } else {
            Err(MiningError::InvalidGranularity(fraction))
        }
    }

    pub fn fraction(self) -> f64 {
        self.0
    }

    /// `ceil(fraction * num_sequences)`, never below 1.
    ///
    /// Products that land within 1e-9 of an integer are snapped to it, so
    /// `0.3 * 10` yields 3 and not 4.
    pub fn absolute_threshold(self, num_sequences: usize) -> usize {
        util::ceil_tolerant(self.0 * num_sequences as f64).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MiningError {
    #[error("dataset contains no sequences")]
    EmptyDataset,
    #[error("granularity {0} is outside (0, 1]")]
    InvalidGranularity(f64),
}
