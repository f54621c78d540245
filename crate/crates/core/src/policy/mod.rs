//! Sequence policy trained by policy gradient.
//!
//! The packer fixes orientation and position given an order; this module
//! learns the order. A small pointer network scores the remaining items at
//! each step, REINFORCE with a per-sample baseline trains it against the
//! packed surface area, and sampling, greedy and beam decoding turn it into
//! sequences.

mod checkpoint;
mod decode;
mod network;
mod optim;
mod train;

use thiserror::Error;

use crate::packer::PackError;

pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use decode::{beam_search, greedy_decode, sample_sequence, EpisodeRecord};
pub use network::{
    item_features, log_prob_gradient, policy_forward, sequence_log_prob, ParamLayout,
    PolicyParams,
};
pub use optim::{adam_step, clip_global_norm, l2_norm, AdamState, LrSchedule, StepInfo};
pub use train::{
    reinforce_gradient, train, update_baseline, BaselineStore, RngState, TrainOutcome,
    TrainerConfig, TrainingLog, TrainingLogRow,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("every item is already selected")]
    NothingToSelect,
    #[error("no baseline for sample {0}")]
    NoBaseline(usize),
    #[error("episode refers to unknown sample {0}")]
    UnknownSample(usize),
    #[error("batch is empty")]
    EmptyBatch,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("non-finite value in gradient or parameters")]
    NumericalFault,
    #[error("expected length {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("sequence is not a permutation of the instance's items")]
    BadSequence,
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Pack(#[from] PackError),
}
