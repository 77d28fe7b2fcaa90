//! Message-passing regression of entity scores over a knowledge graph.
//!
//! The model stacks neighbourhood-aggregation layers (mean, symmetric-
//! normalised, or concatenating aggregators — or none at all for a self-only
//! baseline) followed by a scalar head squashed into the score range. All
//! gradients are derived analytically and verified against central finite
//! differences by the [`gradcheck`] harness. Training is full-batch with a
//! stratified validation split, early stopping, and best-epoch restoration;
//! trained parameters round-trip through versioned JSON checkpoints.

mod checkpoint;
mod error;
mod grad;
mod gradcheck;
mod matrix;
mod model;
mod train;

pub use checkpoint::{
    load_checkpoint, save_checkpoint, Checkpoint, CheckpointMeta, CHECKPOINT_VERSION,
};
pub use error::GnnError;
pub use grad::{loss_and_gradients, mae, mse_loss, Gradients, LossReport};
pub use gradcheck::{check_gradients, GradCheckConfig, GradCheckReport};
pub use matrix::{dot, Matrix};
pub use model::{Aggregator, Arch, ForwardTrace, GnnModel, InputSpec, ModelSpec, Squash};
pub use train::{
    evaluate, stratified_split, train, EpochStats, EvalReport, Optimizer, TrainConfig,
    TrainedModel, SPLIT_BINS,
};
