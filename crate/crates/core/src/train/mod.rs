//! Gradient-based training, evaluation metrics and seed studies.

mod engine;
mod gradcheck;
mod metrics;
mod optim;
mod samples;
mod stats;

pub use engine::{
    batch_loss, batch_loss_and_grad, train_two_stage, validation_loss, write_history, EpochRecord, Stage,
    TrainConfig, TrainOutcome, CHUNK,
};
pub use gradcheck::{check_gradients, GradCheck, REL_FLOOR};
pub use metrics::{evaluate, evaluate_with, metrics_of, subsample_windows, Metrics};
pub use optim::{Adam, PlateauSchedule};
pub use samples::{SampleSet, SpanSet};
pub use stats::{mean_std, paired_t_test, seed_study, PairedTTest, SeedStudy, IDENTICAL};
