//! Training orchestration: feature-extractor pretraining, the adversarial
//! restoration loop, checkpoint-driven inference, and the finite-difference
//! gradient suite used by `check --gradients`.

mod config;
mod feature;
mod gan;
mod infer;
mod suite;

pub use config::TrainConfig;
pub use feature::train_feature_extractor;
pub use gan::{RunArtifacts, StepStats, Trainer, TRAIN_LOG_HEADER};
pub use infer::{pad_to_even, restore_image};
pub use suite::{assert_gradients, gradient_suite, SuiteEntry, GRAD_TOLERANCE};
