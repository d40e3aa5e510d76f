//! One-to-many JPEG artifact reduction.
//!
//! A compact reverse-mode tensor engine, the generator/discriminator
//! networks built on it, a DCT-domain JPEG degradation model, image
//! quality metrics, and the training/inference loops gluing them
//! together. Everything is deterministic given explicit seeds.

pub mod data;
pub mod error;
pub mod jpeg;
pub mod loss;
pub mod metrics;
pub mod net;
pub mod nn;
pub mod rng;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
