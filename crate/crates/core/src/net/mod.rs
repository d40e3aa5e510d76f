//! The three networks: restoration net F(y, z), discriminator D, and
//! the small classifier whose convolutional trunk provides perceptual
//! features. Plus checkpoint serialization shared by all of them.

mod checkpoint;
mod discriminator;
mod feature;
mod proposal;

pub use checkpoint::{
    checkpoint_channels, load_checkpoint_into, read_checkpoint, save_checkpoint,
    CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use discriminator::{DiscriminatorNet, DISC_MIN_INPUT, DISC_UNIT_CHANNELS};
pub use feature::{FeatureNet, FEATURE_STAGE_CHANNELS};
pub use proposal::{ProposalNet, PROPOSAL_AGG_UNITS, PROPOSAL_BRANCH_UNITS, PROPOSAL_WIDTH};

use crate::error::TensorResult;
use crate::rng::Rng;
use crate::tensor::{Real, Tensor};

/// Draws the noise input for F: an [n, 1, h, w] map of i.i.d. standard
/// normals.
pub fn sample_z<T: Real>(rng: &mut Rng, n: usize, h: usize, w: usize) -> TensorResult<Tensor<T>> {
    let data: Vec<T> = (0..n * h * w)
        .map(|_| T::from_f64(rng.normal()))
        .collect();
    Tensor::constant(&[n, 1, h, w], data)
}
