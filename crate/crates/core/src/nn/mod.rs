//! Neural network layers and parameter bookkeeping.

mod batchnorm;
mod conv;
mod deconv;
mod residual;

pub use batchnorm::{BatchNorm2d, BnMode};
pub use conv::{conv2d, Conv2d, Padding};
pub use deconv::{plain_deconv_1d, shift_average_deconv_1d, Deconv2d};
pub use residual::ResidualUnit;

use crate::error::{TensorError, TensorResult};
use crate::rng::Rng;
use crate::tensor::{he_uniform, Real, Tensor};

/// Named parameter registry for a network: the unit of checkpointing
/// and optimization. Entries keep registration order; `trainable`
/// distinguishes learned parameters from carried state (running
/// statistics).
pub struct ParamMap<T: Real = f32> {
    entries: Vec<(String, Tensor<T>, bool)>,
}

impl<T: Real> ParamMap<T> {
    pub fn new() -> Self {
        ParamMap { entries: Vec::new() }
    }

    pub fn add(&mut self, name: String, tensor: Tensor<T>, trainable: bool) {
        debug_assert!(
            self.get(&name).is_none(),
            "duplicate parameter name {name}"
        );
        self.entries.push((name, tensor, trainable));
    }

    pub fn entries(&self) -> &[(String, Tensor<T>, bool)] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&Tensor<T>> {
        self.entries
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, t, _)| t)
    }

    pub fn trainable_tensors(&self) -> Vec<Tensor<T>> {
        self.entries
            .iter()
            .filter(|(_, _, tr)| *tr)
            .map(|(_, t, _)| t.clone())
            .collect()
    }

    /// Freezes or unfreezes every trainable entry (GAN alternation).
    pub fn set_trainable_tracking(&self, on: bool) {
        for (_, t, tr) in &self.entries {
            if *tr {
                t.set_requires_grad(on);
            }
        }
    }

    pub fn total_parameters(&self) -> usize {
        self.entries
            .iter()
            .filter(|(_, _, tr)| *tr)
            .map(|(_, t, _)| t.numel())
            .sum()
    }
}

impl<T: Real> Default for ParamMap<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Fully connected layer: weight [in, out], output = x·W + b.
pub struct Linear<T: Real = f32> {
    pub weight: Tensor<T>,
    pub bias: Tensor<T>,
}

impl<T: Real> Linear<T> {
    pub fn new(rng: &mut Rng, in_features: usize, out_features: usize) -> TensorResult<Self> {
        Ok(Linear {
            weight: he_uniform(rng, &[in_features, out_features], in_features)?,
            bias: Tensor::param(&[out_features], vec![T::zero(); out_features])?,
        })
    }

    pub fn forward(&self, x: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let s = x.shape();
        if s.len() != 2 || s[1] != self.weight.shape()[0] {
            return Err(TensorError::BadShape {
                op: "linear",
                expected: format!("[n, {}]", self.weight.shape()[0]),
                got: s,
            });
        }
        x.matmul(&self.weight)?.add_row_bias(&self.bias)
    }

    pub fn register(&self, prefix: &str, map: &mut ParamMap<T>) {
        map.add(format!("{prefix}.weight"), self.weight.clone(), true);
        map.add(format!("{prefix}.bias"), self.bias.clone(), true);
    }
}
