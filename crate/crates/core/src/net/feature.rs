//! Fixed feature extractor φ backing the perceptual loss: a small
//! convolutional classifier trained once on a labeled toy corpus, then
//! frozen. Features are the activations after the last of four
//! stride-2 stages.

use crate::error::{Error, Result, TensorError, TensorResult};
use crate::nn::{Conv2d, Linear, Padding, ParamMap};
use crate::rng::Rng;
use crate::tensor::{Real, Tensor};

pub const FEATURE_STAGE_CHANNELS: [usize; 4] = [16, 32, 64, 128];
const LEAKY_SLOPE: f64 = 0.2;

pub struct FeatureNet<T: Real = f32> {
    pub convs: Vec<Conv2d<T>>,
    pub head: Linear<T>,
    in_channels: usize,
    classes: usize,
}

impl<T: Real> FeatureNet<T> {
    pub fn new(rng: &mut Rng, in_channels: usize, classes: usize) -> TensorResult<Self> {
        let mut convs = Vec::new();
        let mut prev = in_channels;
        for ch in FEATURE_STAGE_CHANNELS {
            convs.push(Conv2d::new(rng, prev, ch, 3, 2, Padding::Same)?);
            prev = ch;
        }
        Ok(FeatureNet {
            convs,
            head: Linear::new(rng, prev, classes)?,
            in_channels,
            classes,
        })
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// φ(x): activations of the final stage, [n, 128, ⌈h/16⌉, ⌈w/16⌉].
    pub fn features(&self, x: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let s = x.shape();
        if s.len() != 4 || s[1] != self.in_channels {
            return Err(TensorError::BadShape {
                op: "feature_net",
                expected: format!("rank-4 NCHW with {} channels", self.in_channels),
                got: s,
            });
        }
        let mut h = x.clone();
        for conv in &self.convs {
            h = conv.forward(&h)?.leaky_relu(LEAKY_SLOPE);
        }
        Ok(h)
    }

    /// Classifier logits over global-averaged features.
    pub fn logits(&self, x: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let f = self.features(x)?;
        self.head.forward(&f.global_avg_pool()?)
    }

    pub fn param_map(&self) -> ParamMap<T> {
        let mut map = ParamMap::new();
        for (i, conv) in self.convs.iter().enumerate() {
            conv.register(&format!("stage{i}"), &mut map);
        }
        self.head.register("head", &mut map);
        map
    }

    /// Freezes every parameter; gradients still flow through the graph
    /// to the image input, which is all the perceptual loss needs.
    pub fn freeze(&self) {
        self.param_map().set_trainable_tracking(false);
    }

    /// Reconstructs geometry from checkpoint tensor shapes.
    pub fn geometry_from_shapes(
        shapes: &[(String, Vec<usize>)],
    ) -> Result<(usize, usize)> {
        let stage0 = shapes
            .iter()
            .find(|(n, _)| n == "stage0.weight")
            .ok_or_else(|| Error::Format("feature checkpoint lacks stage0.weight".into()))?;
        let head = shapes
            .iter()
            .find(|(n, _)| n == "head.weight")
            .ok_or_else(|| Error::Format("feature checkpoint lacks head.weight".into()))?;
        Ok((stage0.1[1], head.1[1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_geometry_for_64x64() {
        let mut rng = Rng::seed_from(80);
        let net = FeatureNet::<f32>::new(&mut rng, 1, 2).unwrap();
        let x = Tensor::zeros(&[3, 1, 64, 64]);
        let f = net.features(&x).unwrap();
        assert_eq!(f.shape(), vec![3, 128, 4, 4]);
        let logits = net.logits(&x).unwrap();
        assert_eq!(logits.shape(), vec![3, 2]);
    }

    #[test]
    fn odd_sizes_still_flow() {
        let mut rng = Rng::seed_from(81);
        let net = FeatureNet::<f32>::new(&mut rng, 3, 4).unwrap();
        let x = Tensor::zeros(&[1, 3, 50, 70]);
        let f = net.features(&x).unwrap();
        assert_eq!(f.shape(), vec![1, 128, 4, 5]);
    }

    #[test]
    fn freezing_stops_parameter_gradients_but_not_input_gradients() {
        let mut rng = Rng::seed_from(82);
        let net = FeatureNet::<f64>::new(&mut rng, 1, 2).unwrap();
        net.freeze();
        let x = Tensor::param(&[1, 1, 16, 16], vec![0.3; 256]).unwrap();
        let loss = net.features(&x).unwrap().square().sum_all();
        loss.backward().unwrap();
        assert!(x.grad().is_some());
        assert!(net.convs[0].weight.grad().is_none());
    }

    #[test]
    fn wrong_channel_count_is_rejected() {
        let mut rng = Rng::seed_from(83);
        let net = FeatureNet::<f32>::new(&mut rng, 1, 2).unwrap();
        assert!(net.features(&Tensor::zeros(&[1, 3, 32, 32])).is_err());
    }
}
