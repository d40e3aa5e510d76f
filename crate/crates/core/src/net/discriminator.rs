//! Discriminator D: four conv units (stride-1 conv then stride-2 conv,
//! filter counts 64/128/256/512, all 4×4), batch norm + Leaky ReLU
//! after every conv except the last, and a logistic classifier over the
//! globally averaged final feature map.

use crate::error::{TensorError, TensorResult};
use crate::nn::{BatchNorm2d, BnMode, Conv2d, Linear, Padding, ParamMap};
use crate::rng::Rng;
use crate::tensor::{Real, Tensor};

pub const DISC_UNIT_CHANNELS: [usize; 4] = [64, 128, 256, 512];
const LEAKY_SLOPE: f64 = 0.2;
/// Four stride-2 halvings need at least this much input per side.
pub const DISC_MIN_INPUT: usize = 16;

pub struct DiscriminatorNet<T: Real = f32> {
    convs: Vec<Conv2d<T>>,
    /// One per conv except the last.
    bns: Vec<BatchNorm2d<T>>,
    head: Linear<T>,
    in_channels: usize,
}

impl<T: Real> DiscriminatorNet<T> {
    pub fn new(rng: &mut Rng, in_channels: usize) -> TensorResult<Self> {
        let mut convs = Vec::new();
        let mut bns = Vec::new();
        let mut prev = in_channels;
        for ch in DISC_UNIT_CHANNELS {
            convs.push(Conv2d::new(rng, prev, ch, 4, 1, Padding::Same)?);
            convs.push(Conv2d::new(rng, ch, ch, 4, 2, Padding::Same)?);
            prev = ch;
        }
        for conv in convs.iter().take(convs.len() - 1) {
            bns.push(BatchNorm2d::new(conv.weight.shape()[0])?);
        }
        Ok(DiscriminatorNet {
            convs,
            bns,
            head: Linear::new(rng, prev, 1)?,
            in_channels,
        })
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn head(&self) -> &Linear<T> {
        &self.head
    }

    pub fn set_mode(&self, mode: BnMode) {
        for bn in &self.bns {
            bn.set_mode(mode);
        }
    }

    /// Probability of "natural", shape [n, 1], strictly inside (0,1).
    pub fn forward(&self, x: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let s = x.shape();
        if s.len() != 4 || s[1] != self.in_channels {
            return Err(TensorError::BadShape {
                op: "discriminator",
                expected: format!("rank-4 NCHW with {} channels", self.in_channels),
                got: s,
            });
        }
        if s[2] < DISC_MIN_INPUT || s[3] < DISC_MIN_INPUT {
            return Err(TensorError::BadArg {
                op: "discriminator",
                msg: format!(
                    "input {}×{} too small for four stride-2 units (min {DISC_MIN_INPUT})",
                    s[2], s[3]
                ),
            });
        }
        let mut h = x.clone();
        for (i, conv) in self.convs.iter().enumerate() {
            h = conv.forward(&h)?;
            if let Some(bn) = self.bns.get(i) {
                h = bn.forward(&h)?.leaky_relu(LEAKY_SLOPE);
            }
        }
        Ok(self.head.forward(&h.global_avg_pool()?)?.sigmoid())
    }

    /// Internal feature shapes for one input size (test/debug aid).
    pub fn stage_shapes(&self, x: &Tensor<T>) -> TensorResult<Vec<Vec<usize>>> {
        let mut h = x.clone();
        let mut shapes = Vec::new();
        for (i, conv) in self.convs.iter().enumerate() {
            h = conv.forward(&h)?;
            if let Some(bn) = self.bns.get(i) {
                h = bn.forward(&h)?.leaky_relu(LEAKY_SLOPE);
            }
            if i % 2 == 1 {
                shapes.push(h.shape());
            }
        }
        Ok(shapes)
    }

    pub fn param_map(&self) -> ParamMap<T> {
        let mut map = ParamMap::new();
        for (i, conv) in self.convs.iter().enumerate() {
            conv.register(&format!("conv{i}"), &mut map);
        }
        for (i, bn) in self.bns.iter().enumerate() {
            bn.register(&format!("bn{i}"), &mut map);
        }
        self.head.register("head", &mut map);
        map
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::check_scalar_fn;

    #[test]
    fn stage_shapes_for_64x64_input() {
        let mut rng = Rng::seed_from(90);
        let d = DiscriminatorNet::<f32>::new(&mut rng, 1).unwrap();
        let x = Tensor::zeros(&[2, 1, 64, 64]);
        let shapes = d.stage_shapes(&x).unwrap();
        assert_eq!(
            shapes,
            vec![
                vec![2, 64, 32, 32],
                vec![2, 128, 16, 16],
                vec![2, 256, 8, 8],
                vec![2, 512, 4, 4],
            ]
        );
    }

    #[test]
    fn zero_classifier_outputs_one_half() {
        let mut rng = Rng::seed_from(91);
        let d = DiscriminatorNet::<f32>::new(&mut rng, 1).unwrap();
        let n = d.head.weight.numel();
        d.head.weight.set_data(&vec![0.0; n]).unwrap();
        d.head.bias.set_data(&[0.0]).unwrap();
        let x = Tensor::full(&[2, 1, 16, 16], 0.25);
        let p = d.forward(&x).unwrap().to_vec();
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn outputs_stay_strictly_inside_unit_interval() {
        let mut rng = Rng::seed_from(92);
        let d = DiscriminatorNet::<f32>::new(&mut rng, 1).unwrap();
        for _ in 0..20 {
            let data: Vec<f32> = (0..2 * 256)
                .map(|_| rng.uniform(-1.0, 1.0) as f32)
                .collect();
            let x = Tensor::constant(&[2, 1, 16, 16], data).unwrap();
            for p in d.forward(&x).unwrap().to_vec() {
                assert!(p > 0.0 && p < 1.0, "probability {p}");
            }
        }
    }

    #[test]
    fn small_inputs_are_rejected() {
        let mut rng = Rng::seed_from(93);
        let d = DiscriminatorNet::<f32>::new(&mut rng, 1).unwrap();
        assert!(d.forward(&Tensor::zeros(&[1, 1, 15, 16])).is_err());
        assert!(d.forward(&Tensor::zeros(&[1, 1, 8, 8])).is_err());
    }

    #[test]
    fn parameter_map_counts_match_architecture() {
        let mut rng = Rng::seed_from(94);
        let d = DiscriminatorNet::<f32>::new(&mut rng, 1).unwrap();
        let map = d.param_map();
        // 8 convs + 7 BNs (γ, β) + head.
        let expect_convs: usize = [
            (1, 64),
            (64, 64),
            (64, 128),
            (128, 128),
            (128, 256),
            (256, 256),
            (256, 512),
            (512, 512),
        ]
        .iter()
        .map(|&(i, o)| o * i * 16 + o)
        .sum();
        let expect_bn: usize = [64, 64, 128, 128, 256, 256, 512]
            .iter()
            .map(|c| 2 * c)
            .sum();
        assert_eq!(map.total_parameters(), expect_convs + expect_bn + 512 + 1);
    }

    #[test]
    fn input_gradient_matches_finite_differences() {
        let mut rng = Rng::seed_from(95);
        let d = DiscriminatorNet::<f64>::new(&mut rng, 1).unwrap();
        d.set_mode(BnMode::Eval);
        let xd: Vec<f64> = (0..2 * 256).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let x = Tensor::param(&[2, 1, 16, 16], xd).unwrap();
        let mut rng2 = Rng::seed_from(96);
        let report = check_scalar_fn(&[x], 1e-5, 50, &mut rng2, |ins| {
            Ok(d.forward(&ins[0])?.clamp(1e-7, 1.0 - 1e-7).ln().neg().mean_all())
        })
        .unwrap();
        assert!(report.max_rel_err < 1e-4, "err {}", report.max_rel_err);
    }
}
