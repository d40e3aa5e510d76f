//! Pre-activation residual unit: BN → ReLU → conv3×3 → BN → ReLU →
//! conv3×3, added back onto the input. Channel count and spatial size
//! are preserved.

use crate::error::TensorResult;
use crate::rng::Rng;
use crate::tensor::{Real, Tensor};

use super::{BatchNorm2d, BnMode, Conv2d, Padding};

pub struct ResidualUnit<T: Real = f32> {
    pub bn1: BatchNorm2d<T>,
    pub conv1: Conv2d<T>,
    pub bn2: BatchNorm2d<T>,
    pub conv2: Conv2d<T>,
}

impl<T: Real> ResidualUnit<T> {
    pub fn new(rng: &mut Rng, channels: usize) -> TensorResult<Self> {
        Ok(ResidualUnit {
            bn1: BatchNorm2d::new(channels)?,
            conv1: Conv2d::new(rng, channels, channels, 3, 1, Padding::Same)?,
            bn2: BatchNorm2d::new(channels)?,
            conv2: Conv2d::new(rng, channels, channels, 3, 1, Padding::Same)?,
        })
    }

    pub fn set_mode(&self, mode: BnMode) {
        self.bn1.set_mode(mode);
        self.bn2.set_mode(mode);
    }

    pub fn forward(&self, x: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let h = self.conv1.forward(&self.bn1.forward(x)?.relu())?;
        let h = self.conv2.forward(&self.bn2.forward(&h)?.relu())?;
        x.add(&h)
    }

    pub fn register(&self, prefix: &str, map: &mut super::ParamMap<T>) {
        self.bn1.register(&format!("{prefix}.bn1"), map);
        self.conv1.register(&format!("{prefix}.conv1"), map);
        self.bn2.register(&format!("{prefix}.bn2"), map);
        self.conv2.register(&format!("{prefix}.conv2"), map);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::check_scalar_fn;

    fn zeroed_unit(channels: usize) -> ResidualUnit<f64> {
        let mut rng = Rng::seed_from(60);
        let unit = ResidualUnit::<f64>::new(&mut rng, channels).unwrap();
        let n = unit.conv1.weight.numel();
        unit.conv1.weight.set_data(&vec![0.0; n]).unwrap();
        unit.conv2.weight.set_data(&vec![0.0; n]).unwrap();
        unit
    }

    #[test]
    fn zero_branch_weights_give_exact_identity() {
        let unit = zeroed_unit(2);
        let mut rng = Rng::seed_from(61);
        let xd: Vec<f64> = (0..2 * 2 * 4 * 4).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let x = Tensor::constant(&[2, 2, 4, 4], xd.clone()).unwrap();
        let y = unit.forward(&x).unwrap();
        assert_eq!(y.to_vec(), xd);
    }

    #[test]
    fn identity_path_carries_gradient() {
        let unit = zeroed_unit(1);
        let mut rng = Rng::seed_from(62);
        let xd: Vec<f64> = (0..16).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let x = Tensor::param(&[1, 1, 4, 4], xd).unwrap();
        let loss = unit.forward(&x).unwrap().sum_all();
        loss.backward().unwrap();
        assert_eq!(x.grad().unwrap(), vec![1.0; 16]);
    }

    #[test]
    fn shape_is_preserved() {
        let mut rng = Rng::seed_from(63);
        let unit = ResidualUnit::<f32>::new(&mut rng, 3).unwrap();
        let x = Tensor::zeros(&[2, 3, 5, 7]);
        // An all-zero input still has valid batch statistics (var 0).
        let y = unit.forward(&x).unwrap();
        assert_eq!(y.shape(), vec![2, 3, 5, 7]);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = Rng::seed_from(64);
        let unit = ResidualUnit::<f64>::new(&mut rng, 2).unwrap();
        unit.set_mode(BnMode::Eval);
        unit.bn1.running_mean.set_data(&[0.1, -0.2]).unwrap();
        unit.bn1.running_var.set_data(&[1.5, 0.8]).unwrap();
        unit.bn2.running_mean.set_data(&[0.05, 0.3]).unwrap();
        unit.bn2.running_var.set_data(&[1.2, 0.9]).unwrap();
        let xd: Vec<f64> = (0..2 * 2 * 4 * 4).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let x = Tensor::param(&[2, 2, 4, 4], xd).unwrap();
        let w1 = unit.conv1.weight.clone();
        let b1 = unit.conv1.bias.clone();
        let mut proj_rng = Rng::seed_from(65);
        let proj: Vec<f64> = (0..2 * 2 * 16).map(|_| proj_rng.uniform(0.5, 1.5)).collect();
        let mut rng2 = Rng::seed_from(66);
        let report = check_scalar_fn(&[x, w1, b1], 1e-5, 60, &mut rng2, |ins| {
            let y = unit.forward(&ins[0])?;
            let p = Tensor::constant(&y.shape(), proj.clone())?;
            Ok(y.mul(&p)?.sum_all())
        })
        .unwrap();
        assert!(report.max_rel_err < 1e-4, "err {}", report.max_rel_err);
    }
}
