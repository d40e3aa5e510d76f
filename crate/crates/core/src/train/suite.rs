//! Finite-difference audit of every layer and every loss, all in
//! 64-bit. Used by the `check --gradients` command and the acceptance
//! gate.

use crate::error::{Error, Result};
use crate::jpeg::{dct_matrix, idct_block, quant_table, DctBlockGrid};
use crate::loss::{
    combined_loss, discriminator_loss, jpeg_loss, naturalness_loss, perceptual_loss, LossWeights,
};
use crate::net::{DiscriminatorNet, FeatureNet, ProposalNet};
use crate::nn::{BatchNorm2d, BnMode, Conv2d, Deconv2d, Padding, ResidualUnit};
use crate::rng::Rng;
use crate::tensor::{check_scalar_fn, projection_loss, Tensor};

pub const GRAD_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub name: &'static str,
    pub max_rel_err: f64,
    pub coords: usize,
}

impl SuiteEntry {
    pub fn passed(&self) -> bool {
        self.max_rel_err < GRAD_TOLERANCE
    }
}

fn rand_tensor(rng: &mut Rng, shape: &[usize], lo: f64, hi: f64) -> Tensor<f64> {
    let n: usize = shape.iter().product();
    let data: Vec<f64> = (0..n).map(|_| rng.uniform(lo, hi)).collect();
    Tensor::param(shape, data).unwrap()
}

/// Quantized grid plus matching pixel field (see the loss tests).
fn quantized_grid(rng: &mut Rng, quality: u8, h: usize, w: usize) -> DctBlockGrid {
    let table = quant_table(quality).unwrap();
    let m = dct_matrix();
    let (by, bx) = (h / 8, w / 8);
    let mut coeffs = Vec::new();
    for _ in 0..by * bx {
        let mut blk = [0.0f64; 64];
        for (i, cell) in blk.iter_mut().enumerate() {
            *cell = rng.uniform(-3.0, 3.0).round() * table.q[i] as f64;
        }
        let _ = idct_block(&m, &blk);
        coeffs.extend(blk.iter().map(|&v| v as f32));
    }
    DctBlockGrid::new(by, bx, 1, coeffs).unwrap()
}

/// Runs every check and returns one entry per item; does not stop on
/// failures so a report always covers the full list.
pub fn gradient_suite() -> Result<Vec<SuiteEntry>> {
    let mut entries = Vec::new();
    let mut push = |name: &'static str,
                    report: crate::tensor::GradCheckReport| {
        entries.push(SuiteEntry {
            name,
            max_rel_err: report.max_rel_err,
            coords: report.coords_checked,
        });
    };
    let eps = 1e-5;

    {
        let mut rng = Rng::seed_from(101);
        let conv = Conv2d::<f64>::new(&mut rng, 2, 3, 3, 1, Padding::Same)?;
        let x = rand_tensor(&mut rng, &[2, 2, 6, 6], -1.0, 1.0);
        let inputs = [x, conv.weight.clone(), conv.bias.clone()];
        let proj_rng = Rng::seed_from(102);
        let mut check_rng = Rng::seed_from(103);
        let report = check_scalar_fn(&inputs, eps, 40, &mut check_rng, |ins| {
            projection_loss(&conv.forward(&ins[0])?, &mut proj_rng.clone())
        })?;
        push("conv2d", report);
    }

    {
        let mut rng = Rng::seed_from(104);
        let deconv = Deconv2d::<f64>::new(&mut rng, 2, 1, 4, 2)?;
        let x = rand_tensor(&mut rng, &[1, 2, 5, 5], -1.0, 1.0);
        let inputs = [x, deconv.weight.clone(), deconv.bias.clone()];
        let proj_rng = Rng::seed_from(105);
        let mut check_rng = Rng::seed_from(106);
        let report = check_scalar_fn(&inputs, eps, 40, &mut check_rng, |ins| {
            projection_loss(&deconv.forward(&ins[0])?, &mut proj_rng.clone())
        })?;
        push("deconv_shift_average", report);
    }

    {
        let mut rng = Rng::seed_from(107);
        let bn = BatchNorm2d::<f64>::new(3)?;
        bn.gamma.set_data(&[1.2, 0.7, -0.4]).unwrap();
        bn.beta.set_data(&[0.1, -0.2, 0.3]).unwrap();
        let x = rand_tensor(&mut rng, &[2, 3, 4, 4], -2.0, 2.0);
        let inputs = [x, bn.gamma.clone(), bn.beta.clone()];
        let proj_rng = Rng::seed_from(108);
        let mut check_rng = Rng::seed_from(109);
        let report = check_scalar_fn(&inputs, eps, 40, &mut check_rng, |ins| {
            projection_loss(&bn.forward(&ins[0])?, &mut proj_rng.clone())
        })?;
        push("batchnorm_train", report);

        bn.set_mode(BnMode::Eval);
        bn.running_mean.set_data(&[0.2, -0.1, 0.4]).unwrap();
        bn.running_var.set_data(&[1.5, 0.8, 2.0]).unwrap();
        let x = rand_tensor(&mut rng, &[2, 3, 4, 4], -2.0, 2.0);
        let inputs = [x, bn.gamma.clone(), bn.beta.clone()];
        let proj_rng = Rng::seed_from(110);
        let mut check_rng = Rng::seed_from(111);
        let report = check_scalar_fn(&inputs, eps, 40, &mut check_rng, |ins| {
            projection_loss(&bn.forward(&ins[0])?, &mut proj_rng.clone())
        })?;
        push("batchnorm_eval", report);
    }

    {
        // Kept safely off the kink: |x| ≥ 0.1 ≫ eps.
        let mut rng = Rng::seed_from(112);
        let data: Vec<f64> = (0..48)
            .map(|_| {
                let v = rng.uniform(0.1, 1.5);
                if rng.next_f64() < 0.5 {
                    -v
                } else {
                    v
                }
            })
            .collect();
        let x = Tensor::param(&[48], data).unwrap();
        let proj_rng = Rng::seed_from(113);
        let mut check_rng = Rng::seed_from(114);
        let report = check_scalar_fn(&[x], eps, 0, &mut check_rng, |ins| {
            projection_loss(&ins[0].leaky_relu(0.2), &mut proj_rng.clone())
        })?;
        push("leaky_relu", report);
    }

    {
        let mut rng = Rng::seed_from(115);
        let unit = ResidualUnit::<f64>::new(&mut rng, 2)?;
        unit.set_mode(BnMode::Eval);
        let x = rand_tensor(&mut rng, &[1, 2, 6, 6], -1.0, 1.0);
        let proj_rng = Rng::seed_from(116);
        let mut check_rng = Rng::seed_from(117);
        let report = check_scalar_fn(&[x], eps, 48, &mut check_rng, |ins| {
            projection_loss(&unit.forward(&ins[0])?, &mut proj_rng.clone())
        })?;
        push("residual_unit", report);
    }

    {
        let mut rng = Rng::seed_from(118);
        let fe = FeatureNet::<f64>::new(&mut rng, 1, 2)?;
        fe.freeze();
        let x = rand_tensor(&mut rng, &[1, 1, 16, 16], -1.0, 1.0);
        let xhat = rand_tensor(&mut rng, &[1, 1, 16, 16], -1.0, 1.0);
        let mut check_rng = Rng::seed_from(119);
        let report = check_scalar_fn(&[xhat], eps, 48, &mut check_rng, |ins| {
            perceptual_loss(&fe, &ins[0], &x)
        })?;
        push("perceptual_loss", report);
    }

    let mut rng = Rng::seed_from(120);
    let d = DiscriminatorNet::<f64>::new(&mut rng, 1)?;
    d.set_mode(BnMode::Eval);

    {
        let xhat = rand_tensor(&mut rng, &[1, 1, 16, 16], -1.0, 1.0);
        let mut check_rng = Rng::seed_from(121);
        let report = check_scalar_fn(&[xhat], eps, 48, &mut check_rng, |ins| {
            naturalness_loss(&d, &ins[0])
        })?;
        push("naturalness_loss", report);
    }

    {
        let x = rand_tensor(&mut rng, &[1, 1, 16, 16], -1.0, 1.0);
        let xhat = rand_tensor(&mut rng, &[1, 1, 16, 16], -1.0, 1.0);
        let head_w = d.head().weight.clone();
        let inputs = [x.clone(), head_w];
        let mut check_rng = Rng::seed_from(122);
        let report = check_scalar_fn(&inputs, eps, 40, &mut check_rng, |ins| {
            discriminator_loss(&d, &ins[0], &xhat)
        })?;
        push("discriminator_loss", report);
    }

    {
        let mut rng = Rng::seed_from(123);
        let grid = quantized_grid(&mut rng, 20, 16, 16);
        let table = quant_table(20)?;
        let xhat = rand_tensor(&mut rng, &[1, 1, 16, 16], -0.9, 0.9);
        let mut check_rng = Rng::seed_from(124);
        let report = check_scalar_fn(&[xhat], eps, 64, &mut check_rng, |ins| {
            jpeg_loss(&ins[0], &[Some(&grid)], &table)
        })?;
        push("jpeg_loss", report);
    }

    {
        let mut rng = Rng::seed_from(125);
        let fe = FeatureNet::<f64>::new(&mut rng, 1, 2)?;
        fe.freeze();
        let grid = quantized_grid(&mut rng, 20, 16, 16);
        let table = quant_table(20)?;
        let weights = LossWeights::default();
        let x = rand_tensor(&mut rng, &[1, 1, 16, 16], -1.0, 1.0);
        let xhat = rand_tensor(&mut rng, &[1, 1, 16, 16], -0.9, 0.9);
        let mut check_rng = Rng::seed_from(126);
        let report = check_scalar_fn(&[xhat], eps, 48, &mut check_rng, |ins| {
            combined_loss(&fe, Some(&d), &ins[0], &x, &[Some(&grid)], &table, &weights)
                .map(|(t, _)| t)
        })?;
        push("combined_loss", report);
    }

    {
        // End to end through the restorer: d(total)/d(noise input).
        let mut rng = Rng::seed_from(127);
        let f = ProposalNet::<f64>::with_units(&mut rng, 1, 1, 1)?;
        f.set_mode(BnMode::Eval);
        let fe = FeatureNet::<f64>::new(&mut rng, 1, 2)?;
        fe.freeze();
        let x = rand_tensor(&mut rng, &[1, 1, 16, 16], -1.0, 1.0);
        let y = rand_tensor(&mut rng, &[1, 1, 16, 16], -1.0, 1.0);
        let z = rand_tensor(&mut rng, &[1, 1, 16, 16], -1.0, 1.0);
        let mut check_rng = Rng::seed_from(128);
        let report = check_scalar_fn(&[z], eps, 32, &mut check_rng, |ins| {
            perceptual_loss(&fe, &f.forward(&y, &ins[0])?, &x)
        })?;
        push("restorer_end_to_end", report);
    }

    Ok(entries)
}

/// `Ok` when every entry passes; otherwise a numeric error naming the
/// first failure.
pub fn assert_gradients() -> Result<Vec<SuiteEntry>> {
    let entries = gradient_suite()?;
    if let Some(bad) = entries.iter().find(|e| !e.passed()) {
        return Err(Error::Numeric(format!(
            "gradient check `{}` failed: max relative error {:.3e} ≥ {GRAD_TOLERANCE:.0e}",
            bad.name, bad.max_rel_err
        )));
    }
    Ok(entries)
}
