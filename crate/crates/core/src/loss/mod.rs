//! Training objectives: perceptual distance on classifier features,
//! GAN naturalness terms, and the DCT band-range penalty that keeps a
//! restoration consistent with the coefficients the encoder stored.

use crate::error::{TensorError, TensorResult};
use crate::jpeg::{dct8x8, DctBlockGrid, QuantTable};
use crate::net::{DiscriminatorNet, FeatureNet};
use crate::tensor::{Real, Tensor};

/// Clamp bound for probabilities inside log terms.
const LOG_EPS: f64 = 1e-7;
/// Maps model range [−1, 1] onto the DCT pixel domain (pixel − 128):
/// 127.5·v − 0.5.
const MODEL_TO_DCT_SCALE: f64 = 127.5;
const MODEL_TO_DCT_SHIFT: f64 = -0.5;

#[derive(Debug, Clone, Copy)]
pub struct LossWeights {
    /// Naturalness (GAN) weight λ₁.
    pub lambda1: f64,
    /// DCT band-range weight λ₂, applied to block-aligned samples.
    pub lambda2: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            lambda1: 0.1,
            lambda2: 0.1,
        }
    }
}

/// Per-batch scalar summary for logging; `natural` is absent while the
/// discriminator is not yet in play.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub percept: f64,
    pub natural: Option<f64>,
    pub jpeg: f64,
    pub total: f64,
}

/// Mean squared distance between classifier features of the
/// restoration and of the ground truth.
pub fn perceptual_loss<T: Real>(
    fe: &FeatureNet<T>,
    xhat: &Tensor<T>,
    x: &Tensor<T>,
) -> TensorResult<Tensor<T>> {
    let target = fe.features(x)?.detach();
    Ok(fe.features(xhat)?.sub(&target)?.square().mean_all())
}

/// −E[ln D(x̂)]: low when the discriminator takes restorations for
/// natural images. Trains F; D's own parameters should be frozen by
/// the caller.
pub fn naturalness_loss<T: Real>(
    d: &DiscriminatorNet<T>,
    xhat: &Tensor<T>,
) -> TensorResult<Tensor<T>> {
    let p = d.forward(xhat)?;
    Ok(p.clamp(LOG_EPS, 1.0 - LOG_EPS).ln().neg().mean_all())
}

/// −E[ln D(x)] − E[ln(1 − D(x̂))]: the discriminator's own objective.
/// The restoration is detached here, so this trains only D.
pub fn discriminator_loss<T: Real>(
    d: &DiscriminatorNet<T>,
    x: &Tensor<T>,
    xhat: &Tensor<T>,
) -> TensorResult<Tensor<T>> {
    let real = d
        .forward(x)?
        .clamp(LOG_EPS, 1.0 - LOG_EPS)
        .ln()
        .neg()
        .mean_all();
    let fake = d
        .forward(&xhat.detach())?
        .neg()
        .add_scalar(1.0)
        .clamp(LOG_EPS, 1.0 - LOG_EPS)
        .ln()
        .neg()
        .mean_all();
    real.add(&fake)
}

/// Penalizes DCT coefficients of the restoration that leave the
/// quantization band around the stored coefficients: mean over all
/// positions of ((Δ)² − (Q/2)²)⁺. Samples without a grid (not block
/// aligned) contribute zero.
pub fn jpeg_loss<T: Real>(
    xhat: &Tensor<T>,
    grids: &[Option<&DctBlockGrid>],
    table: &QuantTable,
) -> TensorResult<Tensor<T>> {
    let s = xhat.shape();
    if s.len() != 4 || s[2] % 8 != 0 || s[3] % 8 != 0 {
        return Err(TensorError::BadShape {
            op: "jpeg_loss",
            expected: "rank-4 NCHW with spatial dims divisible by 8".into(),
            got: s,
        });
    }
    let (n, c, h, w) = (s[0], s[1], s[2], s[3]);
    if grids.len() != n {
        return Err(TensorError::BadArg {
            op: "jpeg_loss",
            msg: format!("{} grids for batch of {n}", grids.len()),
        });
    }
    let plane = h * w;
    let mut target = vec![T::zero(); n * c * plane];
    let mut mask = vec![T::zero(); n * c * plane];
    for (i, grid) in grids.iter().enumerate() {
        let Some(g) = grid else { continue };
        if g.channels != c || g.pixel_extent() != (h, w) {
            return Err(TensorError::BadArg {
                op: "jpeg_loss",
                msg: format!(
                    "grid {i} covers {:?}×{} channels, batch is {h}×{w}×{c}",
                    g.pixel_extent(),
                    g.channels
                ),
            });
        }
        let planes = g.to_planes();
        for (dst, src) in target[i * c * plane..(i + 1) * c * plane]
            .iter_mut()
            .zip(&planes)
        {
            *dst = T::from_f64(*src as f64);
        }
        for m in &mut mask[i * c * plane..(i + 1) * c * plane] {
            *m = T::one();
        }
    }
    // Half-width of the allowed band per coefficient, tiled to planes.
    let mut half = vec![T::zero(); n * c * plane];
    for i in 0..n * c * plane {
        let (r, col) = ((i % plane) / w, i % w);
        let q = table.q[(r % 8) * 8 + col % 8] as f64;
        half[i] = T::from_f64((q / 2.0) * (q / 2.0));
    }

    let target = Tensor::constant(&s, target)?;
    let mask = Tensor::constant(&s, mask)?;
    let half = Tensor::constant(&s, half)?;

    let u = xhat.mul_scalar(MODEL_TO_DCT_SCALE).add_scalar(MODEL_TO_DCT_SHIFT);
    let dev = dct8x8(&u)?.sub(&target)?;
    let excess = dev.square().sub(&half)?.relu();
    Ok(excess
        .mul(&mask)?
        .sum_all()
        .mul_scalar(1.0 / (n * c * plane) as f64))
}

/// Full objective for the restoration net. `d` is absent during the
/// warm-up epoch (no naturalness term); samples with a grid get the
/// band-range penalty, the rest skip it.
pub fn combined_loss<T: Real>(
    fe: &FeatureNet<T>,
    d: Option<&DiscriminatorNet<T>>,
    xhat: &Tensor<T>,
    x: &Tensor<T>,
    grids: &[Option<&DctBlockGrid>],
    table: &QuantTable,
    weights: &LossWeights,
) -> TensorResult<(Tensor<T>, LossReport)> {
    let percept = perceptual_loss(fe, xhat, x)?;
    let mut total = percept.clone();
    let mut report = LossReport {
        percept: percept.item()?.to_f64(),
        natural: None,
        jpeg: 0.0,
        total: 0.0,
    };
    if let Some(d) = d {
        let natural = naturalness_loss(d, xhat)?;
        report.natural = Some(natural.item()?.to_f64());
        total = total.add(&natural.mul_scalar(weights.lambda1))?;
    }
    if grids.iter().any(|g| g.is_some()) {
        let jpeg = jpeg_loss(xhat, grids, table)?;
        report.jpeg = jpeg.item()?.to_f64();
        total = total.add(&jpeg.mul_scalar(weights.lambda2))?;
    }
    report.total = total.item()?.to_f64();
    Ok((total, report))
}
