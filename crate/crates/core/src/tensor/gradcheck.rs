//! Central finite-difference gradient checking in 64-bit.

use crate::error::TensorResult;
use crate::rng::Rng;

use super::Tensor;

#[derive(Debug, Clone, Copy)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub coords_checked: usize,
}

/// Compares analytic gradients of `f` against central differences.
///
/// `f` must rebuild its graph from the given leaves on every call.
/// Relative error per coordinate is
/// |analytic − numeric| / max(|analytic|, |numeric|, 1e-8);
/// `max_coords` > 0 caps the coordinates sampled per input (seeded).
pub fn check_scalar_fn<F>(
    inputs: &[Tensor<f64>],
    eps: f64,
    max_coords: usize,
    sample_rng: &mut Rng,
    f: F,
) -> TensorResult<GradCheckReport>
where
    F: Fn(&[Tensor<f64>]) -> TensorResult<Tensor<f64>>,
{
    for t in inputs {
        t.zero_grad();
    }
    let loss = f(inputs)?;
    loss.backward()?;
    let analytic: Vec<Vec<f64>> = inputs
        .iter()
        .map(|t| t.grad().unwrap_or_else(|| vec![0.0; t.numel()]))
        .collect();

    let mut report = GradCheckReport {
        max_rel_err: 0.0,
        coords_checked: 0,
    };
    for (i, t) in inputs.iter().enumerate() {
        let n = t.numel();
        let coords: Vec<usize> = if max_coords == 0 || n <= max_coords {
            (0..n).collect()
        } else {
            let mut seen = std::collections::BTreeSet::new();
            while seen.len() < max_coords {
                seen.insert(sample_rng.below(n));
            }
            seen.into_iter().collect()
        };
        for j in coords {
            let orig = t.data()[j];
            t.update_data(|d| d[j] = orig + eps);
            let plus = f(inputs)?.item()?;
            t.update_data(|d| d[j] = orig - eps);
            let minus = f(inputs)?.item()?;
            t.update_data(|d| d[j] = orig);
            let numeric = (plus - minus) / (2.0 * eps);
            let a = analytic[i][j];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
            if rel > report.max_rel_err {
                report.max_rel_err = rel;
            }
            report.coords_checked += 1;
        }
    }
    Ok(report)
}

/// Reduces a tensor to a scalar through a fixed random projection so
/// every output element influences the checked loss.
pub fn projection_loss(t: &Tensor<f64>, rng: &mut Rng) -> TensorResult<Tensor<f64>> {
    let n = t.numel();
    let proj: Vec<f64> = (0..n).map(|_| rng.uniform(0.5, 1.5)).collect();
    let proj = Tensor::constant(&t.shape(), proj)?;
    Ok(t.mul(&proj)?.sum_all())
}
