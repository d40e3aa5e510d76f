use crate::error::{TensorError, TensorResult};
use crate::rng::Rng;

use super::{Real, Tensor};

/// He uniform initialization: i.i.d. U[−b, b] with b = √(6/fan_in).
pub fn he_uniform<T: Real>(
    rng: &mut Rng,
    shape: &[usize],
    fan_in: usize,
) -> TensorResult<Tensor<T>> {
    if fan_in == 0 {
        return Err(TensorError::BadArg {
            op: "he_uniform",
            msg: "fan_in must be positive".into(),
        });
    }
    let bound = (6.0 / fan_in as f64).sqrt();
    let numel: usize = shape.iter().product();
    let data: Vec<T> = (0..numel)
        .map(|_| T::from_f64(rng.uniform(-bound, bound)))
        .collect();
    Tensor::param(shape, data)
}
