//! Per-channel batch normalization for NCHW tensors.

use std::cell::Cell;

use crate::error::{TensorError, TensorResult};
use crate::tensor::{BackArgs, Real, Tensor};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BnMode {
    Train,
    Eval,
}

/// Batch norm with learned affine parameters and running statistics.
///
/// Train mode normalizes with batch statistics (biased variance) and
/// updates the running estimates; eval mode normalizes with the stored
/// running estimates. Statistics accumulate in f64 regardless of `T`.
pub struct BatchNorm2d<T: Real = f32> {
    pub gamma: Tensor<T>,
    pub beta: Tensor<T>,
    pub running_mean: Tensor<T>,
    pub running_var: Tensor<T>,
    mode: Cell<BnMode>,
    momentum: f64,
    eps: f64,
}

impl<T: Real> BatchNorm2d<T> {
    pub fn new(channels: usize) -> TensorResult<Self> {
        Ok(BatchNorm2d {
            gamma: Tensor::param(&[channels], vec![T::one(); channels])?,
            beta: Tensor::param(&[channels], vec![T::zero(); channels])?,
            running_mean: Tensor::constant(&[channels], vec![T::zero(); channels])?,
            running_var: Tensor::constant(&[channels], vec![T::one(); channels])?,
            mode: Cell::new(BnMode::Train),
            momentum: 0.1,
            eps: 1e-5,
        })
    }

    pub fn channels(&self) -> usize {
        self.gamma.numel()
    }

    pub fn mode(&self) -> BnMode {
        self.mode.get()
    }

    pub fn set_mode(&self, mode: BnMode) {
        self.mode.set(mode);
    }

    fn check_input(&self, x: &Tensor<T>) -> TensorResult<(usize, usize, usize, usize)> {
        let s = x.shape();
        if s.len() != 4 || s[1] != self.channels() {
            return Err(TensorError::BadShape {
                op: "batch_norm",
                expected: format!("rank-4 NCHW with {} channels", self.channels()),
                got: s,
            });
        }
        Ok((s[0], s[1], s[2], s[3]))
    }

    pub fn forward(&self, x: &Tensor<T>) -> TensorResult<Tensor<T>> {
        match self.mode.get() {
            BnMode::Train => self.forward_train(x),
            BnMode::Eval => self.forward_eval(x),
        }
    }

    fn forward_train(&self, x: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let (n, c, h, w) = self.check_input(x)?;
        let m = n * h * w;
        if m < 2 {
            return Err(TensorError::BadArg {
                op: "batch_norm",
                msg: format!("batch statistics need ≥ 2 values per channel, got {m}"),
            });
        }
        let plane = h * w;
        let mut mean = vec![0.0f64; c];
        let mut var = vec![0.0f64; c];
        {
            let xd = x.data();
            for ch in 0..c {
                let mut sum = 0.0;
                let mut sumsq = 0.0;
                for img in 0..n {
                    for &v in &xd[(img * c + ch) * plane..][..plane] {
                        let v = v.to_f64();
                        sum += v;
                        sumsq += v * v;
                    }
                }
                mean[ch] = sum / m as f64;
                var[ch] = (sumsq / m as f64 - mean[ch] * mean[ch]).max(0.0);
            }
        }
        self.running_mean.update_data(|r| {
            for (ri, &b) in r.iter_mut().zip(&mean) {
                *ri = T::from_f64(ri.to_f64() * (1.0 - self.momentum) + b * self.momentum);
            }
        });
        self.running_var.update_data(|r| {
            for (ri, &b) in r.iter_mut().zip(&var) {
                *ri = T::from_f64(ri.to_f64() * (1.0 - self.momentum) + b * self.momentum);
            }
        });

        let invstd: Vec<T> = var
            .iter()
            .map(|&v| T::from_f64(1.0 / (v + self.eps).sqrt()))
            .collect();
        let mean_t: Vec<T> = mean.iter().map(|&v| T::from_f64(v)).collect();
        let mut xhat = vec![T::zero(); n * c * plane];
        let mut data = vec![T::zero(); n * c * plane];
        {
            let xd = x.data();
            let gd = self.gamma.data();
            let bd = self.beta.data();
            for img in 0..n {
                for ch in 0..c {
                    let base = (img * c + ch) * plane;
                    for i in 0..plane {
                        let xh = (xd[base + i] - mean_t[ch]) * invstd[ch];
                        xhat[base + i] = xh;
                        data[base + i] = gd[ch] * xh + bd[ch];
                    }
                }
            }
        }
        let back = move |args: &BackArgs<'_, T>| {
            let need_x = args.parents[0].requires_grad();
            let need_g = args.parents[1].requires_grad();
            let need_b = args.parents[2].requires_grad();
            let mut dgamma = vec![T::zero(); c];
            let mut dbeta = vec![T::zero(); c];
            let mut sum_dxhat = vec![T::zero(); c];
            let mut sum_dxhat_xhat = vec![T::zero(); c];
            let gammas = args.parents[1].data();
            for img in 0..n {
                for ch in 0..c {
                    let base = (img * c + ch) * plane;
                    for i in 0..plane {
                        let g = args.grad[base + i];
                        let xh = xhat[base + i];
                        dbeta[ch] += g;
                        dgamma[ch] += g * xh;
                        let dxh = g * gammas[ch];
                        sum_dxhat[ch] += dxh;
                        sum_dxhat_xhat[ch] += dxh * xh;
                    }
                }
            }
            let dx = need_x.then(|| {
                let m_t = T::from_f64(m as f64);
                let inv_m = T::one() / m_t;
                let mut dx = vec![T::zero(); n * c * plane];
                for img in 0..n {
                    for ch in 0..c {
                        let base = (img * c + ch) * plane;
                        for i in 0..plane {
                            let dxh = args.grad[base + i] * gammas[ch];
                            dx[base + i] = invstd[ch]
                                * inv_m
                                * (m_t * dxh
                                    - sum_dxhat[ch]
                                    - xhat[base + i] * sum_dxhat_xhat[ch]);
                        }
                    }
                }
                dx
            });
            Ok(vec![dx, need_g.then_some(dgamma), need_b.then_some(dbeta)])
        };
        Ok(Tensor::from_op(
            vec![n, c, h, w],
            data,
            vec![x.clone(), self.gamma.clone(), self.beta.clone()],
            "batch_norm_train",
            Some(Box::new(back)),
        ))
    }

    fn forward_eval(&self, x: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let (n, c, h, w) = self.check_input(x)?;
        let plane = h * w;
        let rinv: Vec<T> = self
            .running_var
            .data()
            .iter()
            .map(|v| T::from_f64(1.0 / (Real::to_f64(*v) + self.eps).sqrt()))
            .collect();
        let rmean = self.running_mean.to_vec();
        let mut data = vec![T::zero(); n * c * plane];
        {
            let xd = x.data();
            let gd = self.gamma.data();
            let bd = self.beta.data();
            for img in 0..n {
                for ch in 0..c {
                    let base = (img * c + ch) * plane;
                    for i in 0..plane {
                        data[base + i] = gd[ch] * (xd[base + i] - rmean[ch]) * rinv[ch] + bd[ch];
                    }
                }
            }
        }
        let back = move |args: &BackArgs<'_, T>| {
            let need_x = args.parents[0].requires_grad();
            let need_g = args.parents[1].requires_grad();
            let need_b = args.parents[2].requires_grad();
            let xd = args.parents[0].data();
            let gammas = args.parents[1].data();
            let mut dx = need_x.then(|| vec![T::zero(); xd.len()]);
            let mut dgamma = need_g.then(|| vec![T::zero(); c]);
            let mut dbeta = need_b.then(|| vec![T::zero(); c]);
            for img in 0..n {
                for ch in 0..c {
                    let base = (img * c + ch) * plane;
                    for i in 0..plane {
                        let g = args.grad[base + i];
                        if let Some(dx) = dx.as_deref_mut() {
                            dx[base + i] = g * gammas[ch] * rinv[ch];
                        }
                        if let Some(dg) = dgamma.as_deref_mut() {
                            dg[ch] += g * (xd[base + i] - rmean[ch]) * rinv[ch];
                        }
                        if let Some(db) = dbeta.as_deref_mut() {
                            db[ch] += g;
                        }
                    }
                }
            }
            Ok(vec![dx, dgamma, dbeta])
        };
        Ok(Tensor::from_op(
            vec![n, c, h, w],
            data,
            vec![x.clone(), self.gamma.clone(), self.beta.clone()],
            "batch_norm_eval",
            Some(Box::new(back)),
        ))
    }

    pub fn register(&self, prefix: &str, map: &mut super::ParamMap<T>) {
        map.add(format!("{prefix}.gamma"), self.gamma.clone(), true);
        map.add(format!("{prefix}.beta"), self.beta.clone(), true);
        map.add(format!("{prefix}.running_mean"), self.running_mean.clone(), false);
        map.add(format!("{prefix}.running_var"), self.running_var.clone(), false);
    }
}
