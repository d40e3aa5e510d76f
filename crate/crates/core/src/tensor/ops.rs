//! Differentiable operations. Each op records a closure mapping the
//! output gradient to per-parent contributions; shapes are validated on
//! construction so backward never sees a mismatch.

use crate::error::{TensorError, TensorResult};

use super::{BackArgs, Real, Tensor};

fn same_shape<T: Real>(
    op: &'static str,
    a: &Tensor<T>,
    b: &Tensor<T>,
) -> TensorResult<Vec<usize>> {
    let (sa, sb) = (a.shape(), b.shape());
    if sa != sb {
        return Err(TensorError::ShapeMismatch {
            op,
            lhs: sa,
            rhs: sb,
        });
    }
    Ok(sa)
}

impl<T: Real> Tensor<T> {
    fn unary_op(
        &self,
        op: &'static str,
        f: impl Fn(T) -> T,
        // local derivative as a function of (input, output)
        df: impl Fn(T, T) -> T + 'static,
    ) -> Tensor<T> {
        let shape = self.shape();
        let data: Vec<T> = self.data().iter().map(|&v| f(v)).collect();
        let back = move |args: &BackArgs<'_, T>| {
            let x = args.parents[0].data();
            let dx = args
                .grad
                .iter()
                .zip(x.iter().zip(args.out))
                .map(|(&g, (&xi, &yi))| g * df(xi, yi))
                .collect();
            Ok(vec![Some(dx)])
        };
        Tensor::from_op(shape, data, vec![self.clone()], op, Some(Box::new(back)))
    }

    pub fn neg(&self) -> Tensor<T> {
        self.unary_op("neg", |v| -v, |_, _| -T::one())
    }

    pub fn add_scalar(&self, c: f64) -> Tensor<T> {
        let c = T::from_f64(c);
        self.unary_op("add_scalar", move |v| v + c, |_, _| T::one())
    }

    pub fn mul_scalar(&self, c: f64) -> Tensor<T> {
        let c = T::from_f64(c);
        self.unary_op("mul_scalar", move |v| v * c, move |_, _| c)
    }

    pub fn square(&self) -> Tensor<T> {
        let two = T::from_f64(2.0);
        self.unary_op("square", |v| v * v, move |x, _| two * x)
    }

    pub fn exp(&self) -> Tensor<T> {
        self.unary_op("exp", |v| v.exp(), |_, y| y)
    }

    /// Natural log; the caller keeps inputs positive (see `clamp`).
    pub fn ln(&self) -> Tensor<T> {
        self.unary_op("ln", |v| v.ln(), |x, _| T::one() / x)
    }

    pub fn sigmoid(&self) -> Tensor<T> {
        self.unary_op(
            "sigmoid",
            |v| {
                if v >= T::zero() {
                    T::one() / (T::one() + (-v).exp())
                } else {
                    let e = v.exp();
                    e / (T::one() + e)
                }
            },
            |_, y| y * (T::one() - y),
        )
    }

    /// x for x > 0, slope·x otherwise; slope 0 is plain ReLU.
    pub fn leaky_relu(&self, slope: f64) -> Tensor<T> {
        let s = T::from_f64(slope);
        self.unary_op(
            "leaky_relu",
            move |v| if v > T::zero() { v } else { s * v },
            move |x, _| if x > T::zero() { T::one() } else { s },
        )
    }

    pub fn relu(&self) -> Tensor<T> {
        self.leaky_relu(0.0)
    }

    /// Clamps to [lo, hi]; gradient passes only where the input was in range.
    pub fn clamp(&self, lo: f64, hi: f64) -> Tensor<T> {
        let (lo, hi) = (T::from_f64(lo), T::from_f64(hi));
        self.unary_op(
            "clamp",
            move |v| v.max(lo).min(hi),
            move |x, _| {
                if x >= lo && x <= hi {
                    T::one()
                } else {
                    T::zero()
                }
            },
        )
    }

    /// Round half away from zero. Not differentiable: calling backward
    /// through this op is an error; detach first.
    pub fn round_nearest(&self) -> Tensor<T> {
        let shape = self.shape();
        let data: Vec<T> = self.data().iter().map(|&v| v.round()).collect();
        Tensor::from_op(shape, data, vec![self.clone()], "round", None)
    }

    pub fn add(&self, other: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let shape = same_shape("add", self, other)?;
        let data: Vec<T> = self
            .data()
            .iter()
            .zip(other.data().iter())
            .map(|(&a, &b)| a + b)
            .collect();
        let back = |args: &BackArgs<'_, T>| {
            Ok(vec![Some(args.grad.to_vec()), Some(args.grad.to_vec())])
        };
        Ok(Tensor::from_op(
            shape,
            data,
            vec![self.clone(), other.clone()],
            "add",
            Some(Box::new(back)),
        ))
    }

    pub fn sub(&self, other: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let shape = same_shape("sub", self, other)?;
        let data: Vec<T> = self
            .data()
            .iter()
            .zip(other.data().iter())
            .map(|(&a, &b)| a - b)
            .collect();
        let back = |args: &BackArgs<'_, T>| {
            let neg: Vec<T> = args.grad.iter().map(|&g| -g).collect();
            Ok(vec![Some(args.grad.to_vec()), Some(neg)])
        };
        Ok(Tensor::from_op(
            shape,
            data,
            vec![self.clone(), other.clone()],
            "sub",
            Some(Box::new(back)),
        ))
    }

    pub fn mul(&self, other: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let shape = same_shape("mul", self, other)?;
        let data: Vec<T> = self
            .data()
            .iter()
            .zip(other.data().iter())
            .map(|(&a, &b)| a * b)
            .collect();
        let back = |args: &BackArgs<'_, T>| {
            let a = args.parents[0].data();
            let b = args.parents[1].data();
            let da = args
                .grad
                .iter()
                .zip(b.iter())
                .map(|(&g, &bv)| g * bv)
                .collect();
            let db = args
                .grad
                .iter()
                .zip(a.iter())
                .map(|(&g, &av)| g * av)
                .collect();
            Ok(vec![Some(da), Some(db)])
        };
        Ok(Tensor::from_op(
            shape,
            data,
            vec![self.clone(), other.clone()],
            "mul",
            Some(Box::new(back)),
        ))
    }

    pub fn sum_all(&self) -> Tensor<T> {
        let total = self.data().iter().fold(T::zero(), |acc, &v| acc + v);
        let n = self.numel();
        let back = move |args: &BackArgs<'_, T>| {
            let g = args.grad[0];
            Ok(vec![Some(vec![g; n])])
        };
        Tensor::from_op(vec![1], vec![total], vec![self.clone()], "sum_all", Some(Box::new(back)))
    }

    pub fn mean_all(&self) -> Tensor<T> {
        let n = self.numel();
        let scale = T::one() / T::from_f64(n as f64);
        let total = self.data().iter().fold(T::zero(), |acc, &v| acc + v);
        let back = move |args: &BackArgs<'_, T>| {
            let g = args.grad[0] * scale;
            Ok(vec![Some(vec![g; n])])
        };
        Tensor::from_op(
            vec![1],
            vec![total * scale],
            vec![self.clone()],
            "mean_all",
            Some(Box::new(back)),
        )
    }

    /// [m,k] · [k,n] → [m,n].
    pub fn matmul(&self, other: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let (sa, sb) = (self.shape(), other.shape());
        if sa.len() != 2 || sb.len() != 2 || sa[1] != sb[0] {
            return Err(TensorError::ShapeMismatch {
                op: "matmul",
                lhs: sa,
                rhs: sb,
            });
        }
        let (m, k, n) = (sa[0], sa[1], sb[1]);
        let mut data = vec![T::zero(); m * n];
        super::gemm_into(m, k, n, &self.data(), false, &other.data(), false, T::zero(), &mut data);
        let back = move |args: &BackArgs<'_, T>| {
            let a = args.parents[0].data();
            let b = args.parents[1].data();
            let da = if args.parents[0].requires_grad() {
                // dA = dC · Bᵀ
                let mut buf = vec![T::zero(); m * k];
                super::gemm_into(m, n, k, args.grad, false, &b, true, T::zero(), &mut buf);
                Some(buf)
            } else {
                None
            };
            let db = if args.parents[1].requires_grad() {
                // dB = Aᵀ · dC
                let mut buf = vec![T::zero(); k * n];
                super::gemm_into(k, m, n, &a, true, args.grad, false, T::zero(), &mut buf);
                Some(buf)
            } else {
                None
            };
            Ok(vec![da, db])
        };
        Ok(Tensor::from_op(
            vec![m, n],
            data,
            vec![self.clone(), other.clone()],
            "matmul",
            Some(Box::new(back)),
        ))
    }

    /// Concatenates two NCHW tensors along channels.
    pub fn concat_ch(&self, other: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let (sa, sb) = (self.shape(), other.shape());
        let compatible = sa.len() == 4
            && sb.len() == 4
            && sa[0] == sb[0]
            && sa[2] == sb[2]
            && sa[3] == sb[3];
        if !compatible {
            return Err(TensorError::ShapeMismatch {
                op: "concat_ch",
                lhs: sa,
                rhs: sb,
            });
        }
        let (n, c1, c2, hw) = (sa[0], sa[1], sb[1], sa[2] * sa[3]);
        let mut data = vec![T::zero(); n * (c1 + c2) * hw];
        {
            let a = self.data();
            let b = other.data();
            for i in 0..n {
                let dst = &mut data[i * (c1 + c2) * hw..][..(c1 + c2) * hw];
                dst[..c1 * hw].copy_from_slice(&a[i * c1 * hw..][..c1 * hw]);
                dst[c1 * hw..].copy_from_slice(&b[i * c2 * hw..][..c2 * hw]);
            }
        }
        let back = move |args: &BackArgs<'_, T>| {
            let mut da = vec![T::zero(); n * c1 * hw];
            let mut db = vec![T::zero(); n * c2 * hw];
            for i in 0..n {
                let src = &args.grad[i * (c1 + c2) * hw..][..(c1 + c2) * hw];
                da[i * c1 * hw..][..c1 * hw].copy_from_slice(&src[..c1 * hw]);
                db[i * c2 * hw..][..c2 * hw].copy_from_slice(&src[c1 * hw..]);
            }
            Ok(vec![Some(da), Some(db)])
        };
        Ok(Tensor::from_op(
            vec![n, c1 + c2, sa[2], sa[3]],
            data,
            vec![self.clone(), other.clone()],
            "concat_ch",
            Some(Box::new(back)),
        ))
    }

    /// [n,c,h,w] → [n,c] spatial mean.
    pub fn global_avg_pool(&self) -> TensorResult<Tensor<T>> {
        let s = self.shape();
        if s.len() != 4 {
            return Err(TensorError::BadShape {
                op: "global_avg_pool",
                expected: "rank-4 NCHW".into(),
                got: s,
            });
        }
        let (n, c, hw) = (s[0], s[1], s[2] * s[3]);
        let scale = T::one() / T::from_f64(hw as f64);
        let mut data = vec![T::zero(); n * c];
        {
            let x = self.data();
            for i in 0..n * c {
                let mut acc = T::zero();
                for &v in &x[i * hw..(i + 1) * hw] {
                    acc += v;
                }
                data[i] = acc * scale;
            }
        }
        let back = move |args: &BackArgs<'_, T>| {
            let mut dx = vec![T::zero(); n * c * hw];
            for i in 0..n * c {
                let g = args.grad[i] * scale;
                for v in &mut dx[i * hw..(i + 1) * hw] {
                    *v = g;
                }
            }
            Ok(vec![Some(dx)])
        };
        Ok(Tensor::from_op(
            vec![n, c],
            data,
            vec![self.clone()],
            "global_avg_pool",
            Some(Box::new(back)),
        ))
    }

    /// [n,c,h,w] + bias[c], broadcast over batch and space.
    pub fn add_bias_nchw(&self, bias: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let s = self.shape();
        let bs = bias.shape();
        if s.len() != 4 || bs != vec![s[1]] {
            return Err(TensorError::ShapeMismatch {
                op: "add_bias_nchw",
                lhs: s,
                rhs: bs,
            });
        }
        let (n, c, hw) = (s[0], s[1], s[2] * s[3]);
        let mut data = self.to_vec();
        {
            let b = bias.data();
            for i in 0..n {
                for ci in 0..c {
                    let bv = b[ci];
                    for v in &mut data[(i * c + ci) * hw..][..hw] {
                        *v += bv;
                    }
                }
            }
        }
        let back = move |args: &BackArgs<'_, T>| {
            let db = if args.parents[1].requires_grad() {
                let mut db = vec![T::zero(); c];
                for i in 0..n {
                    for ci in 0..c {
                        let mut acc = T::zero();
                        for &g in &args.grad[(i * c + ci) * hw..][..hw] {
                            acc += g;
                        }
                        db[ci] += acc;
                    }
                }
                Some(db)
            } else {
                None
            };
            Ok(vec![Some(args.grad.to_vec()), db])
        };
        Ok(Tensor::from_op(
            s,
            data,
            vec![self.clone(), bias.clone()],
            "add_bias_nchw",
            Some(Box::new(back)),
        ))
    }

    /// [n,m] + bias[m], broadcast over rows.
    pub fn add_row_bias(&self, bias: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let s = self.shape();
        let bs = bias.shape();
        if s.len() != 2 || bs != vec![s[1]] {
            return Err(TensorError::ShapeMismatch {
                op: "add_row_bias",
                lhs: s,
                rhs: bs,
            });
        }
        let (n, m) = (s[0], s[1]);
        let mut data = self.to_vec();
        {
            let b = bias.data();
            for i in 0..n {
                for j in 0..m {
                    data[i * m + j] += b[j];
                }
            }
        }
        let back = move |args: &BackArgs<'_, T>| {
            let db = if args.parents[1].requires_grad() {
                let mut db = vec![T::zero(); m];
                for i in 0..n {
                    for j in 0..m {
                        db[j] += args.grad[i * m + j];
                    }
                }
                Some(db)
            } else {
                None
            };
            Ok(vec![Some(args.grad.to_vec()), db])
        };
        Ok(Tensor::from_op(
            s,
            data,
            vec![self.clone(), bias.clone()],
            "add_row_bias",
            Some(Box::new(back)),
        ))
    }

    /// Mean softmax cross-entropy of logits [n,k] against class labels.
    pub fn softmax_cross_entropy(&self, labels: &[usize]) -> TensorResult<Tensor<T>> {
        let s = self.shape();
        if s.len() != 2 || s[0] != labels.len() {
            return Err(TensorError::BadShape {
                op: "softmax_cross_entropy",
                expected: format!("[n,k] logits with n = {} labels", labels.len()),
                got: s,
            });
        }
        let (n, k) = (s[0], s[1]);
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(TensorError::BadArg {
                op: "softmax_cross_entropy",
                msg: format!("label {bad} out of range for {k} classes"),
            });
        }
        let labels = labels.to_vec();
        let mut total = T::zero();
        {
            let x = self.data();
            for (i, &label) in labels.iter().enumerate() {
                let row = &x[i * k..(i + 1) * k];
                let m = row.iter().fold(row[0], |a, &b| a.max(b));
                let lse = row
                    .iter()
                    .fold(T::zero(), |acc, &v| acc + (v - m).exp())
                    .ln()
                    + m;
                total += lse - row[label];
            }
        }
        let inv_n = T::one() / T::from_f64(n as f64);
        let back = move |args: &BackArgs<'_, T>| {
            let x = args.parents[0].data();
            let g = args.grad[0] * inv_n;
            let mut dx = vec![T::zero(); n * k];
            for (i, &label) in labels.iter().enumerate() {
                let row = &x[i * k..(i + 1) * k];
                let m = row.iter().fold(row[0], |a, &b| a.max(b));
                let denom = row.iter().fold(T::zero(), |acc, &v| acc + (v - m).exp());
                for j in 0..k {
                    let p = (row[j] - m).exp() / denom;
                    let delta = if j == label { T::one() } else { T::zero() };
                    dx[i * k + j] = g * (p - delta);
                }
            }
            Ok(vec![Some(dx)])
        };
        Ok(Tensor::from_op(
            vec![1],
            vec![total * inv_n],
            vec![self.clone()],
            "softmax_cross_entropy",
            Some(Box::new(back)),
        ))
    }
}
