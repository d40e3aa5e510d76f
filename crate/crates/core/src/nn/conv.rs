//! 2-D convolution (cross-correlation) lowered to im2col + GEMM, with a
//! fused bias add. The column matrix is rebuilt in backward instead of
//! being cached, trading a cheap memory-bound pass for ~10 MB per layer
//! of retained state.

use crate::error::{TensorError, TensorResult};
use crate::rng::Rng;
use crate::tensor::{gemm_into, he_uniform, BackArgs, Real, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Padding {
    /// Zero padding chosen so output spatial size = ceil(input/stride),
    /// split floor(total/2) before, the rest after.
    Same,
    Valid,
}

#[derive(Debug, Clone, Copy)]
struct Geometry {
    n: usize,
    c: usize,
    h: usize,
    w: usize,
    f: usize,
    kh: usize,
    kw: usize,
    stride: usize,
    pad_top: usize,
    pad_left: usize,
    oh: usize,
    ow: usize,
}

fn geometry<T: Real>(
    x: &Tensor<T>,
    weight: &Tensor<T>,
    bias: &Tensor<T>,
    stride: usize,
    padding: Padding,
) -> TensorResult<Geometry> {
    let xs = x.shape();
    let ws = weight.shape();
    if xs.len() != 4 || ws.len() != 4 {
        return Err(TensorError::BadShape {
            op: "conv2d",
            expected: "rank-4 input and weight".into(),
            got: if xs.len() != 4 { xs } else { ws },
        });
    }
    if xs[1] != ws[1] {
        return Err(TensorError::ShapeMismatch {
            op: "conv2d",
            lhs: xs,
            rhs: ws,
        });
    }
    if bias.shape() != vec![ws[0]] {
        return Err(TensorError::ShapeMismatch {
            op: "conv2d",
            lhs: ws,
            rhs: bias.shape(),
        });
    }
    if stride == 0 {
        return Err(TensorError::BadArg {
            op: "conv2d",
            msg: "stride must be positive".into(),
        });
    }
    let (n, c, h, w) = (xs[0], xs[1], xs[2], xs[3]);
    let (f, kh, kw) = (ws[0], ws[2], ws[3]);
    let (oh, ow, pad_top, pad_left) = match padding {
        Padding::Same => {
            let oh = h.div_ceil(stride);
            let ow = w.div_ceil(stride);
            let ph = ((oh - 1) * stride + kh).saturating_sub(h);
            let pw = ((ow - 1) * stride + kw).saturating_sub(w);
            (oh, ow, ph / 2, pw / 2)
        }
        Padding::Valid => {
            if h < kh || w < kw {
                return Err(TensorError::BadShape {
                    op: "conv2d",
                    expected: format!("spatial dims ≥ {kh}×{kw} kernel"),
                    got: xs,
                });
            }
            ((h - kh) / stride + 1, (w - kw) / stride + 1, 0, 0)
        }
    };
    Ok(Geometry {
        n,
        c,
        h,
        w,
        f,
        kh,
        kw,
        stride,
        pad_top,
        pad_left,
        oh,
        ow,
    })
}

/// Output columns whose sample `ox·stride + kj − pad_left` lands inside
/// [0, w): everything before/after is padding.
fn valid_ox_range(g: &Geometry, kj: usize) -> (usize, usize) {
    let lo = if g.pad_left > kj {
        (g.pad_left - kj).div_ceil(g.stride)
    } else {
        0
    };
    if g.w + g.pad_left <= kj {
        return (0, 0);
    }
    let hi = ((g.w - 1 + g.pad_left - kj) / g.stride + 1).min(g.ow);
    (lo.min(hi), hi)
}

/// Unrolls one image into [c·kh·kw, oh·ow] columns (zero padded).
fn im2col<T: Real>(x: &[T], g: &Geometry, col: &mut [T]) {
    let ohw = g.oh * g.ow;
    let mut r = 0;
    for ci in 0..g.c {
        let plane = &x[ci * g.h * g.w..][..g.h * g.w];
        for ki in 0..g.kh {
            for kj in 0..g.kw {
                let (lo, hi) = valid_ox_range(g, kj);
                let dst = &mut col[r * ohw..][..ohw];
                let mut idx = 0;
                for oy in 0..g.oh {
                    let iy = (oy * g.stride + ki) as isize - g.pad_top as isize;
                    if iy < 0 || iy >= g.h as isize {
                        dst[idx..idx + g.ow].fill(T::zero());
                        idx += g.ow;
                        continue;
                    }
                    let row = &plane[iy as usize * g.w..][..g.w];
                    dst[idx..idx + lo].fill(T::zero());
                    if hi > lo {
                        let base = lo * g.stride + kj - g.pad_left;
                        if g.stride == 1 {
                            dst[idx + lo..idx + hi].copy_from_slice(&row[base..base + hi - lo]);
                        } else {
                            for (o, d) in dst[idx + lo..idx + hi].iter_mut().enumerate() {
                                *d = row[base + o * g.stride];
                            }
                        }
                    }
                    dst[idx + hi..idx + g.ow].fill(T::zero());
                    idx += g.ow;
                }
                r += 1;
            }
        }
    }
}

/// Scatter-adds columns back onto one image (adjoint of `im2col`).
fn col2im_add<T: Real>(col: &[T], g: &Geometry, dx: &mut [T]) {
    let ohw = g.oh * g.ow;
    let mut r = 0;
    for ci in 0..g.c {
        let plane = &mut dx[ci * g.h * g.w..][..g.h * g.w];
        for ki in 0..g.kh {
            for kj in 0..g.kw {
                let (lo, hi) = valid_ox_range(g, kj);
                let src = &col[r * ohw..][..ohw];
                let mut idx = 0;
                for oy in 0..g.oh {
                    let iy = (oy * g.stride + ki) as isize - g.pad_top as isize;
                    if iy < 0 || iy >= g.h as isize {
                        idx += g.ow;
                        continue;
                    }
                    if hi > lo {
                        let row = &mut plane[iy as usize * g.w..][..g.w];
                        let base = lo * g.stride + kj - g.pad_left;
                        if g.stride == 1 {
                            for (s, d) in src[idx + lo..idx + hi]
                                .iter()
                                .zip(&mut row[base..base + hi - lo])
                            {
                                *d += *s;
                            }
                        } else {
                            for (o, s) in src[idx + lo..idx + hi].iter().enumerate() {
                                row[base + o * g.stride] += *s;
                            }
                        }
                    }
                    idx += g.ow;
                }
                r += 1;
            }
        }
    }
}

/// conv2d(x[n,c,h,w], weight[f,c,kh,kw]) + bias[f].
pub fn conv2d<T: Real>(
    x: &Tensor<T>,
    weight: &Tensor<T>,
    bias: &Tensor<T>,
    stride: usize,
    padding: Padding,
) -> TensorResult<Tensor<T>> {
    let g = geometry(x, weight, bias, stride, padding)?;
    let (ckk, ohw) = (g.c * g.kh * g.kw, g.oh * g.ow);
    let mut out = vec![T::zero(); g.n * g.f * ohw];
    {
        let xd = x.data();
        let wd = weight.data();
        let bd = bias.data();
        let mut col = vec![T::zero(); ckk * ohw];
        for i in 0..g.n {
            im2col(&xd[i * g.c * g.h * g.w..][..g.c * g.h * g.w], &g, &mut col);
            let dst = &mut out[i * g.f * ohw..][..g.f * ohw];
            gemm_into(g.f, ckk, ohw, &wd, false, &col, false, T::zero(), dst);
            for fi in 0..g.f {
                let bv = bd[fi];
                for v in &mut dst[fi * ohw..][..ohw] {
                    *v += bv;
                }
            }
        }
    }
    let back = move |args: &BackArgs<'_, T>| {
        let x = args.parents[0].data();
        let w = args.parents[1].data();
        let need_dx = args.parents[0].requires_grad();
        let need_dw = args.parents[1].requires_grad();
        let need_db = args.parents[2].requires_grad();
        let mut dx = need_dx.then(|| vec![T::zero(); x.len()]);
        let mut dw = need_dw.then(|| vec![T::zero(); w.len()]);
        let mut db = need_db.then(|| vec![T::zero(); g.f]);
        let mut col = vec![T::zero(); ckk * ohw];
        let mut dcol = vec![T::zero(); ckk * ohw];
        for i in 0..g.n {
            let dout = &args.grad[i * g.f * ohw..][..g.f * ohw];
            if let Some(dw) = dw.as_deref_mut() {
                im2col(&x[i * g.c * g.h * g.w..][..g.c * g.h * g.w], &g, &mut col);
                // dW += dOut · colᵀ
                gemm_into(g.f, ohw, ckk, dout, false, &col, true, T::one(), dw);
            }
            if let Some(dx) = dx.as_deref_mut() {
                // dCol = Wᵀ · dOut, then scatter back
                gemm_into(ckk, g.f, ohw, &w, true, dout, false, T::zero(), &mut dcol);
                col2im_add(
                    &dcol,
                    &g,
                    &mut dx[i * g.c * g.h * g.w..][..g.c * g.h * g.w],
                );
            }
            if let Some(db) = db.as_deref_mut() {
                for fi in 0..g.f {
                    let mut acc = T::zero();
                    for &v in &dout[fi * ohw..][..ohw] {
                        acc += v;
                    }
                    db[fi] += acc;
                }
            }
        }
        Ok(vec![dx, dw, db])
    };
    Ok(Tensor::from_op(
        vec![g.n, g.f, g.oh, g.ow],
        out,
        vec![x.clone(), weight.clone(), bias.clone()],
        "conv2d",
        Some(Box::new(back)),
    ))
}

/// Convolution layer owning weight [out_ch, in_ch, k, k] and bias.
pub struct Conv2d<T: Real = f32> {
    pub weight: Tensor<T>,
    pub bias: Tensor<T>,
    pub stride: usize,
    pub padding: Padding,
}

impl<T: Real> Conv2d<T> {
    pub fn new(
        rng: &mut Rng,
        in_ch: usize,
        out_ch: usize,
        k: usize,
        stride: usize,
        padding: Padding,
    ) -> TensorResult<Self> {
        let weight = he_uniform(rng, &[out_ch, in_ch, k, k], in_ch * k * k)?;
        let bias = Tensor::param(&[out_ch], vec![T::zero(); out_ch])?;
        Ok(Conv2d {
            weight,
            bias,
            stride,
            padding,
        })
    }

    pub fn forward(&self, x: &Tensor<T>) -> TensorResult<Tensor<T>> {
        conv2d(x, &self.weight, &self.bias, self.stride, self.padding)
    }

    pub fn register(&self, prefix: &str, map: &mut super::ParamMap<T>) {
        map.add(format!("{prefix}.weight"), self.weight.clone(), true);
        map.add(format!("{prefix}.bias"), self.bias.clone(), true);
    }
}
