//! Stride-N transposed convolution with shift-and-average smoothing.
//!
//! Plain transposed convolution distributes each input sample through
//! the kernel onto a stride-spaced canvas, so a constant input produces
//! a periodic (grid-like) output unless opposing kernel taps happen to
//! balance. The fix implemented here averages the canvas with its
//! N²−1 single-pixel shifts; positions covered by fewer copies average
//! only those that cover them.
//!
//! The layer wraps that op in a boundary treatment that keeps the
//! invariance exact on the full output: the input is edge-replicated by
//! `pad`, scattered onto the enlarged canvas, averaged, and cropped at
//! `stride·pad + (k−stride)/2` — chosen so every retained sample sees
//! every kernel tap and every shifted copy.

use crate::error::{TensorError, TensorResult};
use crate::rng::Rng;
use crate::tensor::{he_uniform, BackArgs, Real, Tensor};

/// Replicates the border by `p` pixels on all sides.
pub(crate) fn edge_pad2d<T: Real>(x: &Tensor<T>, p: usize) -> TensorResult<Tensor<T>> {
    let s = x.shape();
    if s.len() != 4 {
        return Err(TensorError::BadShape {
            op: "edge_pad2d",
            expected: "rank-4 NCHW".into(),
            got: s,
        });
    }
    if p == 0 {
        return Ok(x.clone());
    }
    let (n, c, h, w) = (s[0], s[1], s[2], s[3]);
    let (hp, wp) = (h + 2 * p, w + 2 * p);
    let mut data = vec![T::zero(); n * c * hp * wp];
    {
        let xd = x.data();
        for pl in 0..n * c {
            let src = &xd[pl * h * w..][..h * w];
            let dst = &mut data[pl * hp * wp..][..hp * wp];
            for iy in 0..hp {
                let sy = iy.saturating_sub(p).min(h - 1);
                for ix in 0..wp {
                    let sx = ix.saturating_sub(p).min(w - 1);
                    dst[iy * wp + ix] = src[sy * w + sx];
                }
            }
        }
    }
    let back = move |args: &BackArgs<'_, T>| {
        let mut dx = vec![T::zero(); n * c * h * w];
        for pl in 0..n * c {
            let src = &args.grad[pl * hp * wp..][..hp * wp];
            let dst = &mut dx[pl * h * w..][..h * w];
            for iy in 0..hp {
                let sy = iy.saturating_sub(p).min(h - 1);
                for ix in 0..wp {
                    let sx = ix.saturating_sub(p).min(w - 1);
                    dst[sy * w + sx] += src[iy * wp + ix];
                }
            }
        }
        Ok(vec![Some(dx)])
    };
    Ok(Tensor::from_op(
        vec![n, c, hp, wp],
        data,
        vec![x.clone()],
        "edge_pad2d",
        Some(Box::new(back)),
    ))
}

/// Core transposed convolution: scatters x[n,ci,h,w] through
/// weight[ci,co,k,k] onto a [(h−1)s+k, (w−1)s+k] canvas.
pub(crate) fn deconv_scatter<T: Real>(
    x: &Tensor<T>,
    weight: &Tensor<T>,
    stride: usize,
) -> TensorResult<Tensor<T>> {
    let xs = x.shape();
    let ws = weight.shape();
    if xs.len() != 4 || ws.len() != 4 || xs[1] != ws[0] {
        return Err(TensorError::ShapeMismatch {
            op: "deconv_scatter",
            lhs: xs,
            rhs: ws,
        });
    }
    let (n, ci, h, w) = (xs[0], xs[1], xs[2], xs[3]);
    let (co, kh, kw) = (ws[1], ws[2], ws[3]);
    let (ch, cw) = ((h - 1) * stride + kh, (w - 1) * stride + kw);
    let mut data = vec![T::zero(); n * co * ch * cw];
    {
        let xd = x.data();
        let wd = weight.data();
        for img in 0..n {
            for c_in in 0..ci {
                let plane = &xd[(img * ci + c_in) * h * w..][..h * w];
                for c_out in 0..co {
                    let wblk = &wd[(c_in * co + c_out) * kh * kw..][..kh * kw];
                    let canvas = &mut data[(img * co + c_out) * ch * cw..][..ch * cw];
                    for iy in 0..h {
                        for ix in 0..w {
                            let v = plane[iy * w + ix];
                            for ky in 0..kh {
                                let row = &mut canvas[(iy * stride + ky) * cw + ix * stride..][..kw];
                                for kx in 0..kw {
                                    row[kx] += v * wblk[ky * kw + kx];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let back = move |args: &BackArgs<'_, T>| {
        let xd = args.parents[0].data();
        let wd = args.parents[1].data();
        let mut dx = args.parents[0]
            .requires_grad()
            .then(|| vec![T::zero(); xd.len()]);
        let mut dw = args.parents[1]
            .requires_grad()
            .then(|| vec![T::zero(); wd.len()]);
        for img in 0..n {
            for c_in in 0..ci {
                for c_out in 0..co {
                    let wblk = &wd[(c_in * co + c_out) * kh * kw..][..kh * kw];
                    let gcanvas = &args.grad[(img * co + c_out) * ch * cw..][..ch * cw];
                    if let Some(dx) = dx.as_deref_mut() {
                        let dplane = &mut dx[(img * ci + c_in) * h * w..][..h * w];
                        for iy in 0..h {
                            for ix in 0..w {
                                let mut acc = T::zero();
                                for ky in 0..kh {
                                    let row =
                                        &gcanvas[(iy * stride + ky) * cw + ix * stride..][..kw];
                                    for kx in 0..kw {
                                        acc += row[kx] * wblk[ky * kw + kx];
                                    }
                                }
                                dplane[iy * w + ix] += acc;
                            }
                        }
                    }
                    if let Some(dw) = dw.as_deref_mut() {
                        let xplane = &xd[(img * ci + c_in) * h * w..][..h * w];
                        let dwblk = &mut dw[(c_in * co + c_out) * kh * kw..][..kh * kw];
                        for iy in 0..h {
                            for ix in 0..w {
                                let v = xplane[iy * w + ix];
                                for ky in 0..kh {
                                    let row =
                                        &gcanvas[(iy * stride + ky) * cw + ix * stride..][..kw];
                                    for kx in 0..kw {
                                        dwblk[ky * kw + kx] += v * row[kx];
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(vec![dx, dw])
    };
    Ok(Tensor::from_op(
        vec![n, co, ch, cw],
        data,
        vec![x.clone(), weight.clone()],
        "deconv_scatter",
        Some(Box::new(back)),
    ))
}

/// Per-axis copy coverage at union position j for canvas length m and
/// n_shifts copies.
fn coverage(j: usize, n_shifts: usize, m: usize) -> usize {
    let hi = j.min(n_shifts - 1);
    let lo = (j + 1).saturating_sub(m);
    hi - lo + 1
}

/// Averages the canvas with its shifted copies (offsets 0..n_shifts per
/// axis) over the union domain; partially covered positions average
/// only the copies that reach them.
pub(crate) fn shift_average<T: Real>(x: &Tensor<T>, n_shifts: usize) -> TensorResult<Tensor<T>> {
    let s = x.shape();
    if s.len() != 4 {
        return Err(TensorError::BadShape {
            op: "shift_average",
            expected: "rank-4 NCHW".into(),
            got: s,
        });
    }
    if n_shifts < 2 {
        return Err(TensorError::BadArg {
            op: "shift_average",
            msg: "need at least 2 copies per axis".into(),
        });
    }
    let (n, c, h, w) = (s[0], s[1], s[2], s[3]);
    let (ho, wo) = (h + n_shifts - 1, w + n_shifts - 1);
    let inv_cov_y: Vec<T> = (0..ho)
        .map(|j| T::one() / T::from_f64(coverage(j, n_shifts, h) as f64))
        .collect();
    let inv_cov_x: Vec<T> = (0..wo)
        .map(|j| T::one() / T::from_f64(coverage(j, n_shifts, w) as f64))
        .collect();
    let mut data = vec![T::zero(); n * c * ho * wo];
    {
        let xd = x.data();
        for pl in 0..n * c {
            let src = &xd[pl * h * w..][..h * w];
            let dst = &mut data[pl * ho * wo..][..ho * wo];
            for dy in 0..n_shifts {
                for dx in 0..n_shifts {
                    for iy in 0..h {
                        let drow = &mut dst[(iy + dy) * wo + dx..][..w];
                        let srow = &src[iy * w..][..w];
                        for ix in 0..w {
                            drow[ix] += srow[ix];
                        }
                    }
                }
            }
            for jy in 0..ho {
                for jx in 0..wo {
                    dst[jy * wo + jx] = dst[jy * wo + jx] * inv_cov_y[jy] * inv_cov_x[jx];
                }
            }
        }
    }
    let icy = inv_cov_y.clone();
    let icx = inv_cov_x.clone();
    let back = move |args: &BackArgs<'_, T>| {
        let mut dx = vec![T::zero(); n * c * h * w];
        for pl in 0..n * c {
            let gsrc = &args.grad[pl * ho * wo..][..ho * wo];
            let dst = &mut dx[pl * h * w..][..h * w];
            for dy in 0..n_shifts {
                for dxs in 0..n_shifts {
                    for iy in 0..h {
                        let grow = &gsrc[(iy + dy) * wo + dxs..][..w];
                        let icy_v = icy[iy + dy];
                        let drow = &mut dst[iy * w..][..w];
                        for ix in 0..w {
                            drow[ix] += grow[ix] * icy_v * icx[ix + dxs];
                        }
                    }
                }
            }
        }
        Ok(vec![Some(dx)])
    };
    Ok(Tensor::from_op(
        vec![n, c, ho, wo],
        data,
        vec![x.clone()],
        "shift_average",
        Some(Box::new(back)),
    ))
}

pub(crate) fn crop2d<T: Real>(
    x: &Tensor<T>,
    oy: usize,
    ox: usize,
    th: usize,
    tw: usize,
) -> TensorResult<Tensor<T>> {
    let s = x.shape();
    if s.len() != 4 || oy + th > s[2] || ox + tw > s[3] {
        return Err(TensorError::BadShape {
            op: "crop2d",
            expected: format!("window {th}×{tw}+{oy}+{ox} inside input"),
            got: s,
        });
    }
    let (n, c, h, w) = (s[0], s[1], s[2], s[3]);
    let mut data = vec![T::zero(); n * c * th * tw];
    {
        let xd = x.data();
        for pl in 0..n * c {
            for iy in 0..th {
                let src = &xd[pl * h * w + (oy + iy) * w + ox..][..tw];
                data[pl * th * tw + iy * tw..][..tw].copy_from_slice(src);
            }
        }
    }
    let back = move |args: &BackArgs<'_, T>| {
        let mut dx = vec![T::zero(); n * c * h * w];
        for pl in 0..n * c {
            for iy in 0..th {
                let src = &args.grad[pl * th * tw + iy * tw..][..tw];
                dx[pl * h * w + (oy + iy) * w + ox..][..tw].copy_from_slice(src);
            }
        }
        Ok(vec![Some(dx)])
    };
    Ok(Tensor::from_op(
        vec![n, c, th, tw],
        data,
        vec![x.clone()],
        "crop2d",
        Some(Box::new(back)),
    ))
}

/// Largest kernel tap index < k congruent to r modulo stride.
fn max_tap(r: usize, k: usize, stride: usize) -> usize {
    r + ((k - 1 - r) / stride) * stride
}

/// Smallest edge padding that keeps every retained output position
/// fully covered by all kernel taps and all shifted copies, for any
/// input size. The crop offset is `stride·p + (k−stride)/2`.
fn choose_pad(k: usize, stride: usize) -> Option<usize> {
    for p in 0..=k {
        let o = (stride * p + (k - stride) / 2) as isize;
        let lower_ok = (0..stride as isize).all(|d| {
            let j = o - d;
            j >= 0 && j >= max_tap((j % stride as isize) as usize, k, stride) as isize
        });
        let upper_ok = (0..stride as isize).all(|d| {
            let j = o - 1 - d;
            j.div_euclid(stride as isize) <= 2 * p as isize - 1
        });
        if lower_ok && upper_ok {
            return Some(p);
        }
    }
    None
}

/// Upsampling layer: weight [in_ch, out_ch, k, k], output [n, out_ch,
/// stride·h, stride·w].
pub struct Deconv2d<T: Real = f32> {
    pub weight: Tensor<T>,
    pub bias: Tensor<T>,
    pub stride: usize,
    pad: usize,
}

impl<T: Real> Deconv2d<T> {
    pub fn new(
        rng: &mut Rng,
        in_ch: usize,
        out_ch: usize,
        k: usize,
        stride: usize,
    ) -> TensorResult<Self> {
        let weight = he_uniform(rng, &[in_ch, out_ch, k, k], in_ch * k * k)?;
        let bias = Tensor::param(&[out_ch], vec![T::zero(); out_ch])?;
        Self::from_params(weight, bias, stride)
    }

    pub fn from_params(weight: Tensor<T>, bias: Tensor<T>, stride: usize) -> TensorResult<Self> {
        let ws = weight.shape();
        if ws.len() != 4 || ws[2] != ws[3] {
            return Err(TensorError::BadShape {
                op: "deconv2d",
                expected: "square [in,out,k,k] weight".into(),
                got: ws,
            });
        }
        let k = ws[2];
        if stride < 2 {
            return Err(TensorError::BadArg {
                op: "deconv2d",
                msg: "stride must be ≥ 2 (use conv2d otherwise)".into(),
            });
        }
        if k < stride || (k - stride) % 2 != 0 {
            return Err(TensorError::BadArg {
                op: "deconv2d",
                msg: format!("kernel {k} must be ≥ stride {stride} with even difference"),
            });
        }
        let pad = choose_pad(k, stride).ok_or_else(|| TensorError::BadArg {
            op: "deconv2d",
            msg: format!("no valid boundary padding for kernel {k}, stride {stride}"),
        })?;
        Ok(Deconv2d {
            weight,
            bias,
            stride,
            pad,
        })
    }

    /// Shift-and-average upsampling.
    pub fn forward(&self, x: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let s = x.shape();
        if s.len() != 4 {
            return Err(TensorError::BadShape {
                op: "deconv2d",
                expected: "rank-4 NCHW".into(),
                got: s,
            });
        }
        let k = self.weight.shape()[2];
        let (h, w) = (s[2], s[3]);
        let o = self.stride * self.pad + (k - self.stride) / 2;
        let xp = edge_pad2d(x, self.pad)?;
        let canvas = deconv_scatter(&xp, &self.weight, self.stride)?;
        let avg = shift_average(&canvas, self.stride)?;
        let out = crop2d(&avg, o, o, self.stride * h, self.stride * w)?;
        out.add_bias_nchw(&self.bias)
    }

    /// Plain transposed convolution (no averaging); exhibits the grid
    /// pattern the averaged path removes.
    pub fn forward_plain(&self, x: &Tensor<T>) -> TensorResult<Tensor<T>> {
        let s = x.shape();
        if s.len() != 4 {
            return Err(TensorError::BadShape {
                op: "deconv2d",
                expected: "rank-4 NCHW".into(),
                got: s,
            });
        }
        let k = self.weight.shape()[2];
        let (h, w) = (s[2], s[3]);
        let q = (k - self.stride) / 2;
        let canvas = deconv_scatter(x, &self.weight, self.stride)?;
        let out = crop2d(&canvas, q, q, self.stride * h, self.stride * w)?;
        out.add_bias_nchw(&self.bias)
    }

    pub fn register(&self, prefix: &str, map: &mut super::ParamMap<T>) {
        map.add(format!("{prefix}.weight"), self.weight.clone(), true);
        map.add(format!("{prefix}.bias"), self.bias.clone(), true);
    }
}

/// 1-D plain transposed convolution, cropped to stride·len starting at
/// (k−stride)/2. Interior of a constant input alternates between the
/// stride-phase tap sums (e.g. w2+w4 and w1+w3 for k=4, stride 2).
pub fn plain_deconv_1d(filter: &[f64], input: &[f64], stride: usize) -> Vec<f64> {
    let (k, n) = (filter.len(), input.len());
    let mut canvas = vec![0.0; (n - 1) * stride + k];
    for (i, &v) in input.iter().enumerate() {
        for (j, &f) in filter.iter().enumerate() {
            canvas[i * stride + j] += v * f;
        }
    }
    let q = (k - stride) / 2;
    canvas[q..q + stride * n].to_vec()
}

/// 1-D analogue of the layer's full shift-and-average path.
pub fn shift_average_deconv_1d(filter: &[f64], input: &[f64], stride: usize) -> Vec<f64> {
    let (k, n) = (filter.len(), input.len());
    let p = choose_pad(k, stride).expect("no valid padding for this kernel/stride");
    let mut padded = Vec::with_capacity(n + 2 * p);
    padded.extend(std::iter::repeat(input[0]).take(p));
    padded.extend_from_slice(input);
    padded.extend(std::iter::repeat(input[n - 1]).take(p));
    let m = (padded.len() - 1) * stride + k;
    let mut canvas = vec![0.0; m];
    for (i, &v) in padded.iter().enumerate() {
        for (j, &f) in filter.iter().enumerate() {
            canvas[i * stride + j] += v * f;
        }
    }
    let mut avg = vec![0.0; m + stride - 1];
    for (j, slot) in avg.iter_mut().enumerate() {
        let mut acc = 0.0;
        for d in 0..stride {
            if j >= d && j - d < m {
                acc += canvas[j - d];
            }
        }
        *slot = acc / coverage(j, stride, m) as f64;
    }
    let o = stride * p + (k - stride) / 2;
    avg[o..o + stride * n].to_vec()
}
