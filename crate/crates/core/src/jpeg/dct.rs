//! Orthonormal 8×8 DCT-II, as a plain f64 block transform and as a
//! differentiable tensor op.

use crate::error::{TensorError, TensorResult};
use crate::tensor::{BackArgs, Real, Tensor};

/// Orthonormal DCT matrix: row 0 = 1/√8, row i = ½·cos((2j+1)iπ/16).
/// Orthonormality makes the inverse a transpose.
pub fn dct_matrix() -> [f64; 64] {
    let mut d = [0.0; 64];
    for i in 0..8 {
        for j in 0..8 {
            d[i * 8 + j] = if i == 0 {
                0.125f64.sqrt()
            } else {
                0.5 * ((2 * j + 1) as f64 * i as f64 * std::f64::consts::PI / 16.0).cos()
            };
        }
    }
    d
}

fn apply_block(d: &[f64; 64], x: &[f64; 64], transpose: bool) -> [f64; 64] {
    // y = D·x·Dᵀ (forward) or Dᵀ·x·D (inverse).
    let at = |m: &[f64; 64], i: usize, j: usize| if transpose { m[j * 8 + i] } else { m[i * 8 + j] };
    let mut tmp = [0.0; 64];
    for i in 0..8 {
        for j in 0..8 {
            let mut acc = 0.0;
            for k in 0..8 {
                acc += at(d, i, k) * x[k * 8 + j];
            }
            tmp[i * 8 + j] = acc;
        }
    }
    let mut out = [0.0; 64];
    for i in 0..8 {
        for j in 0..8 {
            let mut acc = 0.0;
            for k in 0..8 {
                acc += tmp[i * 8 + k] * at(d, j, k);
            }
            out[i * 8 + j] = acc;
        }
    }
    out
}

/// Forward transform of one level-shifted block.
pub fn dct_block(d: &[f64; 64], x: &[f64; 64]) -> [f64; 64] {
    apply_block(d, x, false)
}

/// Inverse transform back to level-shifted samples.
pub fn idct_block(d: &[f64; 64], coef: &[f64; 64]) -> [f64; 64] {
    apply_block(d, coef, true)
}

fn transform_plane<T: Real>(d: &[f64; 64], src: &[T], dst: &mut [T], w: usize, inverse: bool) {
    let h = src.len() / w;
    for by in (0..h).step_by(8) {
        for bx in (0..w).step_by(8) {
            let mut block = [0.0f64; 64];
            for u in 0..8 {
                for v in 0..8 {
                    block[u * 8 + v] = src[(by + u) * w + bx + v].to_f64();
                }
            }
            let out = apply_block(d, &block, inverse);
            for u in 0..8 {
                for v in 0..8 {
                    dst[(by + u) * w + bx + v] = T::from_f64(out[u * 8 + v]);
                }
            }
        }
    }
}

/// Blockwise DCT of an NCHW tensor whose spatial dims are multiples of
/// 8; coefficients land in place of their block. Linear and
/// orthonormal per block, so the backward pass is the blockwise
/// inverse transform of the incoming gradient.
pub fn dct8x8<T: Real>(x: &Tensor<T>) -> TensorResult<Tensor<T>> {
    let s = x.shape();
    if s.len() != 4 || s[2] % 8 != 0 || s[3] % 8 != 0 {
        return Err(TensorError::BadShape {
            op: "dct8x8",
            expected: "rank-4 NCHW with spatial dims multiples of 8".into(),
            got: s,
        });
    }
    let (planes, h, w) = (s[0] * s[1], s[2], s[3]);
    let d = dct_matrix();
    let mut data = vec![T::zero(); planes * h * w];
    {
        let xd = x.data();
        for pl in 0..planes {
            transform_plane(&d, &xd[pl * h * w..][..h * w], &mut data[pl * h * w..][..h * w], w, false);
        }
    }
    let back = move |args: &BackArgs<'_, T>| {
        let mut dx = vec![T::zero(); args.grad.len()];
        for pl in 0..planes {
            transform_plane(
                &d,
                &args.grad[pl * h * w..][..h * w],
                &mut dx[pl * h * w..][..h * w],
                w,
                true,
            );
        }
        Ok(vec![Some(dx)])
    };
    Ok(Tensor::from_op(
        s,
        data,
        vec![x.clone()],
        "dct8x8",
        Some(Box::new(back)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::check_scalar_fn;

    #[test]
    fn matrix_is_orthonormal() {
        let d = dct_matrix();
        for i in 0..8 {
            for j in 0..8 {
                let dot: f64 = (0..8).map(|k| d[i * 8 + k] * d[j * 8 + k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-14, "rows {i},{j}: {dot}");
            }
        }
    }

    #[test]
    fn constant_blocks_have_pure_dc() {
        let d = dct_matrix();
        // Level-shifted constant 136 − 128 = 8 → DC = 8·8 = 64.
        let coef = dct_block(&d, &[8.0; 64]);
        assert!((coef[0] - 64.0).abs() < 1e-12);
        assert!(coef[1..].iter().all(|&v| v.abs() < 1e-12));
        // Shift 128 exactly cancels: all coefficients 0.
        let zero = dct_block(&d, &[0.0; 64]);
        assert!(zero.iter().all(|&v| v.abs() < 1e-12));
        // 200 − 128 = 72 → DC = 576.
        let coef = dct_block(&d, &[72.0; 64]);
        assert!((coef[0] - 576.0).abs() < 1e-10);
    }

    #[test]
    fn frozen_reference_block() {
        // Pixels sampled once (uniform [0,255], rounded); coefficients
        // computed with an independent matrix implementation in NumPy
        // and frozen at 10 decimals.
        let pixels: [f64; 64] = [
            96.0, 242.0, 187.0, 153.0, 40.0, 40.0, 15.0, 221.0, //
            153.0, 181.0, 5.0, 247.0, 212.0, 54.0, 46.0, 47.0, //
            78.0, 134.0, 110.0, 74.0, 156.0, 36.0, 74.0, 93.0, //
            116.0, 200.0, 51.0, 131.0, 151.0, 12.0, 155.0, 43.0, //
            17.0, 242.0, 246.0, 206.0, 78.0, 25.0, 174.0, 112.0, //
            31.0, 126.0, 9.0, 232.0, 66.0, 169.0, 79.0, 133.0, //
            139.0, 47.0, 247.0, 198.0, 240.0, 228.0, 152.0, 235.0, //
            23.0, 50.0, 12.0, 83.0, 99.0, 69.0, 211.0, 91.0,
        ];
        #[rustfmt::skip]
        let want: [f64; 64] = [
            -71.2500000000, 23.3257631739, -78.0465396484, -126.4936812379, 45.7500000000, -36.8926241360, -152.4905329813, -56.6386940493,
            -34.9458515795, 202.7412747711, 42.9595272511, -49.9581551582, 54.1246890513, -99.5041163064, -55.3152079723, -27.9075991527,
            2.8109837134, -63.0034702056, 32.5045724908, 20.3220385749, 63.7720679303, -13.2866160721, 90.6138527117, -12.3734227586,
            110.2574187130, 20.1831622839, -6.7534968999, -140.0112188915, -21.1424297935, -15.0169942447, 85.7793243699, -142.3460941424,
            -55.0000000000, 37.6294303954, 93.0707642964, -110.6889826981, -113.5000000000, 16.9963073558, -88.8824101456, 38.4525761639,
            90.2348746483, -23.7220785284, 41.0483552167, -7.3089946291, 8.8777433918, -34.0389701884, 122.4683768597, 59.9277418259,
            -157.8406185700, -46.0928116524, 66.3638527117, -23.0397682180, -47.2513052930, -27.5137280597, 1.7454275092, -60.1565316112,
            93.9661187521, 0.8004004629, 3.4198974202, -143.2404632356, -76.7940516563, -18.3899824874, 107.2233094089, 105.8089143088,
        ];
        let d = dct_matrix();
        let mut shifted = [0.0; 64];
        for (s, &p) in shifted.iter_mut().zip(&pixels) {
            *s = p - 128.0;
        }
        let coef = dct_block(&d, &shifted);
        for (c, w) in coef.iter().zip(&want) {
            assert!((c - w).abs() < 1e-9, "{c} vs {w}");
        }
        let back = idct_block(&d, &coef);
        for (b, s) in back.iter().zip(&shifted) {
            assert!((b - s).abs() < 1e-3);
        }
    }

    #[test]
    fn tensor_op_round_trips_through_its_adjoint() {
        // dct8x8 then sum: gradient = idct of ones.
        let mut rng = crate::rng::Rng::seed_from(70);
        let xd: Vec<f64> = (0..2 * 16 * 16).map(|_| rng.uniform(-10.0, 10.0)).collect();
        let x = Tensor::param(&[1, 2, 16, 16], xd).unwrap();
        let mut rng2 = crate::rng::Rng::seed_from(71);
        let report = check_scalar_fn(&[x], 1e-4, 120, &mut rng2, |ins| {
            let c = dct8x8(&ins[0])?;
            Ok(c.square().sum_all().mul_scalar(0.5))
        })
        .unwrap();
        assert!(report.max_rel_err < 1e-6, "err {}", report.max_rel_err);
    }

    #[test]
    fn tensor_op_rejects_unaligned_sizes() {
        let x = Tensor::<f32>::zeros(&[1, 1, 12, 16]);
        assert!(dct8x8(&x).is_err());
    }
}
