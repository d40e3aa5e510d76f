//! Blockwise quantize–dequantize degradation model (no entropy coding)
//! and the DCT-band range check.

use crate::data::Image;
use crate::error::{Error, Result};

use super::dct::{dct_block, dct_matrix, idct_block};
use super::quant::{quant_table, QuantTable};

/// Quantized DCT coefficients, layout `[c][by][bx][64]`, covering the
/// block-padded extent of an image.
#[derive(Clone, PartialEq)]
pub struct DctBlockGrid {
    pub blocks_y: usize,
    pub blocks_x: usize,
    pub channels: usize,
    coeffs: Vec<f32>,
}

impl std::fmt::Debug for DctBlockGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "DctBlockGrid({}×{} blocks × {} ch)",
            self.blocks_y, self.blocks_x, self.channels
        )
    }
}

impl DctBlockGrid {
    pub fn new(blocks_y: usize, blocks_x: usize, channels: usize, coeffs: Vec<f32>) -> Result<Self> {
        if coeffs.len() != blocks_y * blocks_x * channels * 64 {
            return Err(Error::Invalid(format!(
                "coefficient count {} does not fit {blocks_y}×{blocks_x}×{channels} blocks",
                coeffs.len()
            )));
        }
        Ok(DctBlockGrid {
            blocks_y,
            blocks_x,
            channels,
            coeffs,
        })
    }

    pub fn coeffs(&self) -> &[f32] {
        &self.coeffs
    }

    pub fn block(&self, c: usize, by: usize, bx: usize) -> &[f32] {
        let idx = ((c * self.blocks_y + by) * self.blocks_x + bx) * 64;
        &self.coeffs[idx..idx + 64]
    }

    pub fn block_mut(&mut self, c: usize, by: usize, bx: usize) -> &mut [f32] {
        let idx = ((c * self.blocks_y + by) * self.blocks_x + bx) * 64;
        &mut self.coeffs[idx..idx + 64]
    }

    /// Covered pixel extent (h, w), always multiples of 8.
    pub fn pixel_extent(&self) -> (usize, usize) {
        (self.blocks_y * 8, self.blocks_x * 8)
    }

    /// Block-aligned sub-rectangle of the grid.
    pub fn subgrid(&self, by0: usize, bx0: usize, nby: usize, nbx: usize) -> Result<DctBlockGrid> {
        if by0 + nby > self.blocks_y || bx0 + nbx > self.blocks_x {
            return Err(Error::Invalid(format!(
                "subgrid {nby}×{nbx}+{by0}+{bx0} exceeds {}×{} blocks",
                self.blocks_y, self.blocks_x
            )));
        }
        let mut coeffs = Vec::with_capacity(self.channels * nby * nbx * 64);
        for c in 0..self.channels {
            for by in by0..by0 + nby {
                for bx in bx0..bx0 + nbx {
                    coeffs.extend_from_slice(self.block(c, by, bx));
                }
            }
        }
        DctBlockGrid::new(nby, nbx, self.channels, coeffs)
    }

    /// Coefficients re-laid-out as image planes `[c][h][w]`, each block
    /// occupying its own 8×8 tile (the layout `dct8x8` produces).
    pub fn to_planes(&self) -> Vec<f32> {
        let (h, w) = self.pixel_extent();
        let mut out = vec![0.0f32; self.channels * h * w];
        for c in 0..self.channels {
            for by in 0..self.blocks_y {
                for bx in 0..self.blocks_x {
                    let blk = self.block(c, by, bx);
                    for u in 0..8 {
                        for v in 0..8 {
                            out[c * h * w + (by * 8 + u) * w + bx * 8 + v] = blk[u * 8 + v];
                        }
                    }
                }
            }
        }
        out
    }
}

/// Edge-replicates an image up to the next multiple of 8 per side.
pub fn pad_to_blocks(img: &Image) -> Result<Image> {
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let (hp, wp) = (h.div_ceil(8) * 8, w.div_ceil(8) * 8);
    if (hp, wp) == (h, w) {
        return Ok(img.clone());
    }
    let mut data = vec![0u8; hp * wp * c];
    for ch in 0..c {
        let src = img.plane(ch);
        let dst = &mut data[ch * hp * wp..][..hp * wp];
        for y in 0..hp {
            let sy = y.min(h - 1);
            for x in 0..wp {
                dst[y * wp + x] = src[sy * w + x.min(w - 1)];
            }
        }
    }
    Image::new(wp, hp, c, data)
}

/// Unquantized blockwise DCT of (pixel − 128); dims must be block
/// multiples (`pad_to_blocks` first).
pub fn grid_from_pixels(img: &Image) -> Result<DctBlockGrid> {
    let (h, w, c) = (img.height(), img.width(), img.channels());
    if h % 8 != 0 || w % 8 != 0 {
        return Err(Error::Invalid(format!(
            "block DCT needs dims that are multiples of 8, got {w}×{h}"
        )));
    }
    let d = dct_matrix();
    let (nby, nbx) = (h / 8, w / 8);
    let mut coeffs = Vec::with_capacity(c * nby * nbx * 64);
    for ch in 0..c {
        let plane = img.plane(ch);
        for by in 0..nby {
            for bx in 0..nbx {
                let mut block = [0.0f64; 64];
                for u in 0..8 {
                    for v in 0..8 {
                        block[u * 8 + v] = plane[(by * 8 + u) * w + bx * 8 + v] as f64 - 128.0;
                    }
                }
                let coef = dct_block(&d, &block);
                coeffs.extend(coef.iter().map(|&v| v as f32));
            }
        }
    }
    DctBlockGrid::new(nby, nbx, c, coeffs)
}

/// Degradation output: decoded pixels (original extent), the quantized
/// coefficient grid (padded extent), and the table used.
#[derive(Debug, Clone)]
pub struct Degraded {
    pub image: Image,
    pub grid: DctBlockGrid,
    pub table: QuantTable,
}

/// Quantize–dequantize every 8×8 block:
/// Yᵈᶜᵗ = ROUND(Xᵈᶜᵗ/Q)·Q (half away from zero), then decode with
/// clamp(round(idct + 128), 0, 255). Color images use the luminance
/// table on every channel. The image is edge-padded to block multiples
/// first; decoded pixels are cropped back.
pub fn jpeg_degrade(img: &Image, quality: u8) -> Result<Degraded> {
    let table = quant_table(quality)?;
    let padded = pad_to_blocks(img)?;
    let (h, w, c) = (padded.height(), padded.width(), padded.channels());
    let d = dct_matrix();
    let (nby, nbx) = (h / 8, w / 8);
    let mut coeffs = Vec::with_capacity(c * nby * nbx * 64);
    let mut decoded = vec![0u8; c * h * w];
    for ch in 0..c {
        let plane = padded.plane(ch);
        let out = &mut decoded[ch * h * w..][..h * w];
        for by in 0..nby {
            for bx in 0..nbx {
                let mut block = [0.0f64; 64];
                for u in 0..8 {
                    for v in 0..8 {
                        block[u * 8 + v] = plane[(by * 8 + u) * w + bx * 8 + v] as f64 - 128.0;
                    }
                }
                let coef = dct_block(&d, &block);
                let mut quantized = [0.0f64; 64];
                for (i, (&cf, &q)) in coef.iter().zip(&table.q).enumerate() {
                    quantized[i] = (cf / q as f64).round() * q as f64;
                }
                coeffs.extend(quantized.iter().map(|&v| v as f32));
                let pix = idct_block(&d, &quantized);
                for u in 0..8 {
                    for v in 0..8 {
                        out[(by * 8 + u) * w + bx * 8 + v] =
                            (pix[u * 8 + v] + 128.0).round().clamp(0.0, 255.0) as u8;
                    }
                }
            }
        }
    }
    let grid = DctBlockGrid::new(nby, nbx, c, coeffs)?;
    let (oh, ow) = (img.height(), img.width());
    let image = if (oh, ow) == (h, w) {
        Image::new(w, h, c, decoded)?
    } else {
        let mut cropped = vec![0u8; c * oh * ow];
        for ch in 0..c {
            for y in 0..oh {
                cropped[ch * oh * ow + y * ow..][..ow]
                    .copy_from_slice(&decoded[ch * h * w + y * w..][..ow]);
            }
        }
        Image::new(ow, oh, c, cropped)?
    };
    Ok(Degraded { image, grid, table })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeCheck {
    pub violations: usize,
    pub max_excess: f64,
}

/// Counts coefficients outside the band |X̂ᵈᶜᵗ − Yᵈᶜᵗ| ≤ Q/2 + slack
/// and reports the largest overshoot beyond Q/2 (0 when none).
pub fn dct_range_check(
    xhat: &DctBlockGrid,
    y: &DctBlockGrid,
    table: &QuantTable,
    slack: f64,
) -> Result<RangeCheck> {
    if (xhat.blocks_y, xhat.blocks_x, xhat.channels) != (y.blocks_y, y.blocks_x, y.channels) {
        return Err(Error::Invalid(format!(
            "grids differ: {xhat:?} vs {y:?}"
        )));
    }
    let mut violations = 0;
    let mut max_excess = 0.0f64;
    for (i, (&a, &b)) in xhat.coeffs.iter().zip(&y.coeffs).enumerate() {
        let half_q = table.q[i % 64] as f64 / 2.0;
        let excess = (a as f64 - b as f64).abs() - half_q;
        if excess > slack {
            violations += 1;
        }
        if excess > max_excess {
            max_excess = excess;
        }
    }
    Ok(RangeCheck {
        violations,
        max_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Smooth mid-range test image: no clamping anywhere at decode.
    pub(crate) fn smooth_image(w: usize, h: usize, phase: f64) -> Image {
        let mut data = vec![0u8; w * h];
        for y in 0..h {
            for x in 0..w {
                let v = 120.0
                    + 50.0 * ((x as f64 / 9.0 + phase).sin())
                    + 35.0 * ((y as f64 / 6.5 - phase).cos());
                data[y * w + x] = v.round().clamp(40.0, 215.0) as u8;
            }
        }
        Image::new(w, h, 1, data).unwrap()
    }

    #[test]
    fn constant_128_is_a_fixed_point_at_any_quality() {
        let img = Image::new(16, 16, 1, vec![128; 256]).unwrap();
        for q in [1, 5, 50, 100] {
            let out = jpeg_degrade(&img, q).unwrap();
            assert!(out.image.data().iter().all(|&v| v == 128), "quality {q}");
            assert!(out.grid.coeffs().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn quality_100_round_trip_is_within_one_gray_level() {
        let img = smooth_image(24, 16, 0.3);
        let out = jpeg_degrade(&img, 100).unwrap();
        for (a, b) in out.image.data().iter().zip(img.data()) {
            assert!((*a as i32 - *b as i32).abs() <= 1);
        }
    }

    #[test]
    fn degrading_the_decoded_image_is_idempotent() {
        for q in [5u8, 20, 50] {
            let img = smooth_image(32, 32, 1.1);
            let once = jpeg_degrade(&img, q).unwrap();
            // Mid-range input: decode must not have clamped, or the
            // fixed-point argument does not apply.
            let lo = *once.image.data().iter().min().unwrap();
            let hi = *once.image.data().iter().max().unwrap();
            assert!(lo > 0 && hi < 255, "quality {q} clamped ({lo}..{hi})");
            let twice = jpeg_degrade(&once.image, q).unwrap();
            assert_eq!(once.grid.coeffs(), twice.grid.coeffs(), "quality {q}");
            assert_eq!(once.image.data(), twice.image.data(), "quality {q}");
        }
    }

    #[test]
    fn ground_truth_always_sits_inside_the_band() {
        for (q, phase) in [(5u8, 0.0), (20, 0.7), (50, 2.2)] {
            let img = smooth_image(40, 24, phase);
            let out = jpeg_degrade(&img, q).unwrap();
            let x_dct = grid_from_pixels(&img).unwrap();
            let check = dct_range_check(&x_dct, &out.grid, &out.table, 1e-3).unwrap();
            assert_eq!(check.violations, 0, "quality {q}: {check:?}");
        }
    }

    #[test]
    fn range_check_detects_a_single_shifted_coefficient() {
        let img = smooth_image(16, 16, 0.5);
        let out = jpeg_degrade(&img, 20).unwrap();
        let mut moved = out.grid.clone();
        // Shift coefficient (2,3) of block (1,0) by exactly Q(2,3).
        let q23 = out.table.q[2 * 8 + 3] as f32;
        moved.block_mut(0, 1, 0)[2 * 8 + 3] += q23;
        let check = dct_range_check(&moved, &out.grid, &out.table, 1e-3).unwrap();
        assert_eq!(check.violations, 1);
        assert!((check.max_excess - q23 as f64 / 2.0).abs() < 1e-6);
        // Unperturbed grid against itself: clean.
        let clean = dct_range_check(&out.grid, &out.grid, &out.table, 1e-3).unwrap();
        assert_eq!(clean, RangeCheck { violations: 0, max_excess: 0.0 });
    }

    #[test]
    fn range_check_rejects_mismatched_grids() {
        let a = jpeg_degrade(&smooth_image(16, 16, 0.0), 20).unwrap();
        let b = jpeg_degrade(&smooth_image(24, 16, 0.0), 20).unwrap();
        assert!(dct_range_check(&a.grid, &b.grid, &a.table, 0.0).is_err());
    }

    #[test]
    fn odd_sizes_are_padded_and_cropped_back() {
        let img = smooth_image(21, 13, 0.9);
        let out = jpeg_degrade(&img, 50).unwrap();
        assert_eq!((out.image.width(), out.image.height()), (21, 13));
        assert_eq!((out.grid.blocks_y, out.grid.blocks_x), (2, 3));
        let padded = pad_to_blocks(&img).unwrap();
        assert_eq!((padded.width(), padded.height()), (24, 16));
        // Replicated border: last real column copied outward.
        assert_eq!(padded.plane(0)[23], padded.plane(0)[20]);
    }

    #[test]
    fn subgrid_matches_blockwise_copy() {
        let img = smooth_image(32, 24, 1.7);
        let out = jpeg_degrade(&img, 20).unwrap();
        let sub = out.grid.subgrid(1, 2, 2, 2).unwrap();
        assert_eq!((sub.blocks_y, sub.blocks_x), (2, 2));
        assert_eq!(sub.block(0, 0, 0), out.grid.block(0, 1, 2));
        assert_eq!(sub.block(0, 1, 1), out.grid.block(0, 2, 3));
        assert!(out.grid.subgrid(2, 2, 2, 2).is_err());
    }

    #[test]
    fn planes_layout_places_blocks_in_their_tiles() {
        let img = smooth_image(16, 16, 0.2);
        let out = jpeg_degrade(&img, 20).unwrap();
        let planes = out.grid.to_planes();
        assert_eq!(planes.len(), 16 * 16);
        assert_eq!(planes[0], out.grid.block(0, 0, 0)[0]);
        // Coefficient (u=3, v=5) of block (1,1) lands at (11, 13).
        assert_eq!(planes[11 * 16 + 13], out.grid.block(0, 1, 1)[3 * 8 + 5]);
    }

    #[test]
    fn three_channel_images_degrade_per_channel() {
        let mut data = vec![0u8; 3 * 256];
        for (i, v) in data.iter_mut().enumerate() {
            *v = (60 + (i * 7) % 130) as u8;
        }
        let img = Image::new(16, 16, 3, data).unwrap();
        let out = jpeg_degrade(&img, 50).unwrap();
        assert_eq!(out.image.channels(), 3);
        assert_eq!(out.grid.channels, 3);
        // Each channel independently equals its single-channel degrade.
        for c in 0..3 {
            let single = Image::new(16, 16, 1, img.plane(c).to_vec()).unwrap();
            let single_out = jpeg_degrade(&single, 50).unwrap();
            assert_eq!(out.image.plane(c), single_out.image.plane(0), "channel {c}");
        }
    }
}
