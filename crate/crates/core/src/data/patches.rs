//! Patch extraction with JPEG-block alignment tracking.
//!
//! Degradation always happens on the full image before cropping, so
//! misaligned patches carry genuine cross-boundary artifacts. A patch
//! is aligned when its offset and size are all multiples of 8; only
//! aligned patches carry the quantized coefficient subgrid that the
//! DCT-band loss needs.

use crate::error::{Error, Result};
use crate::jpeg::DctBlockGrid;
use crate::rng::Rng;

use super::image::Image;

#[derive(Debug, Clone)]
pub struct PatchRecord {
    /// Ground-truth pixels, planar `[c][size][size]`.
    pub gt: Vec<u8>,
    /// Degraded pixels, same layout.
    pub degraded: Vec<u8>,
    /// Top-left (y, x) in the source image.
    pub offset: (usize, usize),
    pub size: usize,
    pub channels: usize,
    pub aligned: bool,
    /// Quantized coefficients covering this patch; aligned only.
    pub y_dct: Option<DctBlockGrid>,
}

/// Row-major top-left offsets of a full sliding pass.
pub fn patch_grid(h: usize, w: usize, size: usize, stride: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if size > h || size > w || stride == 0 {
        return out;
    }
    for y in (0..=h - size).step_by(stride) {
        for x in (0..=w - size).step_by(stride) {
            out.push((y, x));
        }
    }
    out
}

fn crop_planar(img: &Image, y0: usize, x0: usize, size: usize) -> Vec<u8> {
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let mut out = vec![0u8; c * size * size];
    for ch in 0..c {
        let src = img.plane(ch);
        for y in 0..size {
            out[ch * size * size + y * size..][..size]
                .copy_from_slice(&src[(y0 + y) * w + x0..][..size]);
        }
    }
    debug_assert_eq!(h >= y0 + size, true);
    out
}

/// Every sliding-grid patch pair from a (ground truth, degraded)
/// image, shuffled deterministically by `seed`.
pub fn extract_patches(
    gt: &Image,
    degraded: &Image,
    y_grid: Option<&DctBlockGrid>,
    size: usize,
    stride: usize,
    seed: u64,
) -> Result<Vec<PatchRecord>> {
    if (gt.width(), gt.height(), gt.channels())
        != (degraded.width(), degraded.height(), degraded.channels())
    {
        return Err(Error::Invalid(format!(
            "patch sources differ: {gt:?} vs {degraded:?}"
        )));
    }
    if size == 0 || size > gt.width() || size > gt.height() {
        return Err(Error::Invalid(format!(
            "patch size {size} does not fit a {}×{} image",
            gt.width(),
            gt.height()
        )));
    }
    if stride == 0 {
        return Err(Error::Invalid("patch stride must be positive".into()));
    }
    let size_aligned = size % 8 == 0;
    let mut records = Vec::new();
    for (y, x) in patch_grid(gt.height(), gt.width(), size, stride) {
        let aligned = size_aligned && y % 8 == 0 && x % 8 == 0;
        let y_dct = match (aligned, y_grid) {
            (true, Some(grid)) => Some(grid.subgrid(y / 8, x / 8, size / 8, size / 8)?),
            _ => None,
        };
        records.push(PatchRecord {
            gt: crop_planar(gt, y, x, size),
            degraded: crop_planar(degraded, y, x, size),
            offset: (y, x),
            size,
            channels: gt.channels(),
            aligned,
            y_dct,
        });
    }
    let mut rng = Rng::seed_from(seed);
    rng.shuffle(&mut records);
    Ok(records)
}
