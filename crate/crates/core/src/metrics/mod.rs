//! PSNR, SSIM, and PSNR-B quality metrics.
//!
//! PSNR-B penalizes blocking: boundary pixel-pair differences (pairs
//! straddling an 8-aligned block edge of the test image) in excess of
//! interior pair differences are folded into the MSE before the log.
//! A worked example lives in `docs/psnrb.md` and is asserted in the
//! tests below.

use crate::data::Image;
use crate::error::{Error, Result};

/// Reported for identical inputs (and as a ceiling) to keep CSVs finite.
pub const PSNR_CAP_DB: f64 = 99.0;

const BLOCK: usize = 8;

fn check_congruent(a: &Image, b: &Image) -> Result<()> {
    if (a.width(), a.height(), a.channels()) != (b.width(), b.height(), b.channels()) {
        return Err(Error::Invalid(format!("metric inputs differ: {a:?} vs {b:?}")));
    }
    Ok(())
}

fn mse(a: &Image, b: &Image) -> f64 {
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    sum / a.data().len() as f64
}

/// 10·log10(255²/MSE), capped at 99 dB.
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    check_congruent(a, b)?;
    let e = mse(a, b);
    if e == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (255.0f64 * 255.0 / e).log10()).min(PSNR_CAP_DB))
}

/// Mean local SSIM over all 8×8 uniform windows (stride 1) of the
/// first channel; K1 = 0.01, K2 = 0.03, L = 255. The window side is a
/// convention, not part of the metric; `ssim_windowed` takes other
/// sizes.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    ssim_windowed(a, b, BLOCK)
}

/// `ssim` with an explicit uniform-window side.
pub fn ssim_windowed(a: &Image, b: &Image, window: usize) -> Result<f64> {
    check_congruent(a, b)?;
    let (w, h) = (a.width(), a.height());
    if window == 0 {
        return Err(Error::Invalid("ssim window must be ≥ 1".into()));
    }
    if w < window || h < window {
        return Err(Error::Invalid(format!(
            "ssim needs at least {window}×{window} pixels, got {w}×{h}"
        )));
    }
    let pa = a.plane(0);
    let pb = b.plane(0);
    let c1 = (0.01f64 * 255.0).powi(2);
    let c2 = (0.03f64 * 255.0).powi(2);
    let n = (window * window) as f64;
    let mut total = 0.0;
    let mut windows = 0usize;
    for y0 in 0..=h - window {
        for x0 in 0..=w - window {
            let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for y in y0..y0 + window {
                for x in x0..x0 + window {
                    let va = pa[y * w + x] as f64;
                    let vb = pb[y * w + x] as f64;
                    sa += va;
                    sb += vb;
                    saa += va * va;
                    sbb += vb * vb;
                    sab += va * vb;
                }
            }
            let ma = sa / n;
            let mb = sb / n;
            let var_a = saa / n - ma * ma;
            let var_b = sbb / n - mb * mb;
            let cov = sab / n - ma * mb;
            let s = ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
            total += s;
            windows += 1;
        }
    }
    Ok(total / windows as f64)
}

/// Mean squared pixel-pair differences of `img`, split into pairs that
/// straddle an 8-aligned block boundary and pairs that do not.
/// Returns ((boundary_sum, boundary_count), (interior_sum, interior_count)).
fn pair_differences(img: &Image) -> ((f64, usize), (f64, usize)) {
    let (w, h) = (img.width(), img.height());
    let p = img.plane(0);
    let (mut sb, mut nb, mut sc, mut nc) = (0.0f64, 0usize, 0.0f64, 0usize);
    for y in 0..h {
        for x in 0..w - 1 {
            let d = p[y * w + x] as f64 - p[y * w + x + 1] as f64;
            if (x + 1) % BLOCK == 0 {
                sb += d * d;
                nb += 1;
            } else {
                sc += d * d;
                nc += 1;
            }
        }
    }
    for y in 0..h - 1 {
        for x in 0..w {
            let d = p[y * w + x] as f64 - p[(y + 1) * w + x] as f64;
            if (y + 1) % BLOCK == 0 {
                sb += d * d;
                nb += 1;
            } else {
                sc += d * d;
                nc += 1;
            }
        }
    }
    ((sb, nb), (sc, nc))
}

/// Blocking-effect factor of the test image: η·(D_B − D_BC) when the
/// boundary mean square D_B exceeds the interior mean square D_BC,
/// with η = log2(8)/log2(min(h, w)); zero otherwise.
pub fn blocking_effect_factor(test: &Image) -> Result<f64> {
    let (w, h) = (test.width(), test.height());
    if w < 2 || h < 2 {
        return Err(Error::Invalid(format!("image too small for BEF: {w}×{h}")));
    }
    let ((sb, nb), (sc, nc)) = pair_differences(test);
    if nb == 0 || nc == 0 {
        return Ok(0.0);
    }
    let d_b = sb / nb as f64;
    let d_bc = sc / nc as f64;
    if d_b <= d_bc {
        return Ok(0.0);
    }
    let eta = (BLOCK as f64).log2() / (w.min(h) as f64).log2();
    Ok(eta * (d_b - d_bc))
}

/// 10·log10(255²/(MSE + BEF)); equals `psnr` exactly when BEF = 0.
pub fn psnr_b(reference: &Image, test: &Image) -> Result<f64> {
    check_congruent(reference, test)?;
    let denom = mse(reference, test) + blocking_effect_factor(test)?;
    if denom == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (255.0f64 * 255.0 / denom).log10()).min(PSNR_CAP_DB))
}

/// One evaluation row; serialized with `csv_row`.
#[derive(Debug, Clone)]
pub struct MetricReport {
    pub image: String,
    pub quality: u8,
    pub approach: String,
    pub psnr_db: f64,
    pub ssim: f64,
    pub psnr_b_db: f64,
}

pub const CSV_HEADER: &str = "image,quality,approach,psnr,ssim,psnrb";

impl MetricReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.4},{:.6},{:.4}",
            self.image, self.quality, self.approach, self.psnr_db, self.ssim, self.psnr_b_db
        )
    }
}
