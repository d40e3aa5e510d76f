//! Batch-free inference: pad to even dims, run the restorer once per
//! noise draw in eval mode, crop back, and return 8-bit images.

use crate::data::Image;
use crate::error::{Error, Result};
use crate::net::{sample_z, ProposalNet};
use crate::nn::BnMode;
use crate::rng::Rng;
use crate::tensor::Tensor;

/// Edge-replicates one row/column on the bottom/right as needed to
/// make both dims even.
pub fn pad_to_even(img: &Image) -> Result<Image> {
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let (hp, wp) = (h + h % 2, w + w % 2);
    if (hp, wp) == (h, w) {
        return Ok(img.clone());
    }
    let mut data = vec![0u8; c * hp * wp];
    for ci in 0..c {
        let src = img.plane(ci);
        let dst = &mut data[ci * hp * wp..][..hp * wp];
        for y in 0..hp {
            for x in 0..wp {
                dst[y * wp + x] = src[y.min(h - 1) * w + x.min(w - 1)];
            }
        }
    }
    Image::new(wp, hp, c, data)
}

/// Restores `img` with `samples` independent noise draws. Results are
/// deterministic in `seed` and ordered by draw.
pub fn restore_image(
    net: &ProposalNet<f32>,
    img: &Image,
    samples: usize,
    seed: u64,
) -> Result<Vec<Image>> {
    if img.channels() != net.channels() {
        return Err(Error::Invalid(format!(
            "image has {} channels, network restores {}",
            img.channels(),
            net.channels()
        )));
    }
    if samples == 0 {
        return Err(Error::Invalid("need at least one noise sample".into()));
    }
    let padded = pad_to_even(img)?;
    let (h, w, c) = (padded.height(), padded.width(), padded.channels());
    net.set_mode(BnMode::Eval);
    let y = Tensor::constant(&[1, c, h, w], padded.to_model_range())?;

    let mut rng = Rng::seed_from(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let z = sample_z::<f32>(&mut rng, 1, h, w)?;
        let xhat = net.forward(&y, &z)?.to_vec();
        let (oh, ow) = (img.height(), img.width());
        let mut cropped = Vec::with_capacity(c * oh * ow);
        for ci in 0..c {
            for row in 0..oh {
                let base = ci * h * w + row * w;
                cropped.extend_from_slice(&xhat[base..base + ow]);
            }
        }
        out.push(Image::from_model_range(ow, oh, c, &cropped)?);
    }
    Ok(out)
}
