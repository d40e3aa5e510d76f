//! Deterministic synthetic image corpus for desk-scale runs: smooth
//! shaded fields and high-frequency textures, kept mid-range so the
//! degradation model's decode clamp stays inactive on the smooth class.

use crate::rng::Rng;

use super::image::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthClass {
    Smooth,
    Texture,
}

/// One random image of the given class: smooth images are sums of two
/// low-frequency waves; textures add a high-frequency product grating
/// and per-pixel noise.
pub fn synth_image(rng: &mut Rng, w: usize, h: usize, class: SynthClass) -> Image {
    let a1 = rng.uniform(25.0, 45.0);
    let a2 = rng.uniform(20.0, 40.0);
    let f1 = rng.uniform(0.04, 0.12);
    let f2 = rng.uniform(0.05, 0.14);
    let p1 = rng.uniform(0.0, std::f64::consts::TAU);
    let p2 = rng.uniform(0.0, std::f64::consts::TAU);
    let (a3, fx, fy, p3) = match class {
        SynthClass::Smooth => (0.0, 0.0, 0.0, 0.0),
        SynthClass::Texture => (
            rng.uniform(25.0, 40.0),
            rng.uniform(0.7, 1.4),
            rng.uniform(0.7, 1.4),
            rng.uniform(0.0, std::f64::consts::TAU),
        ),
    };
    let noise_amp = match class {
        SynthClass::Smooth => 0.0,
        SynthClass::Texture => 12.0,
    };
    let mut data = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut v = 128.0
                + a1 * (std::f64::consts::TAU * f1 * x as f64 + p1).sin()
                + a2 * (std::f64::consts::TAU * f2 * y as f64 + p2).cos();
            if a3 > 0.0 {
                v += a3 * (fx * x as f64 + p3).sin() * (fy * y as f64).cos();
                v += rng.uniform(-noise_amp, noise_amp);
            }
            data[y * w + x] = v.round().clamp(30.0, 225.0) as u8;
        }
    }
    Image::new(w, h, 1, data).expect("valid synthetic geometry")
}

/// Deterministic unlabeled corpus, alternating classes.
pub fn synth_corpus(seed: u64, count: usize, w: usize, h: usize) -> Vec<Image> {
    let mut rng = Rng::seed_from(seed);
    (0..count)
        .map(|i| {
            let class = if i % 2 == 0 {
                SynthClass::Smooth
            } else {
                SynthClass::Texture
            };
            synth_image(&mut rng, w, h, class)
        })
        .collect()
}

/// Deterministic labeled corpus: label 0 = smooth, 1 = texture.
pub fn synth_labeled(seed: u64, count: usize, w: usize, h: usize) -> Vec<(Image, usize)> {
    let mut rng = Rng::seed_from(seed);
    (0..count)
        .map(|i| {
            let (class, label) = if i % 2 == 0 {
                (SynthClass::Smooth, 0)
            } else {
                (SynthClass::Texture, 1)
            };
            (synth_image(&mut rng, w, h, class), label)
        })
        .collect()
}
