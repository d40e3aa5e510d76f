//! 8-bit image buffers with planar channel layout.

use std::path::Path;

use crate::error::{Error, Result};

/// Decoded image, pixel range [0,255], planar layout `[c][h][w]`.
/// One channel is luminance, three is RGB.
#[derive(Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for Image {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Image({}×{}×{})", self.width, self.height, self.channels)
    }
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if !(channels == 1 || channels == 3) {
            return Err(Error::Invalid(format!(
                "images carry 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != width * height * channels || width == 0 || height == 0 {
            return Err(Error::Invalid(format!(
                "image buffer of {} bytes does not fit {width}×{height}×{channels}",
                data.len()
            )));
        }
        Ok(Image {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Planar pixel data, `[c][h][w]`.
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn plane(&self, c: usize) -> &[u8] {
        &self.data[c * self.width * self.height..][..self.width * self.height]
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let dynimg = image::open(path).map_err(|e| Error::Image {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        let (w, h) = (dynimg.width() as usize, dynimg.height() as usize);
        let color = dynimg.color();
        if color.channel_count() == 1 && !color.has_alpha() {
            let buf = dynimg.to_luma8();
            Image::new(w, h, 1, buf.into_raw())
        } else {
            let buf = dynimg.to_rgb8();
            let raw = buf.into_raw();
            let mut planar = vec![0u8; w * h * 3];
            for i in 0..w * h {
                planar[i] = raw[3 * i];
                planar[w * h + i] = raw[3 * i + 1];
                planar[2 * w * h + i] = raw[3 * i + 2];
            }
            Image::new(w, h, 3, planar)
        }
    }

    /// Writes PNG, PGM, or PPM by file extension.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let (w, h) = (self.width as u32, self.height as u32);
        let interleaved = self.interleave();
        let res = match self.channels {
            1 => image::save_buffer(path, &interleaved, w, h, image::ColorType::L8),
            _ => image::save_buffer(path, &interleaved, w, h, image::ColorType::Rgb8),
        };
        res.map_err(|e| Error::Image {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
    }

    fn interleave(&self) -> Vec<u8> {
        if self.channels == 1 {
            return self.data.clone();
        }
        let plane = self.width * self.height;
        let mut out = vec![0u8; self.data.len()];
        for i in 0..plane {
            for c in 0..self.channels {
                out[self.channels * i + c] = self.data[c * plane + i];
            }
        }
        out
    }

    /// Luminance as floats (before 8-bit rounding):
    /// Y = 16 + (65.481·R + 128.553·G + 24.966·B)/255, studio swing.
    pub fn luminance_f32(&self) -> Result<Vec<f32>> {
        if self.channels != 3 {
            return Err(Error::Invalid(format!(
                "luminance conversion needs 3 channels, got {}",
                self.channels
            )));
        }
        let plane = self.width * self.height;
        let (r, g, b) = (
            &self.data[..plane],
            &self.data[plane..2 * plane],
            &self.data[2 * plane..],
        );
        Ok((0..plane)
            .map(|i| {
                let y = 65.481 * r[i] as f64 + 128.553 * g[i] as f64 + 24.966 * b[i] as f64;
                (16.0 + y / 255.0) as f32
            })
            .collect())
    }

    /// Luminance as an 8-bit single-channel image.
    pub fn to_luminance(&self) -> Result<Image> {
        let y = self.luminance_f32()?;
        Image::new(
            self.width,
            self.height,
            1,
            y.into_iter()
                .map(|v| v.round().clamp(0.0, 255.0) as u8)
                .collect(),
        )
    }

    /// Pixels mapped to the model range [−1, 1], planar f32.
    pub fn to_model_range(&self) -> Vec<f32> {
        self.data.iter().map(|&v| v as f32 / 127.5 - 1.0).collect()
    }

    /// Inverse of `to_model_range` with round-and-clamp to 8 bits.
    pub fn from_model_range(
        width: usize,
        height: usize,
        channels: usize,
        values: &[f32],
    ) -> Result<Image> {
        let data = values
            .iter()
            .map(|&v| ((v + 1.0) * 127.5).round().clamp(0.0, 255.0) as u8)
            .collect();
        Image::new(width, height, channels, data)
    }
}
