//! Training configuration: a flat `key = value` file with `#`
//! comments. Unknown keys are errors so typos fail fast.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::loss::LossWeights;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// JPEG quality the degradation model runs at.
    pub quality: u8,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub beta1: f64,
    /// Naturalness weight λ₁.
    pub lambda1: f64,
    /// Band-range weight λ₂ for block-aligned patches.
    pub lambda2_aligned: f64,
    /// λ₂ for misaligned patches. Such patches have no defined
    /// quantization grid, so any non-zero value is rejected.
    pub lambda2_misaligned: f64,
    pub seed: u64,
    /// Extra proposal-net checkpoints every N steps (0 = final only).
    pub checkpoint_interval: usize,
    /// Directory holding `gt/*.png`; absent means the bundled
    /// synthetic corpus.
    pub dataset_root: Option<PathBuf>,
    pub channels: usize,
    pub patch_size: usize,
    pub patch_stride: usize,
    /// Hard cap on optimization steps across all epochs.
    pub max_iters: Option<usize>,
    pub synth_images: usize,
    pub synth_size: usize,
    pub out_dir: PathBuf,
    /// Pretrained feature-extractor checkpoint; absent means a fresh
    /// one is trained first.
    pub feature_ckpt: Option<PathBuf>,
    pub feature_steps: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            quality: 20,
            epochs: 3,
            batch_size: 16,
            lr: 1e-4,
            beta1: 0.5,
            lambda1: 0.1,
            lambda2_aligned: 0.1,
            lambda2_misaligned: 0.0,
            seed: 0,
            checkpoint_interval: 0,
            dataset_root: None,
            channels: 1,
            patch_size: 64,
            patch_stride: 28,
            max_iters: None,
            synth_images: 16,
            synth_size: 96,
            out_dir: PathBuf::from("train_out"),
            feature_ckpt: None,
            feature_steps: 300,
        }
    }
}

impl TrainConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = TrainConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                Error::Config(format!("line {}: {key} is not {what}", lineno + 1))
            };
            match key {
                "quality" => cfg.quality = value.parse().map_err(|_| bad("a quality"))?,
                "epochs" => cfg.epochs = value.parse().map_err(|_| bad("an integer"))?,
                "batch_size" => cfg.batch_size = value.parse().map_err(|_| bad("an integer"))?,
                "lr" => cfg.lr = value.parse().map_err(|_| bad("a number"))?,
                "beta1" => cfg.beta1 = value.parse().map_err(|_| bad("a number"))?,
                "lambda1" => cfg.lambda1 = value.parse().map_err(|_| bad("a number"))?,
                "lambda2_aligned" => {
                    cfg.lambda2_aligned = value.parse().map_err(|_| bad("a number"))?
                }
                "lambda2_misaligned" => {
                    cfg.lambda2_misaligned = value.parse().map_err(|_| bad("a number"))?
                }
                "seed" => cfg.seed = value.parse().map_err(|_| bad("an integer"))?,
                "checkpoint_interval" => {
                    cfg.checkpoint_interval = value.parse().map_err(|_| bad("an integer"))?
                }
                "dataset_root" => cfg.dataset_root = Some(PathBuf::from(value)),
                "channels" => cfg.channels = value.parse().map_err(|_| bad("an integer"))?,
                "patch_size" => cfg.patch_size = value.parse().map_err(|_| bad("an integer"))?,
                "patch_stride" => {
                    cfg.patch_stride = value.parse().map_err(|_| bad("an integer"))?
                }
                "max_iters" => {
                    cfg.max_iters = Some(value.parse().map_err(|_| bad("an integer"))?)
                }
                "synth_images" => {
                    cfg.synth_images = value.parse().map_err(|_| bad("an integer"))?
                }
                "synth_size" => cfg.synth_size = value.parse().map_err(|_| bad("an integer"))?,
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                "feature_ckpt" => cfg.feature_ckpt = Some(PathBuf::from(value)),
                "feature_steps" => {
                    cfg.feature_steps = value.parse().map_err(|_| bad("an integer"))?
                }
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg = Self::parse(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.quality == 0 || self.quality > 100 {
            return fail(format!("quality {} outside 1..=100", self.quality));
        }
        if self.epochs == 0 {
            return fail("epochs must be ≥ 1".into());
        }
        if self.batch_size == 0 {
            return fail("batch_size must be ≥ 1".into());
        }
        if !(self.lr > 0.0) {
            return fail(format!("lr {} must be positive", self.lr));
        }
        if !(0.0..1.0).contains(&self.beta1) {
            return fail(format!("beta1 {} outside [0,1)", self.beta1));
        }
        if self.lambda1 < 0.0 || self.lambda2_aligned < 0.0 {
            return fail("loss weights must be non-negative".into());
        }
        if self.lambda2_misaligned != 0.0 {
            return fail(
                "lambda2_misaligned must be 0: misaligned patches have no \
                 quantization grid to penalize against"
                    .into(),
            );
        }
        if self.channels != 1 && self.channels != 3 {
            return fail(format!("channels {} must be 1 or 3", self.channels));
        }
        if self.patch_size < 16 || self.patch_size % 2 != 0 {
            return fail(format!(
                "patch_size {} must be even and ≥ 16 (discriminator input floor)",
                self.patch_size
            ));
        }
        if self.patch_stride == 0 {
            return fail("patch_stride must be ≥ 1".into());
        }
        if self.dataset_root.is_none() {
            if self.synth_images == 0 {
                return fail("synth_images must be ≥ 1 without a dataset_root".into());
            }
            if self.synth_size < self.patch_size {
                return fail(format!(
                    "synth_size {} smaller than patch_size {}",
                    self.synth_size, self.patch_size
                ));
            }
        }
        if self.feature_steps == 0 && self.feature_ckpt.is_none() {
            return fail("feature_steps must be ≥ 1 without a feature_ckpt".into());
        }
        Ok(())
    }

    pub fn loss_weights(&self) -> LossWeights {
        LossWeights {
            lambda1: self.lambda1,
            lambda2: self.lambda2_aligned,
        }
    }
}
