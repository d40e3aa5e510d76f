//! Alternating GAN training. Per step: one restoration forward pass,
//! a discriminator update on real/fake (skipped during the first
//! epoch, which warms the restorer up on perceptual + band terms
//! alone), then a restorer update on the combined objective with the
//! discriminator's parameters frozen.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use crate::data::{dataset_gt_paths, extract_patches, synth_corpus, Image, PatchRecord};
use crate::error::{Error, Result};
use crate::jpeg::{jpeg_degrade, DctBlockGrid, QuantTable};
use crate::loss::{combined_loss, discriminator_loss, LossReport};
use crate::net::{
    load_checkpoint_into, read_checkpoint, sample_z, save_checkpoint, DiscriminatorNet,
    FeatureNet, ProposalNet,
};
use crate::nn::ParamMap;
use crate::rng::Rng;
use crate::tensor::{Adam, Tensor};

use super::config::TrainConfig;
use super::feature::train_feature_extractor;

pub const TRAIN_LOG_HEADER: &str = "step,l_percept,l_natural,l_jpeg,l_total,l_D";

/// One logged step; `d_loss`/`natural` are absent during the warm-up
/// epoch.
#[derive(Debug, Clone, Copy)]
pub struct StepStats {
    pub step: usize,
    pub epoch: usize,
    pub report: LossReport,
    pub d_loss: Option<f64>,
}

impl StepStats {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_default();
        format!(
            "{},{:.6},{},{:.6},{:.6},{}",
            self.step + 1,
            self.report.percept,
            opt(self.report.natural),
            self.report.jpeg,
            self.report.total,
            opt(self.d_loss)
        )
    }
}

/// Paths written by a completed run.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub proposal: PathBuf,
    pub discriminator: PathBuf,
    pub feature: PathBuf,
    pub log: PathBuf,
    pub steps: usize,
}

pub struct Trainer {
    cfg: TrainConfig,
    table: QuantTable,
    f: ProposalNet<f32>,
    d: DiscriminatorNet<f32>,
    d_params: ParamMap<f32>,
    fe: FeatureNet<f32>,
    adam_f: Adam<f32>,
    adam_d: Adam<f32>,
    pool: Vec<PatchRecord>,
    rng: Rng,
    cursor: usize,
    iters_per_epoch: usize,
    total_iters: usize,
    history: Vec<StepStats>,
}

fn load_gt_images(cfg: &TrainConfig) -> Result<Vec<Image>> {
    match &cfg.dataset_root {
        Some(root) => {
            let mut images = Vec::new();
            for path in dataset_gt_paths(root)? {
                let img = Image::load(&path)?;
                let img = match (img.channels(), cfg.channels) {
                    (c, want) if c == want => img,
                    (3, 1) => img.to_luminance()?,
                    (c, want) => {
                        return Err(Error::Invalid(format!(
                            "{}: has {c} channels, config wants {want}",
                            path.display()
                        )))
                    }
                };
                if img.width() < cfg.patch_size || img.height() < cfg.patch_size {
                    return Err(Error::Invalid(format!(
                        "{}: {}×{} smaller than patch_size {}",
                        path.display(),
                        img.width(),
                        img.height(),
                        cfg.patch_size
                    )));
                }
                images.push(img);
            }
            Ok(images)
        }
        None => Ok(synth_corpus(
            cfg.seed ^ 0x636f7270,
            cfg.synth_images,
            cfg.synth_size,
            cfg.synth_size,
        )),
    }
}

impl Trainer {
    pub fn new(cfg: TrainConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = Rng::seed_from(cfg.seed);
        let table = crate::jpeg::quant_table(cfg.quality)?;

        let fe = match &cfg.feature_ckpt {
            Some(path) => {
                let raw = read_checkpoint(path)?;
                let shapes: Vec<(String, Vec<usize>)> =
                    raw.iter().map(|(n, d, _)| (n.clone(), d.clone())).collect();
                let (in_ch, classes) = FeatureNet::<f32>::geometry_from_shapes(&shapes)?;
                if in_ch != cfg.channels {
                    return Err(Error::Invalid(format!(
                        "{}: feature extractor has {in_ch} input channels, config wants {}",
                        path.display(),
                        cfg.channels
                    )));
                }
                let net = FeatureNet::<f32>::new(&mut rng.fork(), in_ch, classes)?;
                load_checkpoint_into(&net.param_map(), path)?;
                net
            }
            None => train_feature_extractor(cfg.channels, cfg.seed ^ 0x6665, cfg.feature_steps)?.0,
        };
        fe.freeze();

        let mut pool = Vec::new();
        for (i, gt) in load_gt_images(&cfg)?.iter().enumerate() {
            let degraded = jpeg_degrade(gt, cfg.quality)?;
            pool.extend(extract_patches(
                gt,
                &degraded.image,
                Some(&degraded.grid),
                cfg.patch_size,
                cfg.patch_stride,
                cfg.seed ^ (i as u64).wrapping_mul(0x9e3779b97f4a7c15),
            )?);
        }
        if pool.is_empty() {
            return Err(Error::Invalid("no training patches".into()));
        }
        rng.shuffle(&mut pool);

        let batch = cfg.batch_size.min(pool.len());
        let iters_per_epoch = (pool.len() / batch).max(1);
        let total_iters = (cfg.epochs * iters_per_epoch).min(cfg.max_iters.unwrap_or(usize::MAX));

        let f = ProposalNet::<f32>::new(&mut rng, cfg.channels)?;
        let d = DiscriminatorNet::<f32>::new(&mut rng, cfg.channels)?;
        let d_params = d.param_map();
        let adam_f = Adam::new(f.param_map().trainable_tensors(), cfg.lr, cfg.beta1);
        let adam_d = Adam::new(d_params.trainable_tensors(), cfg.lr, cfg.beta1);

        Ok(Trainer {
            cfg,
            table,
            f,
            d,
            d_params,
            fe,
            adam_f,
            adam_d,
            pool,
            rng,
            cursor: 0,
            iters_per_epoch,
            total_iters,
            history: Vec::new(),
        })
    }

    pub fn iters_per_epoch(&self) -> usize {
        self.iters_per_epoch
    }

    pub fn total_iters(&self) -> usize {
        self.total_iters
    }

    pub fn history(&self) -> &[StepStats] {
        &self.history
    }

    pub fn proposal(&self) -> &ProposalNet<f32> {
        &self.f
    }

    pub fn quant_table(&self) -> &QuantTable {
        &self.table
    }

    fn next_batch(&mut self) -> Vec<usize> {
        let batch = self.cfg.batch_size.min(self.pool.len());
        if self.cursor + batch > self.pool.len() {
            self.rng.shuffle(&mut self.pool);
            self.cursor = 0;
        }
        let idx: Vec<usize> = (self.cursor..self.cursor + batch).collect();
        self.cursor += batch;
        idx
    }

    fn batch_tensor(&self, idx: &[usize], degraded: bool) -> Tensor<f32> {
        let (c, s) = (self.cfg.channels, self.cfg.patch_size);
        let mut data = Vec::with_capacity(idx.len() * c * s * s);
        for &i in idx {
            let rec = &self.pool[i];
            let src = if degraded { &rec.degraded } else { &rec.gt };
            data.extend(src.iter().map(|&v| v as f32 / 127.5 - 1.0));
        }
        Tensor::constant(&[idx.len(), c, s, s], data).unwrap()
    }

    /// One optimization step. Returns the logged stats.
    pub fn step(&mut self) -> Result<StepStats> {
        let step = self.history.len();
        let epoch = step / self.iters_per_epoch;
        let idx = self.next_batch();
        let s = self.cfg.patch_size;

        let x = self.batch_tensor(&idx, false);
        let y = self.batch_tensor(&idx, true);
        let z = sample_z(&mut self.rng, idx.len(), s, s)?;
        let xhat = self.f.forward(&y, &z)?;

        let numeric = |what: &str, v: f64| {
            Error::Numeric(format!("non-finite {what} ({v}) at step {}", step + 1))
        };

        let d_loss = if epoch >= 1 {
            let ld = discriminator_loss(&self.d, &x, &xhat)?;
            let v = ld.item()? as f64;
            if !v.is_finite() {
                return Err(numeric("discriminator loss", v));
            }
            self.adam_d.zero_grad();
            ld.backward()?;
            self.adam_d.step();
            Some(v)
        } else {
            None
        };

        let d_for_f = if epoch >= 1 { Some(&self.d) } else { None };
        self.d_params.set_trainable_tracking(false);
        let combined = combined_loss(
            &self.fe,
            d_for_f,
            &xhat,
            &x,
            &idx.iter()
                .map(|&i| self.pool[i].y_dct.as_ref())
                .collect::<Vec<Option<&DctBlockGrid>>>(),
            &self.table,
            &self.cfg.loss_weights(),
        );
        self.d_params.set_trainable_tracking(true);
        let (total, report) = combined?;
        if !report.total.is_finite() {
            return Err(numeric("combined loss", report.total));
        }
        self.adam_f.zero_grad();
        total.backward()?;
        self.adam_f.step();

        let stats = StepStats {
            step,
            epoch,
            report,
            d_loss,
        };
        self.history.push(stats);
        Ok(stats)
    }

    /// Runs to completion and writes checkpoints plus the CSV log.
    pub fn run(&mut self) -> Result<RunArtifacts> {
        let out = self.cfg.out_dir.clone();
        fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
        let log_path = out.join("train_log.csv");
        let mut log = fs::File::create(&log_path)
            .map(std::io::BufWriter::new)
            .map_err(|e| Error::io(&log_path, e))?;
        writeln!(log, "{TRAIN_LOG_HEADER}").map_err(|e| Error::io(&log_path, e))?;

        while self.history.len() < self.total_iters {
            let stats = self.step()?;
            writeln!(log, "{}", stats.csv_row()).map_err(|e| Error::io(&log_path, e))?;
            let done = self.history.len();
            if self.cfg.checkpoint_interval > 0
                && done % self.cfg.checkpoint_interval == 0
                && done < self.total_iters
            {
                let path = out.join(format!("proposal_step{done:05}.o2m"));
                save_checkpoint(&self.f.param_map(), &path)?;
            }
        }
        log.flush().map_err(|e| Error::io(&log_path, e))?;

        let artifacts = RunArtifacts {
            proposal: out.join("proposal.o2m"),
            discriminator: out.join("discriminator.o2m"),
            feature: out.join("feature.o2m"),
            log: log_path,
            steps: self.history.len(),
        };
        save_checkpoint(&self.f.param_map(), &artifacts.proposal)?;
        save_checkpoint(&self.d_params, &artifacts.discriminator)?;
        save_checkpoint(&self.fe.param_map(), &artifacts.feature)?;
        Ok(artifacts)
    }
}
