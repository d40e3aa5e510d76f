//! Pretrains the small classifier whose trunk serves as the fixed
//! feature extractor for the perceptual loss. The task — telling
//! smooth synthetic images from textured ones — is easy on purpose;
//! what matters is that the trunk learns non-degenerate features.

use crate::data::{synth_labeled, Image};
use crate::error::{Error, Result};
use crate::net::FeatureNet;
use crate::rng::Rng;
use crate::tensor::{Adam, Tensor};

const IMAGE_SIZE: usize = 64;
const CORPUS: usize = 60;
const HOLDOUT: usize = 12;
const BATCH: usize = 8;

fn image_tensor(images: &[(Image, usize)], idx: &[usize], channels: usize) -> Tensor<f32> {
    let hw = IMAGE_SIZE * IMAGE_SIZE;
    let mut data = Vec::with_capacity(idx.len() * channels * hw);
    for &i in idx {
        let gray = images[i].0.to_model_range();
        for _ in 0..channels {
            data.extend_from_slice(&gray);
        }
    }
    Tensor::constant(&[idx.len(), channels, IMAGE_SIZE, IMAGE_SIZE], data).unwrap()
}

fn accuracy(net: &FeatureNet<f32>, images: &[(Image, usize)], idx: &[usize], channels: usize) -> Result<f64> {
    let logits = net.logits(&image_tensor(images, idx, channels))?;
    let data = logits.to_vec();
    let classes = net.classes();
    let mut hits = 0;
    for (row, &i) in idx.iter().enumerate() {
        let scores = &data[row * classes..][..classes];
        let pred = scores
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap();
        if pred == images[i].1 {
            hits += 1;
        }
    }
    Ok(hits as f64 / idx.len() as f64)
}

/// Trains the classifier on the bundled two-class corpus and returns
/// it with its held-out accuracy.
pub fn train_feature_extractor(
    channels: usize,
    seed: u64,
    steps: usize,
) -> Result<(FeatureNet<f32>, f64)> {
    let images = synth_labeled(seed ^ 0x666561, CORPUS, IMAGE_SIZE, IMAGE_SIZE);
    let train: Vec<usize> = (0..CORPUS - HOLDOUT).collect();
    let holdout: Vec<usize> = (CORPUS - HOLDOUT..CORPUS).collect();

    let mut rng = Rng::seed_from(seed);
    let net = FeatureNet::<f32>::new(&mut rng, channels, 2)?;
    let mut adam = Adam::new(net.param_map().trainable_tensors(), 1e-3, 0.9);
    for step in 0..steps {
        let idx: Vec<usize> = (0..BATCH).map(|_| train[rng.below(train.len())]).collect();
        let labels: Vec<usize> = idx.iter().map(|&i| images[i].1).collect();
        let x = image_tensor(&images, &idx, channels);
        let loss = net.logits(&x)?.softmax_cross_entropy(&labels)?;
        let value = loss.item()?;
        if !value.is_finite() {
            return Err(Error::Numeric(format!(
                "feature training diverged at step {step}: loss {value}"
            )));
        }
        adam.zero_grad();
        loss.backward()?;
        adam.step();
    }
    let acc = accuracy(&net, &images, &holdout, channels)?;
    Ok((net, acc))
}
