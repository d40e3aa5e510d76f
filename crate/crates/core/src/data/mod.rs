//! Image ingestion, color conversion, patch extraction, and synthetic
//! corpora.

mod image;
mod patches;
mod synth;

pub use image::Image;
pub use patches::{extract_patches, patch_grid, PatchRecord};
pub use synth::{synth_corpus, synth_image, synth_labeled, SynthClass};

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Ground-truth PNGs under `<root>/gt/`, sorted by file name for
/// deterministic traversal.
pub fn dataset_gt_paths(root: &Path) -> Result<Vec<PathBuf>> {
    let dir = root.join("gt");
    let entries = std::fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "png"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Invalid(format!(
            "no ground-truth PNGs under {}",
            dir.display()
        )));
    }
    Ok(paths)
}

/// Cache directory for images degraded at a given quality.
pub fn degraded_cache_dir(root: &Path, quality: u8) -> PathBuf {
    root.join(format!("q{quality:02}"))
}
