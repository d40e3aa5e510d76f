//! Python bindings: images, the block codec, quality metrics, and
//! checkpointed restorers. Builds as the extension module `o2m`.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use o2m_core::data::{synth_corpus, Image as CoreImage};
use o2m_core::error::TensorError;
use o2m_core::jpeg::{jpeg_degrade, quant_table};
use o2m_core::metrics;
use o2m_core::net::{checkpoint_channels, load_checkpoint_into, ProposalNet};
use o2m_core::rng::Rng;
use o2m_core::train::{gradient_suite, restore_image};
use o2m_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } | Error::Image { .. } => PyIOError::new_err(e.to_string()),
        Error::Numeric(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn tensor_to_py(e: TensorError) -> PyErr {
    to_py(Error::Tensor(e))
}

/// 8-bit grayscale or RGB image, row-major, interleaved channels.
#[pyclass(name = "Image", skip_from_py_object)]
#[derive(Clone)]
struct PyImage(CoreImage);

#[pymethods]
impl PyImage {
    #[new]
    fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> PyResult<Self> {
        Ok(PyImage(
            CoreImage::new(width, height, channels, data).map_err(to_py)?,
        ))
    }

    /// Reads a PNG from disk.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyImage(CoreImage::load(&path).map_err(to_py)?))
    }

    /// Writes the image as PNG.
    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.0.save(&path).map_err(to_py)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    #[getter]
    fn channels(&self) -> usize {
        self.0.channels()
    }

    /// Raw pixel bytes, row-major.
    fn tobytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, self.0.data())
    }

    fn __repr__(&self) -> String {
        format!(
            "Image({}x{}, {} channel{})",
            self.0.width(),
            self.0.height(),
            self.0.channels(),
            if self.0.channels() == 1 { "" } else { "s" }
        )
    }
}

/// Encode–decode round trip through the block codec at the given
/// quality. Returns the decoded image.
#[pyfunction]
fn degrade(image: &PyImage, quality: u8) -> PyResult<PyImage> {
    Ok(PyImage(jpeg_degrade(&image.0, quality).map_err(to_py)?.image))
}

/// The 64 luma quantization divisors for a quality factor, row-major.
#[pyfunction(name = "quant_table")]
fn quant_table_py(quality: u8) -> PyResult<Vec<u16>> {
    Ok(quant_table(quality).map_err(to_py)?.q.to_vec())
}

/// Peak signal-to-noise ratio in dB, capped at 99.
#[pyfunction]
fn psnr(reference: &PyImage, test: &PyImage) -> PyResult<f64> {
    metrics::psnr(&reference.0, &test.0).map_err(to_py)
}

/// Mean structural similarity over 8×8 windows.
#[pyfunction]
fn ssim(reference: &PyImage, test: &PyImage) -> PyResult<f64> {
    metrics::ssim(&reference.0, &test.0).map_err(to_py)
}

/// Blocking-aware PSNR; equals `psnr` when the test image shows no
/// block-boundary excess.
#[pyfunction]
fn psnr_b(reference: &PyImage, test: &PyImage) -> PyResult<f64> {
    metrics::psnr_b(&reference.0, &test.0).map_err(to_py)
}

/// Deterministic synthetic grayscale corpus (smooth and textured).
#[pyfunction(name = "synth_corpus")]
fn synth_corpus_py(seed: u64, count: usize, width: usize, height: usize) -> Vec<PyImage> {
    synth_corpus(seed, count, width, height)
        .into_iter()
        .map(PyImage)
        .collect()
}

/// Finite-difference check of every layer and loss; returns
/// `(name, max_rel_err, passed)` rows.
#[pyfunction(name = "gradient_suite")]
fn gradient_suite_py() -> PyResult<Vec<(String, f64, bool)>> {
    Ok(gradient_suite()
        .map_err(to_py)?
        .into_iter()
        .map(|e| (e.name.to_string(), e.max_rel_err, e.passed()))
        .collect())
}

/// A trained restoration network loaded from a checkpoint. Each call
/// to `restore` decodes the requested number of latent samples.
#[pyclass(unsendable)]
struct Restorer {
    net: ProposalNet<f32>,
}

#[pymethods]
impl Restorer {
    #[new]
    fn new(ckpt: PathBuf) -> PyResult<Self> {
        let channels = checkpoint_channels(&ckpt).map_err(to_py)?;
        let mut rng = Rng::seed_from(0);
        let net = ProposalNet::<f32>::new(&mut rng, channels).map_err(tensor_to_py)?;
        load_checkpoint_into(&net.param_map(), &ckpt).map_err(to_py)?;
        Ok(Restorer { net })
    }

    /// One restored image per latent draw; the same seed reproduces
    /// the same outputs.
    #[pyo3(signature = (image, samples = 1, seed = 0))]
    fn restore(&self, image: &PyImage, samples: usize, seed: u64) -> PyResult<Vec<PyImage>> {
        Ok(restore_image(&self.net, &image.0, samples, seed)
            .map_err(to_py)?
            .into_iter()
            .map(PyImage)
            .collect())
    }
}

#[pymodule]
fn o2m(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyImage>()?;
    m.add_class::<Restorer>()?;
    m.add_function(wrap_pyfunction!(degrade, m)?)?;
    m.add_function(wrap_pyfunction!(quant_table_py, m)?)?;
    m.add_function(wrap_pyfunction!(psnr, m)?)?;
    m.add_function(wrap_pyfunction!(ssim, m)?)?;
    m.add_function(wrap_pyfunction!(psnr_b, m)?)?;
    m.add_function(wrap_pyfunction!(synth_corpus_py, m)?)?;
    m.add_function(wrap_pyfunction!(gradient_suite_py, m)?)?;
    Ok(())
}
