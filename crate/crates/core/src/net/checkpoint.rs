//! Flat binary checkpoint format: `O2MN` magic, format version, then a
//! count-prefixed list of named tensors (name, dims, little-endian f32
//! data). Loading is strict — every stored name must exist in the
//! target map with the same shape, and every map entry must be stored.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::ParamMap;
use crate::tensor::Real;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"O2MN";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn save_checkpoint<T: Real>(map: &ParamMap<T>, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(map.entries().len() as u32).to_le_bytes());
    for (name, tensor, _) in map.entries() {
        buf.extend_from_slice(&(name.len() as u32).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        let shape = tensor.shape();
        buf.extend_from_slice(&(shape.len() as u32).to_le_bytes());
        for d in &shape {
            buf.extend_from_slice(&(*d as u32).to_le_bytes());
        }
        for v in tensor.data().iter() {
            buf.extend_from_slice(&(Real::to_f64(*v) as f32).to_le_bytes());
        }
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&buf).map_err(|e| Error::io(path, e))?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Format(format!(
                "{}: truncated at byte {}",
                self.path.display(),
                self.pos
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn take_u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }
}

/// Raw entries as stored, in file order.
pub fn read_checkpoint(path: &Path) -> Result<Vec<(String, Vec<usize>, Vec<f32>)>> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let bad = |msg: &str| Error::Format(format!("{}: {msg}", path.display()));
    let mut r = Reader {
        bytes: &bytes,
        pos: 0,
        path,
    };

    if r.take(4)? != CHECKPOINT_MAGIC {
        return Err(bad("not a checkpoint (bad magic)"));
    }
    let version = r.take_u32()?;
    if version != CHECKPOINT_VERSION as usize {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let count = r.take_u32()?;
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let name_len = r.take_u32()?;
        let name = String::from_utf8(r.take(name_len)?.to_vec())
            .map_err(|_| bad("tensor name is not UTF-8"))?;
        let rank = r.take_u32()?;
        let mut dims = Vec::with_capacity(rank);
        for _ in 0..rank {
            dims.push(r.take_u32()?);
        }
        let numel: usize = dims.iter().product();
        let data: Vec<f32> = r
            .take(4 * numel)?
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        entries.push((name, dims, data));
    }
    if r.pos != bytes.len() {
        return Err(bad("trailing bytes after last tensor"));
    }
    Ok(entries)
}

/// Copies stored values into the map's tensors in place.
pub fn load_checkpoint_into<T: Real>(map: &ParamMap<T>, path: &Path) -> Result<()> {
    let stored = read_checkpoint(path)?;
    let bad = |msg: String| Error::Format(format!("{}: {msg}", path.display()));
    let mut by_name: BTreeMap<&str, (&[usize], &[f32])> = BTreeMap::new();
    for (name, dims, data) in &stored {
        by_name.insert(name, (dims, data));
    }
    if by_name.len() != stored.len() {
        return Err(bad("duplicate tensor name".into()));
    }
    for (name, tensor, _) in map.entries() {
        let (dims, data) = by_name
            .remove(name.as_str())
            .ok_or_else(|| bad(format!("missing tensor `{name}`")))?;
        if dims != tensor.shape().as_slice() {
            return Err(bad(format!(
                "shape mismatch for `{name}`: stored {dims:?}, expected {:?}",
                tensor.shape()
            )));
        }
        let vals: Vec<T> = data.iter().map(|&v| T::from_f64(v as f64)).collect();
        tensor.set_data(&vals)?;
    }
    if let Some(name) = by_name.keys().next() {
        return Err(bad(format!("unknown tensor `{name}`")));
    }
    Ok(())
}

/// Reads the restoration-net channel count off the stored shape of the
/// final deconvolution weight [64, channels, 4, 4].
pub fn checkpoint_channels(path: &Path) -> Result<usize> {
    for (name, dims, _) in read_checkpoint(path)? {
        if name == "up.weight" {
            if dims.len() != 4 {
                return Err(Error::Format(format!(
                    "{}: up.weight has rank {}",
                    path.display(),
                    dims.len()
                )));
            }
            return Ok(dims[1]);
        }
    }
    Err(Error::Format(format!(
        "{}: no up.weight entry; not a restoration checkpoint",
        path.display()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Linear;
    use crate::rng::Rng;
    use crate::tensor::Tensor;

    fn temp_path(tag: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("o2m-ckpt-{tag}-{}.bin", std::process::id()));
        p
    }

    fn sample_map(seed: u64) -> ParamMap<f32> {
        let mut rng = Rng::seed_from(seed);
        let mut map = ParamMap::new();
        Linear::<f32>::new(&mut rng, 3, 2).unwrap().register("head", &mut map);
        let extra: Vec<f32> = (0..8).map(|i| i as f32 * 0.5 - 1.0).collect();
        map.add(
            "stats.running_mean".into(),
            Tensor::constant(&[2, 4], extra).unwrap(),
            false,
        );
        map
    }

    #[test]
    fn roundtrip_is_bitwise_exact() {
        let map = sample_map(1);
        let path = temp_path("roundtrip");
        save_checkpoint(&map, &path).unwrap();

        let fresh = sample_map(2);
        let differs = map
            .entries()
            .iter()
            .zip(fresh.entries())
            .any(|((_, a, _), (_, b, _))| a.to_vec() != b.to_vec());
        assert!(differs, "fresh seed should give different weights");
        load_checkpoint_into(&fresh, &path).unwrap();
        for ((_, a, _), (_, b, _)) in map.entries().iter().zip(fresh.entries()) {
            assert_eq!(a.to_vec(), b.to_vec());
        }
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn corrupt_magic_is_reported() {
        let path = temp_path("magic");
        std::fs::write(&path, b"XXXX rest does not matter").unwrap();
        let err = read_checkpoint(&path).unwrap_err().to_string();
        assert!(err.contains("magic"), "{err}");
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn missing_and_unknown_tensors_are_errors() {
        let map = sample_map(3);
        let path = temp_path("strict");
        save_checkpoint(&map, &path).unwrap();

        let mut smaller = ParamMap::<f32>::new();
        smaller.add(
            "head.weight".into(),
            map.get("head.weight").unwrap().clone(),
            true,
        );
        let err = load_checkpoint_into(&smaller, &path).unwrap_err().to_string();
        assert!(err.contains("unknown tensor"), "{err}");

        let mut bigger = sample_map(4);
        bigger.add("extra.bias".into(), Tensor::zeros(&[2]), true);
        let err = load_checkpoint_into(&bigger, &path).unwrap_err().to_string();
        assert!(err.contains("missing tensor `extra.bias`"), "{err}");
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let map = sample_map(5);
        let path = temp_path("shape");
        save_checkpoint(&map, &path).unwrap();
        let mut other = ParamMap::<f32>::new();
        other.add("head.weight".into(), Tensor::zeros(&[2, 3]), true);
        other.add("head.bias".into(), Tensor::zeros(&[2]), true);
        other.add("stats.running_mean".into(), Tensor::zeros(&[2, 4]), false);
        let err = load_checkpoint_into(&other, &path).unwrap_err().to_string();
        assert!(err.contains("shape mismatch for `head.weight`"), "{err}");
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn truncated_file_is_an_error() {
        let map = sample_map(6);
        let path = temp_path("trunc");
        save_checkpoint(&map, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
        let err = read_checkpoint(&path).unwrap_err().to_string();
        assert!(err.contains("truncated"), "{err}");
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn channel_detection_reads_deconv_shape() {
        use crate::net::ProposalNet;
        let mut rng = Rng::seed_from(7);
        let net = ProposalNet::<f32>::with_units(&mut rng, 3, 1, 1).unwrap();
        let path = temp_path("channels");
        save_checkpoint(&net.param_map(), &path).unwrap();
        assert_eq!(checkpoint_channels(&path).unwrap(), 3);
        std::fs::remove_file(&path).unwrap();
    }
}
