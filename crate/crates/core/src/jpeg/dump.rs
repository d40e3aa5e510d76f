//! Binary dump of a coefficient grid.
//!
//! Layout: 8-byte magic `O2MDCT1\0`, then six u32 little-endian header
//! words (image h, image w, blocks_y, blocks_x, channels, quality),
//! then blocks_y·blocks_x·channels·64 f32 little-endian coefficients in
//! grid order `[c][by][bx][64]`.

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::degrade::DctBlockGrid;

pub const DCT_DUMP_MAGIC: [u8; 8] = *b"O2MDCT1\0";

#[derive(Debug, Clone)]
pub struct DctDump {
    pub grid: DctBlockGrid,
    pub height: u32,
    pub width: u32,
    pub quality: u32,
}

pub fn write_dct_dump(
    out: &mut impl Write,
    grid: &DctBlockGrid,
    height: u32,
    width: u32,
    quality: u32,
) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Format(format!("dct dump write failed: {e}"));
    out.write_all(&DCT_DUMP_MAGIC).map_err(io_err)?;
    for v in [
        height,
        width,
        grid.blocks_y as u32,
        grid.blocks_x as u32,
        grid.channels as u32,
        quality,
    ] {
        out.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    for &c in grid.coeffs() {
        out.write_all(&c.to_le_bytes()).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_dct_dump(input: &mut impl Read) -> Result<DctDump> {
    let mut magic = [0u8; 8];
    input
        .read_exact(&mut magic)
        .map_err(|e| Error::Format(format!("dct dump header unreadable: {e}")))?;
    if magic != DCT_DUMP_MAGIC {
        return Err(Error::Format(format!(
            "not a dct dump (magic {:02x?})",
            &magic
        )));
    }
    let mut word = [0u8; 4];
    let mut header = [0u32; 6];
    for h in header.iter_mut() {
        input
            .read_exact(&mut word)
            .map_err(|e| Error::Format(format!("dct dump header truncated: {e}")))?;
        *h = u32::from_le_bytes(word);
    }
    let [height, width, blocks_y, blocks_x, channels, quality] = header;
    let count = blocks_y as usize * blocks_x as usize * channels as usize * 64;
    let mut coeffs = Vec::with_capacity(count);
    for _ in 0..count {
        input
            .read_exact(&mut word)
            .map_err(|e| Error::Format(format!("dct dump payload truncated: {e}")))?;
        coeffs.push(f32::from_le_bytes(word));
    }
    Ok(DctDump {
        grid: DctBlockGrid::new(blocks_y as usize, blocks_x as usize, channels as usize, coeffs)?,
        height,
        width,
        quality,
    })
}
