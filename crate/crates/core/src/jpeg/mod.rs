//! Blockwise JPEG degradation model: quantization tables, 8×8 DCT,
//! quantize–dequantize, the DCT-band range check, and a binary
//! coefficient dump.

mod dct;
mod degrade;
mod dump;
mod quant;

pub use dct::{dct8x8, dct_block, dct_matrix, idct_block};
pub use degrade::{
    dct_range_check, grid_from_pixels, jpeg_degrade, pad_to_blocks, DctBlockGrid, Degraded,
    RangeCheck,
};
pub use dump::{read_dct_dump, write_dct_dump, DctDump, DCT_DUMP_MAGIC};
pub use quant::{quant_table, QuantTable, BASE_LUMA_TABLE};
