//! Baseline luminance quantization table and its quality scaling.

use crate::error::{Error, Result};

/// Annex-K luminance table (the quality-50 baseline).
pub const BASE_LUMA_TABLE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// 8×8 divisor matrix in row-major order, entries in [1, 255].
#[derive(Clone, PartialEq, Eq)]
pub struct QuantTable {
    pub q: [u16; 64],
    pub quality: u8,
}

impl std::fmt::Debug for QuantTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "QuantTable(quality={}, DC={})", self.quality, self.q[0])
    }
}

/// Scales the baseline table with the standard quality rule:
/// scale = 5000/q below 50, else 200 − 2q;
/// entry = clamp(floor((base·scale + 50)/100), 1, 255).
pub fn quant_table(quality: u8) -> Result<QuantTable> {
    if !(1..=100).contains(&quality) {
        return Err(Error::Invalid(format!(
            "quality must be in 1..=100, got {quality}"
        )));
    }
    let scale: u32 = if quality < 50 {
        5000 / quality as u32
    } else {
        200 - 2 * quality as u32
    };
    let mut q = [0u16; 64];
    for (entry, &base) in q.iter_mut().zip(&BASE_LUMA_TABLE) {
        *entry = ((base as u32 * scale + 50) / 100).clamp(1, 255) as u16;
    }
    Ok(QuantTable { q, quality })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quality_50_is_the_baseline() {
        assert_eq!(quant_table(50).unwrap().q, BASE_LUMA_TABLE);
    }

    #[test]
    fn quality_100_is_all_ones() {
        assert!(quant_table(100).unwrap().q.iter().all(|&v| v == 1));
    }

    #[test]
    fn frozen_reference_rows() {
        // Tables dumped from libjpeg via Pillow at each quality.
        let q5 = quant_table(5).unwrap().q;
        assert_eq!(
            q5,
            [
                160, 110, 100, 160, 240, 255, 255, 255, //
                120, 120, 140, 190, 255, 255, 255, 255, //
                140, 130, 160, 240, 255, 255, 255, 255, //
                140, 170, 220, 255, 255, 255, 255, 255, //
                180, 220, 255, 255, 255, 255, 255, 255, //
                240, 255, 255, 255, 255, 255, 255, 255, //
                255, 255, 255, 255, 255, 255, 255, 255, //
                255, 255, 255, 255, 255, 255, 255, 255,
            ]
        );
        assert_eq!(quant_table(10).unwrap().q[..8], [80, 55, 50, 80, 120, 200, 255, 255]);
        assert_eq!(quant_table(20).unwrap().q[..8], [40, 28, 25, 40, 60, 100, 128, 153]);
        assert_eq!(quant_table(95).unwrap().q[..8], [2, 1, 1, 2, 2, 4, 5, 6]);
    }

    #[test]
    fn entries_stay_in_range_for_all_qualities() {
        for q in 1..=100u8 {
            let t = quant_table(q).unwrap();
            assert!(t.q.iter().all(|&v| (1..=255).contains(&v)), "quality {q}");
        }
    }

    #[test]
    fn out_of_range_quality_is_rejected() {
        assert!(quant_table(0).is_err());
        assert!(quant_table(101).is_err());
    }
}
