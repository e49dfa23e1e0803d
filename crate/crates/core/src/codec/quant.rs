//! Uniform quantization with step `2*qp` and zigzag scan.

use crate::{Error, Result};

/// `ZIGZAG[k]` is the raster index of the k-th coefficient in scan order.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27,
    20, 13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58,
    59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];

pub const MAX_LEVEL: i32 = 2047;

/// 64 quantized levels in zigzag order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantBlock {
    pub levels: [i32; 64],
}

impl Default for QuantBlock {
    fn default() -> Self {
        Self { levels: [0; 64] }
    }
}

impl QuantBlock {
    pub fn dc(&self) -> i32 {
        self.levels[0]
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(|&l| l == 0)
    }
}

pub fn check_qp(qp: u8) -> Result<()> {
    if (1..=31).contains(&qp) {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("qp {qp} outside 1..=31")))
    }
}

/// `level = round(coeff / 2qp)`, half away from zero, stored in zigzag order.
pub fn quantize_block(coeffs: &[f64; 64], qp: u8) -> Result<QuantBlock> {
    check_qp(qp)?;
    let step = 2.0 * qp as f64;
    let mut levels = [0i32; 64];
    for (k, &raster) in ZIGZAG.iter().enumerate() {
        let l = (coeffs[raster] / step).round();
        if l.abs() > MAX_LEVEL as f64 {
            return Err(Error::LevelOverflow(l as i32));
        }
        levels[k] = l as i32;
    }
    Ok(QuantBlock { levels })
}

/// Inverse of [`quantize_block`]: raster-order coefficients `level * 2qp`.
///
/// Accepts any level magnitude, so rewritten streams still reconstruct.
pub fn dequantize_block(block: &QuantBlock, qp: u8) -> [f64; 64] {
    let step = 2.0 * qp as f64;
    let mut out = [0.0; 64];
    for (k, &raster) in ZIGZAG.iter().enumerate() {
        out[raster] = block.levels[k] as f64 * step;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at_dc(v: f64) -> [f64; 64] {
        let mut c = [0.0; 64];
        c[0] = v;
        c
    }

    #[test]
    fn zigzag_is_a_permutation() {
        let mut seen = [false; 64];
        ZIGZAG.iter().for_each(|&i| seen[i] = true);
        assert!(seen.iter().all(|&s| s));
        assert_eq!(ZIGZAG[63], 63);
    }

    #[test]
    fn examples() {
        assert!(quantize_block(&[0.0; 64], 17).unwrap().is_zero());
        let q = quantize_block(&at_dc(1016.0), 1).unwrap();
        assert_eq!(q.dc(), 508);
        assert_eq!(dequantize_block(&q, 1)[0], 1016.0);
        let q = quantize_block(&at_dc(10.4), 2).unwrap();
        assert_eq!(q.dc(), 3);
        assert_eq!(dequantize_block(&q, 2)[0], 12.0);
    }

    #[test]
    fn half_away_from_zero() {
        assert_eq!(quantize_block(&at_dc(6.0), 2).unwrap().dc(), 2);
        assert_eq!(quantize_block(&at_dc(-6.0), 2).unwrap().dc(), -2);
    }

    #[test]
    fn zigzag_placement() {
        let mut c = [0.0; 64];
        c[8] = 40.0; // (v=1, u=0) is scan position 2
        let q = quantize_block(&c, 1).unwrap();
        assert_eq!(q.levels[2], 20);
        assert_eq!(dequantize_block(&q, 1), c);
    }

    #[test]
    fn overflow_and_bad_qp() {
        assert!(matches!(quantize_block(&at_dc(1e5), 1), Err(Error::LevelOverflow(_))));
        assert!(quantize_block(&[0.0; 64], 0).is_err());
        assert!(quantize_block(&[0.0; 64], 32).is_err());
    }
}
