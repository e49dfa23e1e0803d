//! Orthonormal 8x8 DCT-II and its inverse.
//!
//! Blocks are row-major: index `y*8 + x` for samples, `v*8 + u` for
//! coefficients (v vertical, u horizontal frequency).

use std::sync::OnceLock;

fn basis() -> &'static [[f64; 8]; 8] {
    static BASIS: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut m = [[0.0; 8]; 8];
        for (u, row) in m.iter_mut().enumerate() {
            let c = if u == 0 { (0.125f64).sqrt() } else { 0.5 };
            for (x, v) in row.iter_mut().enumerate() {
                *v = c * ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI / 16.0).cos();
            }
        }
        m
    })
}

/// Forward transform of arbitrary real samples (no level shift).
pub fn fdct(samples: &[f64; 64]) -> [f64; 64] {
    let b = basis();
    let mut tmp = [0.0; 64];
    for y in 0..8 {
        for u in 0..8 {
            tmp[y * 8 + u] = (0..8).map(|x| b[u][x] * samples[y * 8 + x]).sum();
        }
    }
    let mut out = [0.0; 64];
    for v in 0..8 {
        for u in 0..8 {
            out[v * 8 + u] = (0..8).map(|y| b[v][y] * tmp[y * 8 + u]).sum();
        }
    }
    out
}

/// Inverse transform to real samples (no level shift, no rounding).
pub fn idct(coeffs: &[f64; 64]) -> [f64; 64] {
    let b = basis();
    let mut tmp = [0.0; 64];
    for v in 0..8 {
        for x in 0..8 {
            tmp[v * 8 + x] = (0..8).map(|u| b[u][x] * coeffs[v * 8 + u]).sum();
        }
    }
    let mut out = [0.0; 64];
    for y in 0..8 {
        for x in 0..8 {
            out[y * 8 + x] = (0..8).map(|v| b[v][y] * tmp[v * 8 + x]).sum();
        }
    }
    out
}

/// Rounds half away from zero and clamps to a pixel.
pub fn to_pixel(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// DCT of `pixel - 128`.
pub fn dct8x8_forward(pixels: &[u8; 64]) -> [f64; 64] {
    let mut s = [0.0; 64];
    for (d, &p) in s.iter_mut().zip(pixels) {
        *d = p as f64 - 128.0;
    }
    fdct(&s)
}

/// Inverse DCT, `+128`, rounded and clamped.
pub fn dct8x8_inverse(coeffs: &[f64; 64]) -> [u8; 64] {
    let r = idct(coeffs);
    let mut out = [0u8; 64];
    for (o, v) in out.iter_mut().zip(r) {
        *o = to_pixel(v + 128.0);
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_128_is_zero() {
        assert!(dct8x8_forward(&[128; 64]).iter().all(|c| c.abs() < 1e-12));
        assert_eq!(dct8x8_inverse(&[0.0; 64]), [128; 64]);
    }

    #[test]
    fn flat_255_dc() {
        let c = dct8x8_forward(&[255; 64]);
        assert!((c[0] - 1016.0).abs() < 1e-9);
        assert!(c[1..].iter().all(|c| c.abs() < 1e-9));
        let mut coef = [0.0; 64];
        coef[0] = 1016.0;
        assert_eq!(dct8x8_inverse(&coef), [255; 64]);
    }

    #[test]
    fn matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let px: [u8; 64] = std::array::from_fn(|_| rng.gen());
            let shifted: [f64; 64] = std::array::from_fn(|i| px[i] as f64 - 128.0);
            let ours = dct8x8_forward(&px);
            let reference = oracle::forward(&shifted);
            for (a, b) in ours.iter().zip(reference) {
                assert!((a - b).abs() < 1e-6);
            }
            let coef: [f64; 64] = std::array::from_fn(|_| rng.gen_range(-300.0..300.0));
            let reference: [u8; 64] = oracle::inverse(&coef).map(|v| to_pixel(v + 128.0));
            assert_eq!(dct8x8_inverse(&coef), reference);
        }
    }

    #[test]
    fn round_trip_within_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let px: [u8; 64] = std::array::from_fn(|_| rng.gen());
            let back = dct8x8_inverse(&dct8x8_forward(&px));
            assert!(px.iter().zip(back).all(|(a, b)| (*a as i32 - b as i32).abs() <= 1));
        }
    }

    #[test]
    fn energy_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let px: [u8; 64] = std::array::from_fn(|_| rng.gen());
            let e_px: f64 = px.iter().map(|&p| (p as f64 - 128.0).powi(2)).sum();
            let e_c: f64 = dct8x8_forward(&px).iter().map(|c| c * c).sum();
            assert!((e_px - e_c).abs() <= 1e-6 * e_px.max(1.0));
        }
    }
}
