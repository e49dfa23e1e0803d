//! Integer-pel full-search block matching.

use super::Dims;

pub const DEFAULT_SEARCH_RADIUS: i32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct MotionVector {
    pub dx: i32,
    pub dy: i32,
}

/// Reference sample with coordinates clamped to the frame.
#[inline]
pub fn ref_pixel(reference: &[u8], dims: Dims, x: i64, y: i64) -> u8 {
    let x = x.clamp(0, dims.width as i64 - 1) as usize;
    let y = y.clamp(0, dims.height as i64 - 1) as usize;
    reference[y * dims.width + x]
}

/// Motion-compensated 16x16 prediction for the macroblock at `(ox, oy)`.
pub fn predict_16x16(reference: &[u8], dims: Dims, ox: usize, oy: usize, mv: MotionVector) -> [u8; 256] {
    let mut out = [0u8; 256];
    for y in 0..16 {
        for x in 0..16 {
            out[y * 16 + x] = ref_pixel(
                reference,
                dims,
                (ox + x) as i64 + mv.dx as i64,
                (oy + y) as i64 + mv.dy as i64,
            );
        }
    }
    out
}

pub fn sad_16x16(current: &[u8], reference: &[u8], dims: Dims, ox: usize, oy: usize, mv: MotionVector) -> u32 {
    let inside = ox as i64 + mv.dx as i64 >= 0
        && oy as i64 + mv.dy as i64 >= 0
        && ox as i64 + mv.dx as i64 + 16 <= dims.width as i64
        && oy as i64 + mv.dy as i64 + 16 <= dims.height as i64;
    let mut sad = 0u32;
    if inside {
        let rx = (ox as i64 + mv.dx as i64) as usize;
        let ry = (oy as i64 + mv.dy as i64) as usize;
        for y in 0..16 {
            let c = &current[(oy + y) * dims.width + ox..][..16];
            let r = &reference[(ry + y) * dims.width + rx..][..16];
            sad += c.iter().zip(r).map(|(&a, &b)| a.abs_diff(b) as u32).sum::<u32>();
        }
    } else {
        for y in 0..16 {
            for x in 0..16 {
                let a = current[(oy + y) * dims.width + ox + x];
                let b = ref_pixel(
                    reference,
                    dims,
                    (ox + x) as i64 + mv.dx as i64,
                    (oy + y) as i64 + mv.dy as i64,
                );
                sad += a.abs_diff(b) as u32;
            }
        }
    }
    sad
}

/// Full search over `[-radius, radius]^2`. Minimizes SAD, then `|dx|+|dy|`,
/// then `dy`, then `dx`.
pub fn motion_search(
    current: &[u8],
    reference: &[u8],
    dims: Dims,
    ox: usize,
    oy: usize,
    radius: i32,
) -> (MotionVector, u32) {
    let mut best = (u32::MAX, i32::MAX, i32::MAX, i32::MAX);
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            let mv = MotionVector { dx, dy };
            let key = (sad_16x16(current, reference, dims, ox, oy, mv), dx.abs() + dy.abs(), dy, dx);
            if key < best {
                best = key;
            }
        }
    }
    (MotionVector { dx: best.3, dy: best.2 }, best.0)
}
