use crate::codec::{encode_svc, Dims};
use crate::container::{AudioTrack, RawVideo, SvcFile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) fn textured(dims: Dims, seed: u64, shift: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dims.area())
        .map(|i| {
            let (x, y) = ((i % dims.width + shift) as f64, (i / dims.width) as f64);
            let v = 128.0 + 60.0 * (x / 7.0).sin() * (y / 11.0).cos() + 30.0 * ((x + y) / 5.0).sin();
            (v + rng.gen_range(-4.0..4.0)).clamp(0.0, 255.0) as u8
        })
        .collect()
}

/// Panning textured clip.
pub(crate) fn clip(width: u16, height: u16, frames: usize, seed: u64) -> RawVideo {
    let dims = Dims::new(width as usize, height as usize);
    let frames = (0..frames).map(|t| textured(dims, seed + t as u64, 2 * t)).collect();
    RawVideo::new(width, height, 25, 1, frames).unwrap()
}

pub(crate) fn tone(samples: usize) -> AudioTrack {
    let samples = (0..samples).map(|i| ((i as f64 * 0.05).sin() * 8000.0) as i16).collect();
    AudioTrack { sample_rate: 8000, samples }
}

pub(crate) fn dct_file(frames: usize) -> SvcFile {
    encode_svc(&clip(48, 32, frames, 11), &tone(frames * 320), 4, 4).unwrap()
}

pub(crate) fn raw_file(frames: usize) -> SvcFile {
    SvcFile::from_raw(&clip(32, 32, frames, 5), &tone(frames * 320))
}
