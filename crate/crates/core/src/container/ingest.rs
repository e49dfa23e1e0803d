use std::fs;
use std::path::{Path, PathBuf};

use super::{check_dims, AudioTrack, RawVideo};
use crate::{Error, Result};

/// Where frames come from.
#[derive(Debug, Clone)]
pub enum FrameSource {
    /// PGM files, in the given order.
    PgmFiles(Vec<PathBuf>),
    /// Every `*.pgm` in a directory, sorted by file name.
    PgmDir(PathBuf),
    /// Headerless concatenated 8-bit luma planes; needs explicit dims.
    RawLuma(PathBuf),
}

/// Loads frames and optional audio, replacing an external video cutter.
pub fn ingest_raw(
    source: &FrameSource,
    dims: Option<(u16, u16)>,
    fps: (u16, u16),
    audio: Option<&Path>,
) -> Result<(RawVideo, AudioTrack)> {
    let (width, height, frames) = match source {
        FrameSource::RawLuma(path) => {
            let (w, h) = dims.ok_or_else(|| {
                Error::InvalidParam("headerless luma input needs explicit dims".into())
            })?;
            let frames = split_luma(&fs::read(path)?, w as usize, h as usize)?;
            (w, h, frames)
        }
        FrameSource::PgmDir(dir) => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
                .collect();
            paths.sort();
            load_pgms(&paths, dims)?
        }
        FrameSource::PgmFiles(paths) => load_pgms(paths, dims)?,
    };
    let video = RawVideo::new(width, height, fps.0, fps.1, frames)?;
    let track = match audio {
        Some(p) => parse_wav(&fs::read(p)?)?,
        None => AudioTrack::default(),
    };
    Ok((video, track))
}

fn load_pgms(paths: &[PathBuf], dims: Option<(u16, u16)>) -> Result<(u16, u16, Vec<Vec<u8>>)> {
    if paths.is_empty() {
        return Err(Error::InvalidParam("no PGM frames found".into()));
    }
    let mut frames = Vec::with_capacity(paths.len());
    let mut expect = dims.map(|(w, h)| (w as usize, h as usize));
    for p in paths {
        let (w, h, data) = parse_pgm(&fs::read(p)?)?;
        match expect {
            Some(d) if d != (w, h) => {
                return Err(Error::Dimensions(format!(
                    "{} is {w}x{h}, expected {}x{}",
                    p.display(),
                    d.0,
                    d.1
                )))
            }
            _ => expect = Some((w, h)),
        }
        frames.push(data);
    }
    let (w, h) = expect.unwrap();
    check_dims(w, h)?;
    Ok((w as u16, h as u16, frames))
}

/// Splits a headerless luma stream into `width*height` planes.
pub fn split_luma(bytes: &[u8], width: usize, height: usize) -> Result<Vec<Vec<u8>>> {
    check_dims(width, height)?;
    let plane = width * height;
    if !bytes.len().is_multiple_of(plane) {
        return Err(Error::Truncated("luma stream"));
    }
    Ok(bytes.chunks_exact(plane).map(<[u8]>::to_vec).collect())
}

/// Parses a binary (P5) PGM with maxval 255. Returns (width, height, pixels).
pub fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let mut pos = 0;
    let mut fields = [0usize; 3];
    if bytes.get(..2) != Some(b"P5") {
        return Err(Error::Malformed("not a binary PGM (P5)".into()));
    }
    pos += 2;
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::Truncated("PGM header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Malformed("bad PGM header field".into()))?;
    }
    // exactly one whitespace byte before the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Malformed("bad PGM header terminator".into()));
    }
    pos += 1;
    let [w, h, maxval] = fields;
    if maxval != 255 {
        return Err(Error::Malformed(format!("PGM maxval {maxval} unsupported (need 255)")));
    }
    let n = w.checked_mul(h).ok_or_else(|| Error::Malformed("PGM size overflow".into()))?;
    let data = bytes.get(pos..pos + n).ok_or(Error::Truncated("PGM raster"))?;
    Ok((w, h, data.to_vec()))
}

pub fn write_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Parses a RIFF/WAVE file holding 16-bit mono PCM.
pub fn parse_wav(bytes: &[u8]) -> Result<AudioTrack> {
    if bytes.len() < 12 || &bytes[..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::Malformed("not a RIFF/WAVE file".into()));
    }
    let mut pos = 12;
    let mut format: Option<(u16, u16, u32, u16)> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let len = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body = bytes
            .get(pos + 8..(pos + 8).saturating_add(len))
            .ok_or(Error::Truncated("WAV chunk"))?;
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(Error::Truncated("WAV fmt chunk"));
                }
                let u16_at = |i: usize| u16::from_le_bytes([body[i], body[i + 1]]);
                format = Some((
                    u16_at(0),
                    u16_at(2),
                    u32::from_le_bytes(body[4..8].try_into().unwrap()),
                    u16_at(14),
                ));
            }
            b"data" => {
                let (tag, channels, rate, bits) =
                    format.ok_or_else(|| Error::Malformed("WAV data before fmt".into()))?;
                if tag != 1 || channels != 1 || bits != 16 {
                    return Err(Error::AudioLayout(format!(
                        "format {tag}, {channels} channel(s), {bits} bits; need PCM16 mono"
                    )));
                }
                if rate == 0 {
                    return Err(Error::AudioLayout("zero sample rate".into()));
                }
                let samples = body
                    .chunks_exact(2)
                    .map(|c| i16::from_le_bytes([c[0], c[1]]))
                    .collect();
                return Ok(AudioTrack { sample_rate: rate, samples });
            }
            _ => {}
        }
        pos += 8 + len + (len & 1);
    }
    Err(Error::Truncated("WAV without data chunk"))
}

pub fn write_wav(track: &AudioTrack) -> Vec<u8> {
    let data_len = (track.samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&track.sample_rate.to_le_bytes());
    out.extend_from_slice(&(track.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in &track.samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_pgms() {
        let dir = tempfile::tempdir().unwrap();
        for i in 0..16 {
            let px = vec![i as u8; 64 * 64];
            fs::write(dir.path().join(format!("f{i:03}.pgm")), write_pgm(64, 64, &px)).unwrap();
        }
        let (v, a) = ingest_raw(&FrameSource::PgmDir(dir.path().into()), None, (25, 1), None).unwrap();
        assert_eq!(v.frames.len(), 16);
        assert!(v.frames.iter().all(|f| f.len() == 4096));
        assert_eq!(v.frames[5][0], 5);
        assert!(a.samples.is_empty());
    }

    #[test]
    fn pgm_dims_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.pgm"), write_pgm(64, 64, &[0; 4096])).unwrap();
        let err = ingest_raw(&FrameSource::PgmDir(dir.path().into()), Some((32, 32)), (25, 1), None);
        assert!(matches!(err, Err(Error::Dimensions(_))));
    }

    #[test]
    fn pgm_with_comment() {
        let mut b = b"P5\n# made by hand\n16 16\n255\n".to_vec();
        b.extend(vec![9u8; 256]);
        let (w, h, px) = parse_pgm(&b).unwrap();
        assert_eq!((w, h, px.len()), (16, 16, 256));
        assert!(parse_pgm(&b[..b.len() - 1]).is_err());
    }

    #[test]
    fn raw_stream_three_frames() {
        let frames = split_luma(&vec![0u8; 4096 * 3], 64, 64).unwrap();
        assert_eq!(frames.len(), 3);
        assert!(matches!(split_luma(&vec![0u8; 4096 * 3 - 1], 64, 64), Err(Error::Truncated(_))));
    }

    #[test]
    fn stereo_wav_rejected() {
        let mut wav = write_wav(&AudioTrack { sample_rate: 8000, samples: vec![0; 8] });
        wav[22] = 2; // channel count
        let err = parse_wav(&wav).unwrap_err();
        assert!(err.to_string().contains("unsupported audio layout"), "{err}");
    }

    #[test]
    fn wav_round_trip() {
        let t = AudioTrack { sample_rate: 44100, samples: vec![-3, 0, 32767, -32768, 12] };
        assert_eq!(parse_wav(&write_wav(&t)).unwrap(), t);
    }

    #[test]
    fn garbage_never_panics() {
        for n in 0..64 {
            let junk: Vec<u8> = (0..n).map(|i| (i * 37 % 251) as u8).collect();
            let _ = parse_pgm(&junk);
            let _ = parse_wav(&junk);
        }
        let mut riff = b"RIFF\0\0\0\0WAVEfmt \xff\xff\xff\xff".to_vec();
        riff.extend([0; 8]);
        assert!(parse_wav(&riff).is_err());
    }
}
