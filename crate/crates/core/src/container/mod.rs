//! The SVC frame container, raw-media ingestion and per-frame audio.
//!
//! An SVC file is a fixed header, an index table with one entry per frame,
//! and the payloads. Each record pairs a frame's video payload with the PCM
//! covering that frame's time span, so reordering records moves picture and
//! sound together.

mod audio;
mod ingest;
mod svc;

pub use audio::partition_audio;
pub use ingest::{
    ingest_raw, parse_pgm, parse_wav, split_luma, write_pgm, write_wav, FrameSource,
};
pub use svc::{parse_svc, serialize_svc, FIXED_HEADER_LEN, FLAG_ENCRYPTED, INDEX_ENTRY_LEN, MAGIC, VERSION};

use crate::{Error, Result};

/// Uncompressed planar 8-bit luma video.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawVideo {
    pub width: u16,
    pub height: u16,
    pub fps_num: u16,
    pub fps_den: u16,
    pub frames: Vec<Vec<u8>>,
}

impl RawVideo {
    pub fn new(width: u16, height: u16, fps_num: u16, fps_den: u16, frames: Vec<Vec<u8>>) -> Result<Self> {
        check_dims(width as usize, height as usize)?;
        if fps_den == 0 || fps_num == 0 {
            return Err(Error::InvalidParam(format!("frame rate {fps_num}/{fps_den}")));
        }
        let plane = width as usize * height as usize;
        if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| f.len() != plane) {
            return Err(Error::Dimensions(format!(
                "frame {i} has {} bytes, expected {plane}",
                f.len()
            )));
        }
        Ok(Self { width, height, fps_num, fps_den, frames })
    }

    pub fn frame_len(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

pub(crate) fn check_dims(width: usize, height: usize) -> Result<()> {
    if width < 16 || height < 16 || !width.is_multiple_of(16) || !height.is_multiple_of(16) {
        return Err(Error::Dimensions(format!(
            "{width}x{height} is not a positive multiple of 16"
        )));
    }
    Ok(())
}

/// Signed 16-bit mono PCM. An empty track means video-only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AudioTrack {
    pub sample_rate: u32,
    pub samples: Vec<i16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum CodecId {
    Raw = 0,
    Dct = 1,
}

impl TryFrom<u8> for CodecId {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(CodecId::Raw),
            1 => Ok(CodecId::Dct),
            _ => Err(Error::Malformed(format!("unknown codec id {v}"))),
        }
    }
}

/// Scheme tag stored in the container header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum SchemeId {
    None = 0,
    Proposed = 1,
    Full = 2,
    Pure = 3,
    Crisscross = 4,
    Choose = 5,
    Perceptual = 6,
}

impl SchemeId {
    pub const ENCRYPTING: [SchemeId; 6] = [
        SchemeId::Proposed,
        SchemeId::Full,
        SchemeId::Pure,
        SchemeId::Crisscross,
        SchemeId::Choose,
        SchemeId::Perceptual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::None => "none",
            SchemeId::Proposed => "proposed",
            SchemeId::Full => "full",
            SchemeId::Pure => "pure",
            SchemeId::Crisscross => "crisscross",
            SchemeId::Choose => "choose",
            SchemeId::Perceptual => "perceptual",
        }
    }
}

impl TryFrom<u8> for SchemeId {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        Ok(match v {
            0 => SchemeId::None,
            1 => SchemeId::Proposed,
            2 => SchemeId::Full,
            3 => SchemeId::Pure,
            4 => SchemeId::Crisscross,
            5 => SchemeId::Choose,
            6 => SchemeId::Perceptual,
            _ => return Err(Error::UnknownScheme(v)),
        })
    }
}

impl std::str::FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(SchemeId::None)
            .chain(SchemeId::ENCRYPTING)
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParam(format!("unknown scheme '{s}'")))
    }
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvcHeader {
    pub codec: CodecId,
    pub scheme: SchemeId,
    pub flags: u8,
    pub width: u16,
    pub height: u16,
    pub fps_num: u16,
    pub fps_den: u16,
    pub sample_rate: u32,
    /// 0 for video-only files, 1 for mono.
    pub channels: u8,
    pub bits_per_sample: u8,
    pub key_blob: Vec<u8>,
}

impl SvcHeader {
    pub fn is_encrypted(&self) -> bool {
        self.flags & FLAG_ENCRYPTED != 0
    }
}

/// One frame's video payload and the PCM bytes for its time span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameRecord {
    pub original_index: u32,
    pub video: Vec<u8>,
    pub audio: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvcFile {
    pub header: SvcHeader,
    pub records: Vec<FrameRecord>,
}

impl SvcFile {
    /// Builds an unencrypted file from per-frame video payloads and an audio
    /// track; audio is split across frames with [`partition_audio`].
    pub fn assemble(
        codec: CodecId,
        width: u16,
        height: u16,
        fps_num: u16,
        fps_den: u16,
        payloads: Vec<Vec<u8>>,
        audio: &AudioTrack,
    ) -> Self {
        let chunks = if payloads.is_empty() {
            Vec::new()
        } else {
            partition_audio(audio, payloads.len())
        };
        let has_audio = !audio.samples.is_empty();
        let records = payloads
            .into_iter()
            .zip(chunks)
            .enumerate()
            .map(|(i, (video, audio))| FrameRecord { original_index: i as u32, video, audio })
            .collect();
        SvcFile {
            header: SvcHeader {
                codec,
                scheme: SchemeId::None,
                flags: 0,
                width,
                height,
                fps_num,
                fps_den,
                sample_rate: if has_audio { audio.sample_rate } else { 0 },
                channels: has_audio as u8,
                bits_per_sample: 16,
                key_blob: Vec::new(),
            },
            records,
        }
    }

    /// Wraps raw frames as a `RAW` codec file.
    pub fn from_raw(video: &RawVideo, audio: &AudioTrack) -> Self {
        Self::assemble(
            CodecId::Raw,
            video.width,
            video.height,
            video.fps_num,
            video.fps_den,
            video.frames.clone(),
            audio,
        )
    }

    pub fn frame_count(&self) -> usize {
        self.records.len()
    }

    pub fn video_bytes(&self) -> usize {
        self.records.iter().map(|r| r.video.len()).sum()
    }

    pub fn audio_bytes(&self) -> usize {
        self.records.iter().map(|r| r.audio.len()).sum()
    }

    /// Concatenated audio payloads decoded back to samples.
    pub fn audio_track(&self) -> AudioTrack {
        let samples = self
            .records
            .iter()
            .flat_map(|r| r.audio.chunks_exact(2))
            .map(|c| i16::from_le_bytes([c[0], c[1]]))
            .collect();
        AudioTrack { sample_rate: self.header.sample_rate, samples }
    }

    pub(crate) fn renumber(&mut self) {
        for (i, r) in self.records.iter_mut().enumerate() {
            r.original_index = i as u32;
        }
    }
}
