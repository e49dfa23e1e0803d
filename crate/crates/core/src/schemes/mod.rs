//! Encryption schemes.
//!
//! | id | scheme | what it does |
//! |----|--------|--------------|
//! | 1 | proposed | shuffle frame records (audio moves with its frame), jumble macroblock units inside each frame, AES-CTR on the sensitive codeword bits |
//! | 2 | full | AES-CTR over every payload byte |
//! | 3 | pure | one keyed byte permutation applied to every raw frame |
//! | 4 | crisscross | keyed 64-entry permutation of every block's zigzag levels, then re-encode |
//! | 5 | choose | AES-CTR over a deterministic subset of whole frames |
//! | 6 | perceptual | AES-CTR over intra-DC, coefficient-sign and motion FLC bits of the first macroblocks |
//!
//! Every scheme draws a fresh [`ShuffleKey`] and stores it AES-GCM-wrapped in
//! the header, followed by a short parameter trailer that the wrap
//! authenticates. Decryption needs only the master key.

mod choose_full;
mod perceptual;
mod permute;
mod proposed;
mod report;

pub use choose_full::chosen_frames;
pub use perceptual::covered_units;
pub(crate) use proposed::frame_permutation;
pub use report::{SchemeReport, Stage, StageTimings, TimingTable};

use crate::codec::ClassSet;
pub use crate::container::SchemeId;
use crate::container::{CodecId, SvcFile, FLAG_ENCRYPTED};
use crate::keys::{unwrap_shuffle_key, wrap_shuffle_key, KeyBlob, MasterKey, ShuffleKey, KEY_BLOB_LEN};
use crate::{Error, Result};

/// Bytes after the wrapped key: class mask (u8) and fraction (f64 LE).
pub const PARAM_TRAILER_LEN: usize = 9;
/// Total header `key_blob` length for every scheme.
pub const HEADER_BLOB_LEN: usize = KEY_BLOB_LEN + PARAM_TRAILER_LEN;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub scheme: SchemeId,
    /// Codeword classes to encrypt (proposed, perceptual).
    pub classes: ClassSet,
    /// Fraction of frames to encrypt (choose), in (0, 1].
    pub frame_fraction: f64,
    /// Fraction of macroblocks per frame to encrypt (perceptual), in [0, 1].
    pub block_fraction: f64,
}

impl SchemeParams {
    pub fn new(scheme: SchemeId) -> Self {
        let classes = match scheme {
            SchemeId::Perceptual => ClassSet::PERCEPTUAL,
            _ => ClassSet::ALL,
        };
        Self { scheme, classes, frame_fraction: 0.5, block_fraction: 1.0 }
    }

    pub fn with_classes(mut self, classes: ClassSet) -> Self {
        self.classes = classes;
        self
    }

    pub fn with_frame_fraction(mut self, f: f64) -> Self {
        self.frame_fraction = f;
        self
    }

    pub fn with_block_fraction(mut self, p: f64) -> Self {
        self.block_fraction = p;
        self
    }

    fn validate(&self) -> Result<()> {
        match self.scheme {
            SchemeId::None => Err(Error::UnknownScheme(0)),
            SchemeId::Choose if !(self.frame_fraction > 0.0 && self.frame_fraction <= 1.0) => {
                Err(Error::InvalidParam(format!("frame fraction {} outside (0, 1]", self.frame_fraction)))
            }
            SchemeId::Perceptual if !(0.0..=1.0).contains(&self.block_fraction) => {
                Err(Error::InvalidParam(format!("block fraction {} outside [0, 1]", self.block_fraction)))
            }
            _ => Ok(()),
        }
    }

    fn trailer(&self) -> [u8; PARAM_TRAILER_LEN] {
        let fraction = match self.scheme {
            SchemeId::Choose => self.frame_fraction,
            SchemeId::Perceptual => self.block_fraction,
            _ => 0.0,
        };
        let classes = match self.scheme {
            SchemeId::Proposed | SchemeId::Perceptual => self.classes.bits(),
            _ => 0,
        };
        let mut t = [0u8; PARAM_TRAILER_LEN];
        t[0] = classes;
        t[1..].copy_from_slice(&fraction.to_le_bytes());
        t
    }

    fn from_trailer(scheme: SchemeId, t: &[u8]) -> Self {
        let fraction = f64::from_le_bytes(t[1..9].try_into().unwrap());
        Self {
            scheme,
            classes: ClassSet::from_bits(t[0]),
            frame_fraction: fraction,
            block_fraction: fraction,
        }
    }
}

/// Coarse taxonomy of video encryption approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Taxonomy {
    CompletelyLayered,
    Permutation,
    Selective,
    Perceptual,
}

impl Taxonomy {
    pub fn label(self) -> &'static str {
        match self {
            Taxonomy::CompletelyLayered => "completely layered",
            Taxonomy::Permutation => "permutation",
            Taxonomy::Selective => "selective",
            Taxonomy::Perceptual => "perceptual",
        }
    }
}

pub fn classify(scheme: SchemeId) -> Result<Taxonomy> {
    Ok(match scheme {
        SchemeId::Full => Taxonomy::CompletelyLayered,
        SchemeId::Pure | SchemeId::Crisscross => Taxonomy::Permutation,
        SchemeId::Choose | SchemeId::Proposed => Taxonomy::Selective,
        SchemeId::Perceptual => Taxonomy::Perceptual,
        SchemeId::None => return Err(Error::UnknownScheme(0)),
    })
}

/// Codec the scheme requires, if any.
pub fn required_codec(scheme: SchemeId) -> Option<CodecId> {
    match scheme {
        SchemeId::Proposed | SchemeId::Crisscross | SchemeId::Perceptual => Some(CodecId::Dct),
        SchemeId::Pure => Some(CodecId::Raw),
        _ => None,
    }
}

fn check_codec(svc: &SvcFile, scheme: SchemeId) -> Result<()> {
    match required_codec(scheme) {
        Some(c) if c != svc.header.codec => Err(Error::SchemeCodec {
            scheme: scheme.name(),
            needed: if c == CodecId::Dct { "DCT" } else { "RAW" },
        }),
        _ => Ok(()),
    }
}

fn context(scheme: SchemeId, trailer: &[u8]) -> Vec<u8> {
    [&[scheme as u8][..], trailer].concat()
}

/// Encrypts `svc` under a fresh shuffle key wrapped with `master`.
pub fn encrypt(svc: SvcFile, master: &MasterKey, params: &SchemeParams) -> Result<(SvcFile, SchemeReport)> {
    encrypt_with_key(svc, master, params, ShuffleKey::generate())
}

/// [`encrypt`] with a caller-chosen shuffle key. The key must never be
/// reused across encryptions.
pub fn encrypt_with_key(
    mut svc: SvcFile,
    master: &MasterKey,
    params: &SchemeParams,
    key: ShuffleKey,
) -> Result<(SvcFile, SchemeReport)> {
    if svc.header.is_encrypted() {
        return Err(Error::AlreadyEncrypted);
    }
    params.validate()?;
    check_codec(&svc, params.scheme)?;
    let mut report = SchemeReport::new(params.scheme);
    report.total_payload_bytes = svc.video_bytes();
    report.audio_total_bytes = svc.audio_bytes();

    match params.scheme {
        SchemeId::Proposed => proposed::encrypt(&mut svc, &key, params, &mut report)?,
        SchemeId::Full => choose_full::encrypt_full(&mut svc, &key, &mut report),
        SchemeId::Choose => choose_full::encrypt_choose(&mut svc, &key, params, &mut report),
        SchemeId::Pure => permute::encrypt_pure(&mut svc, &key, &mut report)?,
        SchemeId::Crisscross => permute::encrypt_crisscross(&mut svc, &key, &mut report)?,
        SchemeId::Perceptual => perceptual::encrypt(&mut svc, &key, params, &mut report)?,
        SchemeId::None => unreachable!("validated"),
    }

    report.stage_timings.time(Stage::Aes, || {
        let trailer = params.trailer();
        let blob = wrap_shuffle_key(master, &key, &context(params.scheme, &trailer));
        svc.header.key_blob = [blob.to_bytes(), trailer.to_vec()].concat();
    });
    svc.header.scheme = params.scheme;
    svc.header.flags |= FLAG_ENCRYPTED;
    svc.renumber();
    Ok((svc, report))
}

/// Unwraps the shuffle key and parameters without touching payloads.
pub fn open_header(svc: &SvcFile, master: &MasterKey) -> Result<(ShuffleKey, SchemeParams)> {
    if !svc.header.is_encrypted() {
        return Err(Error::NotEncrypted);
    }
    let scheme = svc.header.scheme;
    if scheme == SchemeId::None {
        return Err(Error::UnknownScheme(0));
    }
    let blob = &svc.header.key_blob;
    if blob.len() != HEADER_BLOB_LEN {
        return Err(Error::WrongKey);
    }
    let (wrapped, trailer) = blob.split_at(KEY_BLOB_LEN);
    let key = unwrap_shuffle_key(master, &KeyBlob::from_bytes(wrapped)?, &context(scheme, trailer))?;
    Ok((key, SchemeParams::from_trailer(scheme, trailer)))
}

/// Inverts [`encrypt`]. Fails before touching any payload if the key does
/// not authenticate.
pub fn decrypt(mut svc: SvcFile, master: &MasterKey) -> Result<SvcFile> {
    let (key, params) = open_header(&svc, master)?;
    check_codec(&svc, params.scheme)?;
    match params.scheme {
        SchemeId::Proposed => proposed::decrypt(&mut svc, &key, &params)?,
        SchemeId::Full => choose_full::decrypt_full(&mut svc, &key),
        SchemeId::Choose => choose_full::decrypt_choose(&mut svc, &key, &params),
        SchemeId::Pure => permute::decrypt_pure(&mut svc, &key)?,
        SchemeId::Crisscross => permute::decrypt_crisscross(&mut svc, &key)?,
        SchemeId::Perceptual => perceptual::decrypt(&mut svc, &key, &params)?,
        SchemeId::None => unreachable!(),
    }
    svc.header.scheme = SchemeId::None;
    svc.header.flags &= !FLAG_ENCRYPTED;
    svc.header.key_blob.clear();
    svc.renumber();
    Ok(svc)
}

#[cfg(test)]
mod tests;
