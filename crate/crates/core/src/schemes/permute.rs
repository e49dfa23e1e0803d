//! Keyed permutation ciphers: raw pixel positions, or zigzag coefficient
//! positions inside every 8x8 block.

use super::proposed::dims;
use super::{SchemeReport, Stage};
use crate::codec::syntax::{parse_frame, write_frame, FrameSyntax};
use crate::container::SvcFile;
use crate::keys::{derive_permutation, Permutation, ShuffleKey};
use crate::{par, Result};

pub(crate) const PURE_TAG: &[u8] = b"pure";
pub(crate) const CRISSCROSS_TAG: &[u8] = b"crisscross";

pub(crate) fn pure_permutation(key: &ShuffleKey, frame_len: usize) -> Result<Permutation> {
    derive_permutation(&key.frame_seed, PURE_TAG, frame_len)
}

pub(crate) fn crisscross_permutation(key: &ShuffleKey) -> Result<Permutation> {
    derive_permutation(&key.frame_seed, CRISSCROSS_TAG, 64)
}

fn permute_bytes(svc: &mut SvcFile, p: &Permutation) {
    par::for_each_mut(&mut svc.records, |_, r| r.video = p.apply(&r.video));
}

pub(super) fn encrypt_pure(svc: &mut SvcFile, key: &ShuffleKey, report: &mut SchemeReport) -> Result<()> {
    let p = pure_permutation(key, dims(svc).area())?;
    report.stage_timings.time(Stage::Shuffling, || permute_bytes(svc, &p));
    report.bytes_touched = report.total_payload_bytes;
    Ok(())
}

pub(super) fn decrypt_pure(svc: &mut SvcFile, key: &ShuffleKey) -> Result<()> {
    let p = pure_permutation(key, dims(svc).area())?;
    permute_bytes(svc, &crate::keys::invert_permutation(&p));
    Ok(())
}

fn permute_levels(frame: &mut FrameSyntax, p: &Permutation) {
    for unit in &mut frame.units {
        for block in &mut unit.blocks {
            let moved = p.apply(&block.levels);
            block.levels.copy_from_slice(&moved);
        }
    }
}

fn recode(svc: &mut SvcFile, p: &Permutation, report: Option<&mut SchemeReport>) -> Result<()> {
    let d = dims(svc);
    let mut scratch = super::StageTimings::default();
    let timings = match report {
        Some(r) => &mut r.stage_timings,
        None => &mut scratch,
    };
    let mut frames = timings.time(Stage::Shredding, || {
        par::map(&svc.records, |r| parse_frame(&r.video, d).map(|f| f.syntax))
            .into_iter()
            .collect::<Result<Vec<_>>>()
    })?;
    timings.time(Stage::Shuffling, || par::for_each_mut(&mut frames, |_, f| permute_levels(f, p)));
    timings.time(Stage::Stitching, || {
        let payloads = par::map(&frames, |f| write_frame(f).0);
        for (r, v) in svc.records.iter_mut().zip(payloads) {
            r.video = v;
        }
    });
    Ok(())
}

pub(super) fn encrypt_crisscross(svc: &mut SvcFile, key: &ShuffleKey, report: &mut SchemeReport) -> Result<()> {
    let p = crisscross_permutation(key)?;
    recode(svc, &p, Some(report))?;
    // The payload is re-encoded, so every output byte is new.
    report.total_payload_bytes = svc.video_bytes();
    report.bytes_touched = report.total_payload_bytes;
    Ok(())
}

pub(super) fn decrypt_crisscross(svc: &mut SvcFile, key: &ShuffleKey) -> Result<()> {
    let p = crisscross_permutation(key)?;
    recode(svc, &crate::keys::invert_permutation(&p), None)
}
