//! Byte-level AES-CTR over whole payloads: every frame, or a fixed
//! subset of frames.

use super::{SchemeParams, SchemeReport, Stage};
use crate::container::SvcFile;
use crate::keys::{indexed_tag, xor_keyed_stream, xor_keyed_stream_at, ShuffleKey};
use crate::par;

pub(crate) const CHOOSE_TAG: &[u8] = b"choose";

/// Runs one continuous keystream over all video payloads, then all audio.
fn xor_full(svc: &mut SvcFile, key: &ShuffleKey) {
    let mut offsets = Vec::with_capacity(svc.records.len());
    let mut at = 0u64;
    for r in &svc.records {
        offsets.push(at);
        at += r.video.len() as u64;
    }
    let mut audio_offsets = Vec::with_capacity(svc.records.len());
    for r in &svc.records {
        audio_offsets.push(at);
        at += r.audio.len() as u64;
    }
    par::for_each_mut(&mut svc.records, |i, r| {
        xor_keyed_stream_at(&key.frame_seed, &key.stream_nonce, offsets[i], &mut r.video);
        xor_keyed_stream_at(&key.frame_seed, &key.stream_nonce, audio_offsets[i], &mut r.audio);
    });
}

pub(super) fn encrypt_full(svc: &mut SvcFile, key: &ShuffleKey, report: &mut SchemeReport) {
    report.stage_timings.time(Stage::Aes, || xor_full(svc, key));
    report.bytes_touched = report.total_payload_bytes;
    report.audio_bytes_touched = report.audio_total_bytes;
    report.aes_bits = 8 * (report.total_payload_bytes + report.audio_total_bytes);
}

pub(super) fn decrypt_full(svc: &mut SvcFile, key: &ShuffleKey) {
    xor_full(svc, key);
}

/// Frames picked for a fraction `f`: the first `ceil(f * n)` of
/// `0, s, 2s, ...` with `s = floor(1 / f)`.
pub fn chosen_frames(n: usize, f: f64) -> Vec<usize> {
    let step = ((1.0 / f).floor() as usize).max(1);
    let count = ((f * n as f64).ceil() as usize).min(n);
    (0..count).map(|k| k * step).filter(|&i| i < n).collect()
}

fn xor_chosen(svc: &mut SvcFile, key: &ShuffleKey, f: f64) -> (usize, usize) {
    let chosen = chosen_frames(svc.records.len(), f);
    let mut picked = vec![false; svc.records.len()];
    for &i in &chosen {
        picked[i] = true;
    }
    par::for_each_mut(&mut svc.records, |i, r| {
        if picked[i] {
            let tag = indexed_tag(CHOOSE_TAG, i as u32);
            let mut cipher_in = std::mem::take(&mut r.video);
            let vlen = cipher_in.len();
            cipher_in.append(&mut r.audio);
            xor_keyed_stream(&key.frame_seed, &tag, &mut cipher_in);
            r.audio = cipher_in.split_off(vlen);
            r.video = cipher_in;
        }
    });
    chosen.iter().fold((0, 0), |(v, a), &i| {
        (v + svc.records[i].video.len(), a + svc.records[i].audio.len())
    })
}

pub(super) fn encrypt_choose(svc: &mut SvcFile, key: &ShuffleKey, params: &SchemeParams, report: &mut SchemeReport) {
    let (video, audio) = report.stage_timings.time(Stage::Aes, || xor_chosen(svc, key, params.frame_fraction));
    report.bytes_touched = video;
    report.audio_bytes_touched = audio;
    report.aes_bits = 8 * (video + audio);
}

pub(super) fn decrypt_choose(svc: &mut SvcFile, key: &ShuffleKey, params: &SchemeParams) {
    xor_chosen(svc, key, params.frame_fraction);
}
