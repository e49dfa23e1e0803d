//! Frame shuffling with attached audio, macroblock jumbling and AES-CTR on
//! sensitive codeword bits.

use std::ops::Range;

use super::{SchemeParams, SchemeReport, Stage};
use crate::codec::syntax::{parse_frame, reorder_units};
use crate::codec::{extract_spans, patch_spans, ClassSet, CodewordMap, Dims, Span};
use crate::container::{FrameRecord, SvcFile};
use crate::keys::{derive_permutation, indexed_tag, keyed_stream, Permutation, ShuffleKey};
use crate::{par, Result};

pub(crate) const FRAME_TAG: &[u8] = b"frame";
pub(crate) const BLOCK_TAG: &[u8] = b"block";
pub(crate) const CODEWORD_TAG: &[u8] = b"cw";

pub(crate) fn dims(svc: &SvcFile) -> Dims {
    Dims::new(svc.header.width as usize, svc.header.height as usize)
}

pub(crate) fn frame_permutation(key: &ShuffleKey, n: usize) -> Result<Permutation> {
    if n == 0 {
        return Ok(Permutation::identity(0));
    }
    derive_permutation(&key.frame_seed, FRAME_TAG, n)
}

pub(crate) fn block_permutation(key: &ShuffleKey, frame: u32, units: usize) -> Result<Permutation> {
    derive_permutation(&key.block_seed, &indexed_tag(BLOCK_TAG, frame), units)
}

/// XORs the selected codeword bits of `payload` with the frame's keystream.
/// Returns the number of bits processed.
pub(crate) fn xor_codewords(
    payload: &mut [u8],
    spans: &[Span],
    classes: ClassSet,
    seed: &[u8; 16],
    tag: &[u8],
) -> Result<usize> {
    let selected = spans.iter().filter(|s| classes.contains(s.class));
    let mut bits = extract_spans(payload, selected.clone());
    bits.xor_with(&keyed_stream(seed, tag, bits.len().div_ceil(8)));
    patch_spans(payload, selected, &bits)?;
    Ok(bits.len())
}

/// Reorders units (`order[k]` = source unit placed at position `k`) and
/// moves the codeword spans with them.
fn jumble(payload: &[u8], units: &[Range<usize>], map: &CodewordMap, order: &[usize]) -> (Vec<u8>, Vec<Span>) {
    let mut by_unit: Vec<Vec<Span>> = vec![Vec::new(); units.len()];
    for s in &map.spans {
        by_unit[s.unit as usize].push(*s);
    }
    let mut spans = Vec::with_capacity(map.spans.len());
    let mut at = units.first().map_or(0, |u| u.start);
    for (k, &src) in order.iter().enumerate() {
        let shift = (at as i64 - units[src].start as i64) * 8;
        spans.extend(by_unit[src].iter().map(|s| Span {
            bit_offset: (s.bit_offset as i64 + shift) as u32,
            unit: k as u32,
            ..*s
        }));
        at += units[src].len();
    }
    (reorder_units(payload, units, order), spans)
}

pub(super) fn encrypt(
    svc: &mut SvcFile,
    key: &ShuffleKey,
    params: &SchemeParams,
    report: &mut SchemeReport,
) -> Result<()> {
    let dims = dims(svc);
    let timings = &mut report.stage_timings;

    let parsed = timings.time(Stage::Shredding, || {
        par::map(&svc.records, |r| parse_frame(&r.video, dims))
            .into_iter()
            .collect::<Result<Vec<_>>>()
    })?;

    let n = svc.records.len();
    let (mut frames, frame_perm) = timings.time(Stage::Shuffling, || -> Result<_> {
        let jumbled: Vec<Result<(Vec<u8>, Vec<Span>)>> = par::map_range(n, |i| {
            let p = &parsed[i];
            let order = block_permutation(key, i as u32, p.units.len())?.sources();
            Ok(jumble(&svc.records[i].video, &p.units, &p.map, &order))
        });
        Ok((jumbled.into_iter().collect::<Result<Vec<_>>>()?, frame_permutation(key, n)?))
    })?;

    let classes = params.classes;
    let bits = timings.time(Stage::Aes, || -> Result<usize> {
        par::try_for_each_mut(&mut frames, |i, (payload, spans)| {
            xor_codewords(payload, spans, classes, &key.frame_seed, &indexed_tag(CODEWORD_TAG, i as u32)).map(|_| ())
        })?;
        Ok(frames
            .iter()
            .flat_map(|(_, spans)| spans.iter())
            .filter(|s| classes.contains(s.class))
            .map(|s| s.width as usize)
            .sum())
    })?;

    timings.time(Stage::Stitching, || {
        let records = std::mem::take(&mut svc.records);
        let rebuilt: Vec<FrameRecord> = records
            .into_iter()
            .zip(frames)
            .map(|(r, (video, _))| FrameRecord { video, ..r })
            .collect();
        svc.records = frame_perm.apply(&rebuilt);
    });

    report.bytes_touched = report.total_payload_bytes;
    report.audio_bytes_touched = report.audio_total_bytes;
    report.aes_bits = bits;
    Ok(())
}

pub(super) fn decrypt(svc: &mut SvcFile, key: &ShuffleKey, params: &SchemeParams) -> Result<()> {
    let dims = dims(svc);
    let n = svc.records.len();
    let frame_perm = frame_permutation(key, n)?;
    let sources = frame_perm.sources();
    let classes = params.classes;
    par::try_for_each_mut(&mut svc.records, |s, rec| -> Result<()> {
        let original = sources[s] as u32;
        let parsed = parse_frame(&rec.video, dims)?;
        xor_codewords(&mut rec.video, &parsed.map.spans, classes, &key.frame_seed, &indexed_tag(CODEWORD_TAG, original))?;
        let restore: Vec<usize> = block_permutation(key, original, parsed.units.len())?
            .mapping()
            .iter()
            .map(|&d| d as usize)
            .collect();
        rec.video = reorder_units(&rec.video, &parsed.units, &restore);
        Ok(())
    })?;
    let shuffled = std::mem::take(&mut svc.records);
    svc.records = (0..n).map(|i| shuffled[frame_perm.dest(i)].clone()).collect();
    Ok(())
}
