//! AES-CTR over fixed-length codeword bits of the leading macroblocks of
//! every frame. Frame and unit order are untouched, so the result stays
//! decodable and only degrades.

use super::proposed::{dims, xor_codewords};
use super::{SchemeParams, SchemeReport, Stage};
use crate::codec::syntax::parse_frame;
use crate::codec::Span;
use crate::container::SvcFile;
use crate::keys::{indexed_tag, ShuffleKey};
use crate::{par, Result};

pub(crate) const FLC_TAG: &[u8] = b"flc";

/// Number of leading units covered for a block fraction `p`.
pub fn covered_units(units: usize, p: f64) -> usize {
    ((p * units as f64).ceil() as usize).min(units)
}

fn selected(spans: &[Span], params: &SchemeParams, limit: usize) -> Vec<Span> {
    spans
        .iter()
        .filter(|s| (s.unit as usize) < limit && params.classes.contains(s.class))
        .copied()
        .collect()
}

/// Returns (bits processed, distinct payload bytes covered) per frame.
fn apply(svc: &mut SvcFile, key: &ShuffleKey, params: &SchemeParams) -> Result<Vec<(usize, usize)>> {
    let d = dims(svc);
    let limit = covered_units(d.macroblocks(), params.block_fraction);
    let mut counts = vec![(0usize, 0usize); svc.records.len()];
    let mut work: Vec<_> = svc.records.iter_mut().zip(counts.iter_mut()).collect();
    par::try_for_each_mut(&mut work, |i, (rec, count)| -> Result<()> {
        let parsed = parse_frame(&rec.video, d)?;
        let spans = selected(&parsed.map.spans, params, limit);
        let bits = xor_codewords(&mut rec.video, &spans, params.classes, &key.frame_seed, &indexed_tag(FLC_TAG, i as u32))?;
        let mut touched: Vec<usize> = spans
            .iter()
            .flat_map(|s| {
                let start = s.bit_offset as usize;
                (start / 8)..=((start + s.width as usize - 1) / 8)
            })
            .collect();
        touched.sort_unstable();
        touched.dedup();
        **count = (bits, touched.len());
        Ok(())
    })?;
    Ok(counts)
}

pub(super) fn encrypt(svc: &mut SvcFile, key: &ShuffleKey, params: &SchemeParams, report: &mut SchemeReport) -> Result<()> {
    let counts = report.stage_timings.time(Stage::Aes, || apply(svc, key, params))?;
    report.aes_bits = counts.iter().map(|c| c.0).sum();
    report.bytes_touched = counts.iter().map(|c| c.1).sum();
    Ok(())
}

pub(super) fn decrypt(svc: &mut SvcFile, key: &ShuffleKey, params: &SchemeParams) -> Result<()> {
    apply(svc, key, params).map(|_| ())
}
