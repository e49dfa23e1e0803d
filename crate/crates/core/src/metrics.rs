//! Quality, ratio, compliance and timing measurements, plus the scheme
//! comparison harness.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::attack::{kpa_byte_permutation_multi, kpa_coefficient_permutation};
use crate::codec::{decode_frame, decode_video, encode_svc, Dims};
use crate::container::{ingest_raw, FrameSource};
use crate::container::{serialize_svc, AudioTrack, CodecId, RawVideo, SchemeId, SvcFile};
use crate::keys::{MasterKey, ShuffleKey};
use crate::schemes::{self, SchemeParams, SchemeReport, Stage, StageTimings, TimingTable};
use crate::{par, Error, Result};

/// Luma PSNR in dB; `f64::INFINITY` for identical frames.
pub fn psnr(a: &[u8], b: &[u8]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let sse: u64 = a.iter().zip(b).map(|(&x, &y)| (x as i64 - y as i64).pow(2) as u64).sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / a.len() as f64;
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}

/// Mean of per-frame PSNR values.
pub fn mean_psnr(a: &[Vec<u8>], b: &[Vec<u8>]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let values: Vec<Result<f64>> = par::map_range(a.len(), |i| psnr(&a[i], &b[i]));
    let mut sum = 0.0;
    for v in values {
        sum += v?;
    }
    Ok(sum / a.len() as f64)
}

/// `(er_touched, er_size)`: touched share of video payload bytes, and
/// encrypted over original file size.
pub fn encryption_ratio(report: &SchemeReport, original_file_bytes: usize, encrypted_file_bytes: usize) -> Result<(f64, f64)> {
    if report.total_payload_bytes == 0 || original_file_bytes == 0 {
        return Err(Error::EmptyVideo);
    }
    Ok((
        report.bytes_touched as f64 / report.total_payload_bytes as f64,
        encrypted_file_bytes as f64 / original_file_bytes as f64,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Compliance {
    /// Decoder error per record, in stream order; `None` means it decoded.
    pub frames: Vec<Option<String>>,
}

impl Compliance {
    pub fn pass(&self) -> bool {
        self.frames.iter().all(Option::is_none)
    }

    pub fn failures(&self) -> usize {
        self.frames.iter().filter(|f| f.is_some()).count()
    }

    pub fn failure_rate(&self) -> f64 {
        if self.frames.is_empty() {
            return 0.0;
        }
        self.failures() as f64 / self.frames.len() as f64
    }
}

impl fmt::Display for Compliance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} of {} records decode)", if self.pass() { "pass" } else { "fail" }, self.frames.len() - self.failures(), self.frames.len())?;
        for (i, e) in self.frames.iter().enumerate() {
            if let Some(e) = e {
                write!(f, "\n  record {i}: {e}")?;
            }
        }
        Ok(())
    }
}

/// Decodes every record on its own (P frames against a gray reference) and
/// collects decoder errors. Raw records only need the right length.
pub fn compliance_check(svc: &SvcFile) -> Compliance {
    let dims = Dims::new(svc.header.width as usize, svc.header.height as usize);
    let codec = svc.header.codec;
    let frames = par::map(&svc.records, |r| match codec {
        CodecId::Raw if r.video.len() == dims.area() => None,
        CodecId::Raw => Some(format!("raw frame has {} bytes, expected {}", r.video.len(), dims.area())),
        CodecId::Dct => decode_frame(&r.video, dims, None).err().map(|e| e.to_string()),
    });
    Compliance { frames }
}

/// Frames a player would show for `svc`, ignoring any encryption.
pub fn displayed_frames(svc: &SvcFile) -> Result<Vec<Vec<u8>>> {
    let dims = Dims::new(svc.header.width as usize, svc.header.height as usize);
    let payloads: Vec<Vec<u8>> = svc.records.iter().map(|r| r.video.clone()).collect();
    match svc.header.codec {
        CodecId::Raw => Ok(payloads),
        CodecId::Dct => decode_video(&payloads, dims),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub er_touched: f64,
    pub er_size: f64,
    /// Mean PSNR of the encrypted file as displayed vs the source frames;
    /// `None` when it does not decode at all.
    pub psnr_encrypted_db: Option<f64>,
    pub size_ratio: f64,
    pub compliant: bool,
    pub stage_timings: StageTimings,
}

/// Measures one encryption of `plain` (built from `source`).
pub fn evaluate(source: &RawVideo, plain: &SvcFile, encrypted: &SvcFile, report: &SchemeReport) -> Result<MetricsReport> {
    let original_bytes = serialize_svc(plain).len();
    let encrypted_bytes = serialize_svc(encrypted).len();
    let (er_touched, er_size) = encryption_ratio(report, original_bytes, encrypted_bytes)?;
    let psnr_encrypted_db = match displayed_frames(encrypted) {
        Ok(frames) => Some(mean_psnr(&frames, &source.frames)?),
        Err(_) => None,
    };
    Ok(MetricsReport {
        er_touched,
        er_size,
        psnr_encrypted_db,
        size_ratio: er_size,
        compliant: compliance_check(encrypted).pass(),
        stage_timings: report.stage_timings,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

pub const BENCH_RUNS: usize = 5;

#[derive(Debug, Clone, Serialize)]
pub struct BenchResult {
    pub scheme: SchemeId,
    pub runs: usize,
    /// Per-stage medians over the timed runs.
    pub median: StageTimings,
    pub report: SchemeReport,
    /// Playback length of the input in seconds.
    pub duration_s: f64,
}

/// One untimed warm-up, then `runs` sequential timed encryptions.
pub fn bench(svc: &SvcFile, master: &MasterKey, params: &SchemeParams, runs: usize) -> Result<BenchResult> {
    let runs = runs.max(1);
    schemes::encrypt(svc.clone(), master, params)?;
    let mut samples: Vec<StageTimings> = Vec::with_capacity(runs);
    let mut last = None;
    for _ in 0..runs {
        let (_, r) = schemes::encrypt(svc.clone(), master, params)?;
        samples.push(r.stage_timings);
        last = Some(r);
    }
    let mut median_t = StageTimings::default();
    for s in Stage::ALL {
        let mut v: Vec<f64> = samples.iter().map(|t| t.get(s)).collect();
        *median_t.get_mut(s) = median(&mut v);
    }
    let h = &svc.header;
    let duration_s = svc.frame_count() as f64 * h.fps_den as f64 / h.fps_num.max(1) as f64;
    Ok(BenchResult { scheme: params.scheme, runs, median: median_t, report: last.expect("runs >= 1"), duration_s })
}

/// Published reference point, printed for scale only.
pub const REFERENCE_TOTAL_MS: f64 = 3999.0;
pub const REFERENCE_VIDEO_S: f64 = 108.0;

impl fmt::Display for BenchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme {} (median of {} runs after 1 warm-up)", self.scheme, self.runs)?;
        writeln!(f, "{}", TimingTable(&self.median))?;
        if self.duration_s > 0.0 {
            writeln!(
                f,
                "measured: {:.3} ms for {:.2} s of video ({:.3}% of playback time)",
                self.median.total_ms(),
                self.duration_s,
                self.median.total_ms() / (self.duration_s * 10.0)
            )?;
        }
        write!(
            f,
            "reference: {REFERENCE_TOTAL_MS:.0} ms for a {REFERENCE_VIDEO_S:.0} s video (about {:.1}% of its length); other hardware, not a target",
            REFERENCE_TOTAL_MS / (REFERENCE_VIDEO_S * 10.0)
        )
    }
}

#[derive(Debug, Clone)]
pub struct CorpusClip {
    pub name: String,
    pub video: RawVideo,
    pub audio: AudioTrack,
}

/// Loads every subdirectory holding `*.pgm` frames (and optionally
/// `audio.wav`) as one clip, sorted by name.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusClip>> {
    let mut dirs: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    let mut clips = Vec::new();
    for d in dirs {
        let has_frames = fs::read_dir(&d)?
            .filter_map(|e| e.ok())
            .any(|e| e.path().extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")));
        if !has_frames {
            continue;
        }
        let wav = d.join("audio.wav");
        let (video, audio) = ingest_raw(&FrameSource::PgmDir(d.clone()), None, (25, 1), wav.is_file().then_some(wav.as_path()))?;
        let name = d.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        clips.push(CorpusClip { name, video, audio });
    }
    if clips.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(clips)
}

/// The five schemes of the classic comparison table.
pub const TABLE_SCHEMES: [SchemeId; 5] =
    [SchemeId::Full, SchemeId::Pure, SchemeId::Crisscross, SchemeId::Choose, SchemeId::Proposed];

#[derive(Debug, Clone, Copy)]
pub struct CompareOptions {
    pub qp: u8,
    pub gop: usize,
    /// Known plaintext frames given to the attacker.
    pub known_frames: usize,
    pub frame_fraction: f64,
    pub block_fraction: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            qp: crate::codec::DEFAULT_QP,
            gop: crate::codec::DEFAULT_GOP,
            known_frames: 1,
            frame_fraction: 0.5,
            block_fraction: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub scheme: SchemeId,
    pub er_touched: f64,
    pub er_size: f64,
    pub psnr_db: Option<f64>,
    pub compliant: bool,
    /// Whether any encrypted payload length differs from the original.
    pub size_changed: bool,
    pub kpa_recovery: f64,
    pub stage_timings: StageTimings,
}

/// Input file a scheme runs on.
pub fn source_file(scheme: SchemeId, clip: &CorpusClip, qp: u8, gop: usize) -> Result<SvcFile> {
    match schemes::required_codec(scheme) {
        Some(CodecId::Raw) => Ok(SvcFile::from_raw(&clip.video, &clip.audio)),
        _ => encode_svc(&clip.video, &clip.audio, qp, gop),
    }
}

fn rate_or_zero(r: Result<crate::attack::PermutationClasses>) -> Result<f64> {
    match r {
        Ok(c) => Ok(c.recovery_rate()),
        Err(Error::NotPermutationPair | Error::LengthMismatch(..)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Known-plaintext recovery against one encrypted clip. The attacker gets
/// the first `known` source frames and, for the proposed scheme, even the
/// true frame correspondence.
pub fn kpa_recovery(
    clip: &CorpusClip,
    plain: &SvcFile,
    encrypted: &SvcFile,
    key: &ShuffleKey,
    known: usize,
) -> Result<f64> {
    let known = known.clamp(1, plain.frame_count());
    match encrypted.header.scheme {
        SchemeId::Crisscross => {
            let qp = plain.records[0].video[1];
            rate_or_zero(kpa_coefficient_permutation(&clip.video.frames[..known], encrypted, qp))
        }
        scheme => {
            let position: Vec<usize> = if scheme == SchemeId::Proposed {
                let p = schemes::frame_permutation(key, plain.frame_count())?;
                (0..known).map(|i| p.dest(i)).collect()
            } else {
                (0..known).collect()
            };
            let pairs: Vec<(&[u8], &[u8])> = position
                .iter()
                .enumerate()
                .map(|(i, &s)| (plain.records[i].video.as_slice(), encrypted.records[s].video.as_slice()))
                .collect();
            rate_or_zero(kpa_byte_permutation_multi(&pairs))
        }
    }
}

/// Sorted video payload lengths; frame order is not preserved by every scheme.
fn payload_lengths(svc: &SvcFile) -> Vec<usize> {
    let mut v: Vec<usize> = svc.records.iter().map(|r| r.video.len()).collect();
    v.sort_unstable();
    v
}

/// Runs every scheme over every clip and averages per scheme.
pub fn compare(schemes_: &[SchemeId], corpus: &[CorpusClip], master: &MasterKey, opts: &CompareOptions) -> Result<Vec<CompareRow>> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut rows = Vec::with_capacity(schemes_.len());
    for &scheme in schemes_ {
        let params = SchemeParams::new(scheme)
            .with_frame_fraction(opts.frame_fraction)
            .with_block_fraction(opts.block_fraction);
        let mut acc = CompareRow {
            scheme,
            er_touched: 0.0,
            er_size: 0.0,
            psnr_db: Some(0.0),
            compliant: true,
            size_changed: false,
            kpa_recovery: 0.0,
            stage_timings: StageTimings::default(),
        };
        for clip in corpus {
            let plain = source_file(scheme, clip, opts.qp, opts.gop)?;
            let key = ShuffleKey::generate();
            let (enc, report) = schemes::encrypt_with_key(plain.clone(), master, &params, key)?;
            let m = evaluate(&clip.video, &plain, &enc, &report)?;
            acc.er_touched += m.er_touched;
            acc.er_size += m.er_size;
            acc.psnr_db = acc.psnr_db.zip(m.psnr_encrypted_db).map(|(a, b)| a + b);
            acc.compliant &= m.compliant;
            acc.size_changed |= payload_lengths(&plain) != payload_lengths(&enc);
            acc.kpa_recovery += kpa_recovery(clip, &plain, &enc, &key, opts.known_frames)?;
            for s in Stage::ALL {
                *acc.stage_timings.get_mut(s) += m.stage_timings.get(s);
            }
        }
        let n = corpus.len() as f64;
        acc.er_touched /= n;
        acc.er_size /= n;
        acc.psnr_db = acc.psnr_db.map(|p| p / n);
        acc.kpa_recovery /= n;
        for s in Stage::ALL {
            *acc.stage_timings.get_mut(s) /= n;
        }
        rows.push(acc);
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "scheme,er_touched,er_size,psnr_db,compliant,kpa_recovery,ms_shred,ms_shuffle,ms_stitch,ms_aes";

fn fmt_psnr(p: Option<f64>) -> String {
    match p {
        Some(v) if v.is_infinite() => "inf".into(),
        Some(v) => format!("{v:.2}"),
        None => "n/a".into(),
    }
}

pub fn to_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let t = &r.stage_timings;
        out.push_str(&format!(
            "{},{:.4},{:.4},{},{},{:.4},{:.3},{:.3},{:.3},{:.3}\n",
            r.scheme,
            r.er_touched,
            r.er_size,
            fmt_psnr(r.psnr_db),
            r.compliant,
            r.kpa_recovery,
            t.get(Stage::Shredding),
            t.get(Stage::Shuffling),
            t.get(Stage::Stitching),
            t.get(Stage::Aes),
        ));
    }
    out
}

/// Aligned text rendering of a comparison.
pub struct CompareTable<'a>(pub &'a [CompareRow]);

impl fmt::Display for CompareTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12}{:>8}{:>9}{:>11}{:>11}{:>10}{:>8}{:>11}",
            "scheme", "ER", "size", "payloads", "PSNR(dB)", "compliant", "KPA", "total(ms)"
        )?;
        for r in self.0 {
            writeln!(
                f,
                "{:<12}{:>7.0}%{:>9.4}{:>11}{:>11}{:>10}{:>8.3}{:>11.3}",
                r.scheme.name(),
                r.er_touched * 100.0,
                r.er_size,
                if r.size_changed { "changed" } else { "unchanged" },
                fmt_psnr(r.psnr_db),
                if r.compliant { "yes" } else { "no" },
                r.kpa_recovery,
                r.stage_timings.total_ms()
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{clip, dct_file, raw_file, tone};
    use proptest::prelude::*;

    fn master() -> MasterKey {
        MasterKey::new(&[9; 16]).unwrap()
    }

    #[test]
    fn psnr_closed_forms() {
        let a = vec![100u8; 64];
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        let b = vec![101u8; 64];
        assert!((psnr(&a, &b).unwrap() - 20.0 * 255f64.log10()).abs() < 1e-12);
        assert!((psnr(&a, &b).unwrap() - 48.1308).abs() < 1e-4);
        assert!(psnr(&a, &b[..10]).is_err());
    }

    proptest! {
        #[test]
        fn psnr_symmetric_and_monotone(a in prop::collection::vec(any::<u8>(), 64), d in 1u8..50) {
            let b: Vec<u8> = a.iter().map(|&x| x.wrapping_add(7)).collect();
            prop_assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
            let near: Vec<u8> = a.iter().map(|&x| if x < 128 { x + d } else { x - d }).collect();
            let far: Vec<u8> = a.iter().map(|&x| if x < 128 { x + d + 1 } else { x - d - 1 }).collect();
            prop_assert!(psnr(&a, &near).unwrap() > psnr(&a, &far).unwrap());
        }
    }

    #[test]
    fn ratios() {
        let plain = dct_file(4);
        let (enc, r) = schemes::encrypt(plain.clone(), &master(), &SchemeParams::new(SchemeId::Full)).unwrap();
        let (o, e) = (serialize_svc(&plain).len(), serialize_svc(&enc).len());
        let (touched, size) = encryption_ratio(&r, o, e).unwrap();
        assert_eq!(touched, 1.0);
        assert_eq!(size, 1.0 + schemes::HEADER_BLOB_LEN as f64 / o as f64);
        let (_, r) = schemes::encrypt(plain, &master(), &SchemeParams::new(SchemeId::Perceptual).with_block_fraction(0.0)).unwrap();
        assert_eq!(encryption_ratio(&r, o, e).unwrap().0, 0.0);
        let mut empty = r.clone();
        empty.total_payload_bytes = 0;
        assert!(matches!(encryption_ratio(&empty, o, e), Err(Error::EmptyVideo)));
    }

    #[test]
    fn compliance() {
        let plain = dct_file(5);
        assert!(compliance_check(&plain).pass());
        assert_eq!(compliance_check(&plain), compliance_check(&plain));
        for s in [SchemeId::Proposed, SchemeId::Perceptual, SchemeId::Crisscross] {
            let (enc, _) = schemes::encrypt(plain.clone(), &master(), &SchemeParams::new(s)).unwrap();
            assert!(compliance_check(&enc).pass(), "{s}");
        }
        let (enc, _) = schemes::encrypt(plain, &master(), &SchemeParams::new(SchemeId::Full)).unwrap();
        let c = compliance_check(&enc);
        assert_eq!(c.failures(), 5, "{c}");
        assert!(raw_file(2).records.len() == 2 && compliance_check(&raw_file(2)).pass());
    }

    #[test]
    fn bench_reports_all_stages() {
        let b = bench(&dct_file(3), &master(), &SchemeParams::new(SchemeId::Proposed), 3).unwrap();
        let text = b.to_string();
        for label in ["Video Shredding", "Shuffling", "Video Stitching", "AES Encryption", "3999 ms"] {
            assert!(text.contains(label), "{text}");
        }
        assert!(Stage::ALL.iter().all(|&s| b.median.get(s) >= 0.0));
    }

    #[test]
    fn compare_small_corpus() {
        let corpus: Vec<CorpusClip> = (0..2)
            .map(|i| CorpusClip { name: format!("c{i}"), video: clip(32, 32, 6, i), audio: tone(6 * 320) })
            .collect();
        let rows = compare(&TABLE_SCHEMES, &corpus, &master(), &CompareOptions::default()).unwrap();
        assert_eq!(rows.len(), 5);
        let by = |s| rows.iter().find(|r| r.scheme == s).unwrap();
        assert_eq!(by(SchemeId::Full).er_touched, 1.0);
        assert!((by(SchemeId::Choose).er_touched - 0.5).abs() < 0.02);
        assert!(by(SchemeId::Full).psnr_db.is_none());
        assert!(by(SchemeId::Crisscross).size_changed);
        assert!(!by(SchemeId::Proposed).size_changed);
        assert_eq!(by(SchemeId::Proposed).kpa_recovery, 0.0);
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.starts_with(CSV_HEADER));
        assert!(CompareTable(&rows).to_string().contains("unchanged"));
        assert!(matches!(compare(&TABLE_SCHEMES, &[], &master(), &CompareOptions::default()), Err(Error::EmptyCorpus)));
    }
}
