//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error, 3 wrong key.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::attack::attack_file;
use crate::codec::{decode_svc, encode_svc, parse_frame, ClassSet, CodewordClass, Dims, DEFAULT_GOP, DEFAULT_QP};
use crate::container::{
    ingest_raw, parse_svc, serialize_svc, write_pgm, write_wav, CodecId, FrameSource, SchemeId, SvcFile,
    FIXED_HEADER_LEN, INDEX_ENTRY_LEN,
};
use crate::keys::MasterKey;
use crate::metrics::{self, CompareOptions, CompareTable, BENCH_RUNS, TABLE_SCHEMES};
use crate::schemes::{self, SchemeParams};
use crate::Error;

#[derive(Parser, Debug)]
#[command(name = "svcrypt", version, about = "Selective video encryption toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode PGM frames or raw luma (plus optional WAV) into an SVC file
    Encode(EncodeArgs),
    /// Decode an SVC file into numbered PGM frames and audio.wav
    Decode {
        input: PathBuf,
        /// Output directory (created if missing)
        #[arg(short, long)]
        out_dir: PathBuf,
    },
    /// Encrypt an SVC file
    Encrypt {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        key: KeyArg,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decrypt an SVC file
    Decrypt {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        key: KeyArg,
    },
    /// Known-plaintext attack: pair the first N plaintext frames with the ciphertext
    Attack {
        /// Attacker's known material: a RAW-codec SVC for pure/crisscross,
        /// otherwise the unencrypted file
        #[arg(long)]
        plain: PathBuf,
        #[arg(long)]
        encrypted: PathBuf,
        /// Number of known frames
        #[arg(long, default_value_t = 1)]
        known: usize,
    },
    /// Time each encryption stage (1 warm-up, median of the timed runs)
    Bench {
        input: PathBuf,
        #[command(flatten)]
        key: KeyArg,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = BENCH_RUNS)]
        runs: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare schemes over a corpus of clip directories
    Compare {
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated scheme names, or "all" for the five table schemes
        #[arg(long, default_value = "all")]
        schemes: String,
        /// Master key; a random one is used when absent
        #[arg(long, env = "SVCRYPT_KEY", hide_env_values = true)]
        key: Option<String>,
        #[arg(long, default_value_t = DEFAULT_QP)]
        qp: u8,
        #[arg(long, default_value_t = DEFAULT_GOP)]
        gop: usize,
        /// Known plaintext frames for the attack column
        #[arg(long, default_value_t = 1)]
        known: usize,
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
        #[arg(long, default_value_t = 1.0)]
        blocks: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Dump header, record index and codeword statistics
    Inspect {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct EncodeArgs {
    /// Frame source: a directory of PGM files, PGM files, or one raw luma file (needs --size)
    #[arg(required = true, num_args = 1..)]
    frames: Vec<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
    /// WxH, for raw luma input
    #[arg(long)]
    size: Option<String>,
    /// Frame rate as N or N/D
    #[arg(long, default_value = "25")]
    fps: String,
    /// Mono 16-bit PCM WAV
    #[arg(long)]
    audio: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CodecArg::Dct)]
    codec: CodecArg,
    #[arg(long, default_value_t = DEFAULT_QP)]
    qp: u8,
    /// I-frame interval
    #[arg(long, default_value_t = DEFAULT_GOP)]
    gop: usize,
}

#[derive(Args, Debug)]
struct KeyArg {
    /// Master key as 32, 48 or 64 hex digits
    #[arg(long, env = "SVCRYPT_KEY", hide_env_values = true)]
    key: Option<String>,
}

#[derive(Args, Debug)]
struct SchemeArgs {
    #[arg(long, default_value = "proposed")]
    scheme: String,
    /// Frame fraction for choose
    #[arg(long, default_value_t = 0.5)]
    fraction: f64,
    /// Macroblock fraction for perceptual
    #[arg(long, default_value_t = 1.0)]
    blocks: f64,
    /// Codeword classes, e.g. "dc,mvd" or "all"
    #[arg(long)]
    classes: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CodecArg {
    Dct,
    Raw,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(Error::Io(e))
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::WrongKey => 3,
                Error::KeyLength(_) | Error::InvalidParam(_) | Error::UnknownScheme(_) => 1,
                _ => 2,
            }
        }
    }
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Encode(a) => encode(a),
        Command::Decode { input, out_dir } => {
            let svc = read_svc(&input)?;
            let video = decode_svc(&svc)?;
            fs::create_dir_all(&out_dir)?;
            let (w, h) = (video.width as usize, video.height as usize);
            for (i, f) in video.frames.iter().enumerate() {
                write_atomic(&out_dir.join(format!("frame_{i:05}.pgm")), &write_pgm(w, h, f))?;
            }
            let audio = svc.audio_track();
            if !audio.samples.is_empty() {
                write_atomic(&out_dir.join("audio.wav"), &write_wav(&audio))?;
            }
            eprintln!("{} frames written to {}", video.frames.len(), out_dir.display());
            Ok(())
        }
        Command::Encrypt { input, output, key, scheme, format } => {
            distinct(&input, &output)?;
            let master = master_key(&key)?;
            let params = scheme_params(&scheme)?;
            let svc = read_svc(&input)?;
            let (enc, report) = schemes::encrypt(svc, &master, &params)?;
            write_atomic(&output, &serialize_svc(&enc))?;
            match format {
                Format::Json => println!("{}", report.to_json()),
                _ => println!("{report}"),
            }
            Ok(())
        }
        Command::Decrypt { input, output, key } => {
            distinct(&input, &output)?;
            let master = master_key(&key)?;
            let svc = read_svc(&input)?;
            let dec = schemes::decrypt(svc, &master)?;
            write_atomic(&output, &serialize_svc(&dec))?;
            Ok(())
        }
        Command::Attack { plain, encrypted, known } => {
            let report = attack_file(&read_svc(&plain)?, &read_svc(&encrypted)?, known)?;
            println!("{}", report.to_json());
            Ok(())
        }
        Command::Bench { input, key, scheme, runs, format } => {
            let master = master_key(&key)?;
            let params = scheme_params(&scheme)?;
            let result = metrics::bench(&read_svc(&input)?, &master, &params, runs)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&result).expect("serializes")),
                _ => println!("{result}"),
            }
            Ok(())
        }
        Command::Compare { corpus, schemes: list, key, qp, gop, known, fraction, blocks, format } => {
            let list = parse_scheme_list(&list)?;
            let master = match key {
                Some(k) => MasterKey::from_hex(&k)?,
                None => MasterKey::generate(16)?,
            };
            let clips = metrics::load_corpus(&corpus)?;
            let opts = CompareOptions { qp, gop, known_frames: known, frame_fraction: fraction, block_fraction: blocks };
            let rows = metrics::compare(&list, &clips, &master, &opts)?;
            match format {
                Format::Csv => print!("{}", metrics::to_csv(&rows)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&rows).expect("serializes")),
                Format::Text => print!("{}", CompareTable(&rows)),
            }
            Ok(())
        }
        Command::Inspect { input, format } => {
            let summary = inspect(&read_svc(&input)?);
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&summary).expect("serializes")),
                _ => print!("{}", summary.render()),
            }
            Ok(())
        }
    }
}

fn encode(a: EncodeArgs) -> CliResult {
    distinct_many(&a.frames, &a.output)?;
    let fps = parse_fps(&a.fps)?;
    let dims = a.size.as_deref().map(parse_size).transpose()?;
    let source = match a.frames.as_slice() {
        [one] if one.is_dir() => FrameSource::PgmDir(one.clone()),
        [one] if !has_pgm_ext(one) => FrameSource::RawLuma(one.clone()),
        many => FrameSource::PgmFiles(many.to_vec()),
    };
    let (video, audio) = ingest_raw(&source, dims, fps, a.audio.as_deref())?;
    let svc = match a.codec {
        CodecArg::Dct => encode_svc(&video, &audio, a.qp, a.gop)?,
        CodecArg::Raw => SvcFile::from_raw(&video, &audio),
    };
    write_atomic(&a.output, &serialize_svc(&svc))?;
    eprintln!("{} frames, {} bytes", svc.frame_count(), svc.video_bytes() + svc.audio_bytes());
    Ok(())
}

fn has_pgm_ext(p: &Path) -> bool {
    p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm"))
}

fn parse_fps(s: &str) -> CliResult<(u16, u16)> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    match (n.trim().parse::<u16>(), d.trim().parse::<u16>()) {
        (Ok(n), Ok(d)) if n > 0 && d > 0 => Ok((n, d)),
        _ => Err(usage(format!("bad frame rate {s:?}"))),
    }
}

fn parse_size(s: &str) -> CliResult<(u16, u16)> {
    let parsed = s.split_once(['x', 'X']).and_then(|(w, h)| Some((w.parse().ok()?, h.parse().ok()?)));
    parsed.ok_or_else(|| usage(format!("bad size {s:?}, expected WxH")))
}

fn parse_scheme_list(s: &str) -> CliResult<Vec<SchemeId>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(TABLE_SCHEMES.to_vec());
    }
    s.split(',')
        .map(|name| match name.trim().parse::<SchemeId>() {
            Ok(SchemeId::None) | Err(_) => Err(usage(format!("unknown scheme {name:?}"))),
            Ok(id) => Ok(id),
        })
        .collect()
}

fn scheme_params(a: &SchemeArgs) -> CliResult<SchemeParams> {
    let scheme = parse_scheme_list(&a.scheme)?;
    let [scheme] = scheme.as_slice() else {
        return Err(usage("exactly one scheme expected"));
    };
    let mut params = SchemeParams::new(*scheme).with_frame_fraction(a.fraction).with_block_fraction(a.blocks);
    if let Some(c) = &a.classes {
        params = params.with_classes(ClassSet::parse_list(c).map_err(|e| usage(e.to_string()))?);
    }
    Ok(params)
}

fn master_key(k: &KeyArg) -> CliResult<MasterKey> {
    let hex = k.key.as_deref().ok_or_else(|| usage("a master key is required (--key or SVCRYPT_KEY)"))?;
    MasterKey::from_hex(hex).map_err(|e| usage(e.to_string()))
}

fn read_svc(path: &Path) -> CliResult<SvcFile> {
    Ok(parse_svc(&fs::read(path)?)?)
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

fn distinct(input: &Path, output: &Path) -> CliResult {
    if same_file(input, output) {
        return Err(usage("input and output must be different files"));
    }
    Ok(())
}

fn distinct_many(inputs: &[PathBuf], output: &Path) -> CliResult {
    inputs.iter().try_for_each(|i| distinct(i, output))
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Failure::Data(Error::Io(e.error)))?;
    Ok(())
}

#[derive(Serialize)]
struct RecordSummary {
    index: usize,
    offset: u64,
    video_len: usize,
    audio_len: usize,
}

#[derive(Serialize)]
struct InspectSummary {
    codec: &'static str,
    scheme: SchemeId,
    encrypted: bool,
    width: u16,
    height: u16,
    fps: String,
    frame_count: usize,
    sample_rate: u32,
    channels: u8,
    key_blob_len: usize,
    records: Vec<RecordSummary>,
    /// Bits per codeword class over all parseable frames.
    codewords: Option<Vec<(&'static str, usize)>>,
    unparseable_frames: usize,
}

fn inspect(svc: &SvcFile) -> InspectSummary {
    let h = &svc.header;
    let count = svc.frame_count() as u64;
    let mut offset = (FIXED_HEADER_LEN + h.key_blob.len()) as u64 + INDEX_ENTRY_LEN as u64 * count;
    let records = svc
        .records
        .iter()
        .enumerate()
        .map(|(index, r)| {
            let s = RecordSummary { index, offset, video_len: r.video.len(), audio_len: r.audio.len() };
            offset += (r.video.len() + r.audio.len()) as u64;
            s
        })
        .collect();
    let (codewords, unparseable_frames) = match h.codec {
        CodecId::Raw => (None, 0),
        CodecId::Dct => {
            let dims = Dims::new(h.width as usize, h.height as usize);
            let mut bits = [0usize; 8];
            let mut bad = 0;
            for r in &svc.records {
                match parse_frame(&r.video, dims) {
                    Ok(p) => {
                        for (c, n) in p.map.histogram() {
                            bits[c as usize] += n;
                        }
                    }
                    Err(_) => bad += 1,
                }
            }
            (Some(CodewordClass::ALL.iter().map(|&c| (c.name(), bits[c as usize])).collect()), bad)
        }
    };
    InspectSummary {
        codec: match h.codec {
            CodecId::Raw => "raw",
            CodecId::Dct => "dct",
        },
        scheme: h.scheme,
        encrypted: h.is_encrypted(),
        width: h.width,
        height: h.height,
        fps: format!("{}/{}", h.fps_num, h.fps_den),
        frame_count: svc.frame_count(),
        sample_rate: h.sample_rate,
        channels: h.channels,
        key_blob_len: h.key_blob.len(),
        records,
        codewords,
        unparseable_frames,
    }
}

impl InspectSummary {
    fn render(&self) -> String {
        let mut s = format!(
            "codec {}  scheme {}  encrypted {}\n{}x{} @ {} fps, {} frames\naudio {} Hz, {} channel(s)\nkey blob {} bytes\n",
            self.codec,
            self.scheme,
            self.encrypted,
            self.width,
            self.height,
            self.fps,
            self.frame_count,
            self.sample_rate,
            self.channels,
            self.key_blob_len
        );
        s.push_str(&format!("{:>6} {:>10} {:>9} {:>9}\n", "record", "offset", "video", "audio"));
        for r in &self.records {
            s.push_str(&format!("{:>6} {:>10} {:>9} {:>9}\n", r.index, r.offset, r.video_len, r.audio_len));
        }
        if let Some(cw) = &self.codewords {
            s.push_str("codeword bits\n");
            for (name, n) in cw {
                s.push_str(&format!("  {name:<18}{n:>10}\n"));
            }
            if self.unparseable_frames > 0 {
                s.push_str(&format!("{} frame(s) do not parse\n", self.unparseable_frames));
            }
        }
        s
    }
}
