use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported container version {0}")]
    Version(u8),
    #[error("inconsistent header: {0}")]
    InconsistentHeader(&'static str),
    #[error("index table entry {0} points outside file")]
    IndexOutOfBounds(usize),
    #[error("payload length overflow in record {0}")]
    PayloadOverflow(usize),
    #[error("truncated {0}")]
    Truncated(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimensions(String),
    #[error("unsupported audio layout: {0}")]
    AudioLayout(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("bitstream error at bit {pos}: {msg}")]
    Bitstream { pos: usize, msg: &'static str },
    #[error("quantized level {0} exceeds 12 signed bits")]
    LevelOverflow(i32),
    #[error("bit length mismatch: expected {expected}, got {got}")]
    BitLength { expected: usize, got: usize },
    #[error("empty domain")]
    EmptyDomain,
    #[error("invalid master key length {0} (expected 16, 24 or 32 bytes)")]
    KeyLength(usize),
    #[error("wrong key or corrupted blob")]
    WrongKey,
    #[error("scheme {scheme} requires {needed} codec")]
    SchemeCodec {
        scheme: &'static str,
        needed: &'static str,
    },
    #[error("input is already encrypted")]
    AlreadyEncrypted,
    #[error("not encrypted")]
    NotEncrypted,
    #[error("unknown scheme id {0}")]
    UnknownScheme(u8),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("not a permutation pair")]
    NotPermutationPair,
    #[error("zero-byte video")]
    EmptyVideo,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
