//! Index of the encryptable codeword bits in a frame payload.
//!
//! Only Exp-Golomb suffixes and explicit sign bits are listed. Their width
//! never depends on their value, so any rewrite keeps every codeword
//! boundary where it was and the payload stays parseable.

use super::bits::{get_bit, set_bit, BitVec};
use super::syntax::parse_frame;
use super::Dims;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum CodewordClass {
    IntraDcSuffix = 0,
    IntraDcSign = 1,
    /// DC of an inter (residual) block.
    InterDcSuffix = 2,
    InterDcSign = 3,
    AcLevelSuffix = 4,
    AcSign = 5,
    MvdSuffix = 6,
    MvdSign = 7,
}

impl CodewordClass {
    pub const ALL: [CodewordClass; 8] = [
        CodewordClass::IntraDcSuffix,
        CodewordClass::IntraDcSign,
        CodewordClass::InterDcSuffix,
        CodewordClass::InterDcSign,
        CodewordClass::AcLevelSuffix,
        CodewordClass::AcSign,
        CodewordClass::MvdSuffix,
        CodewordClass::MvdSign,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CodewordClass::IntraDcSuffix => "intra_dc_suffix",
            CodewordClass::IntraDcSign => "intra_dc_sign",
            CodewordClass::InterDcSuffix => "inter_dc_suffix",
            CodewordClass::InterDcSign => "inter_dc_sign",
            CodewordClass::AcLevelSuffix => "ac_level_suffix",
            CodewordClass::AcSign => "ac_sign",
            CodewordClass::MvdSuffix => "mvd_suffix",
            CodewordClass::MvdSign => "mvd_sign",
        }
    }
}

/// A set of [`CodewordClass`]es.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ClassSet(u8);

impl ClassSet {
    pub const EMPTY: ClassSet = ClassSet(0);
    /// Every DC suffix and sign bit, intra and inter.
    pub const DC: ClassSet = ClassSet(0b0000_1111);
    pub const AC: ClassSet = ClassSet(0b0011_0000);
    pub const MVD: ClassSet = ClassSet(0b1100_0000);
    pub const ALL: ClassSet = ClassSet(0xff);
    /// Intra DC value and sign.
    pub const FLC_INTRA_DC: ClassSet = ClassSet(0b0000_0011);
    /// Signs of non-intra DCs and of ACs.
    pub const FLC_SIGNS: ClassSet = ClassSet(0b0010_1000);
    /// Motion vector residual and sign.
    pub const FLC_MOTION: ClassSet = ClassSet(0b1100_0000);
    pub const PERCEPTUAL: ClassSet = ClassSet(0b1110_1011);

    pub fn from_bits(bits: u8) -> Self {
        ClassSet(bits)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, c: CodewordClass) -> bool {
        self.0 & (1 << c as u8) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: ClassSet) -> ClassSet {
        ClassSet(self.0 | other.0)
    }

    /// Parses a comma list of `dc`, `ac`, `mvd`, `all`, `none` or class names.
    pub fn parse_list(s: &str) -> Result<Self> {
        let mut set = ClassSet::EMPTY;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            set = set.union(match part.to_ascii_lowercase().as_str() {
                "dc" => ClassSet::DC,
                "ac" => ClassSet::AC,
                "mvd" => ClassSet::MVD,
                "all" => ClassSet::ALL,
                "none" => ClassSet::EMPTY,
                other => CodewordClass::ALL
                    .into_iter()
                    .find(|c| c.name() == other)
                    .map(ClassSet::from)
                    .ok_or_else(|| Error::InvalidParam(format!("unknown codeword class '{part}'")))?,
            });
        }
        Ok(set)
    }
}

impl From<CodewordClass> for ClassSet {
    fn from(c: CodewordClass) -> Self {
        ClassSet(1 << c as u8)
    }
}

impl FromIterator<CodewordClass> for ClassSet {
    fn from_iter<I: IntoIterator<Item = CodewordClass>>(iter: I) -> Self {
        iter.into_iter().fold(ClassSet::EMPTY, |s, c| s.union(c.into()))
    }
}

/// One fixed-length run of bits inside a payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    /// Bit offset from the start of the frame payload, MSB-first.
    pub bit_offset: u32,
    pub width: u8,
    pub class: CodewordClass,
    /// Stream-order macroblock unit the span belongs to.
    pub unit: u32,
}

/// Sorted, disjoint spans of every encryptable bit in a payload.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CodewordMap {
    pub spans: Vec<Span>,
}

impl CodewordMap {
    pub fn total_bits(&self, classes: ClassSet) -> usize {
        self.select(classes).map(|s| s.width as usize).sum()
    }

    pub fn total_encryptable_bits(&self) -> usize {
        self.total_bits(ClassSet::ALL)
    }

    pub fn select(&self, classes: ClassSet) -> impl Iterator<Item = &Span> + Clone + '_ {
        self.spans.iter().filter(move |s| classes.contains(s.class))
    }

    /// Per-class bit totals.
    pub fn histogram(&self) -> [(CodewordClass, usize); 8] {
        CodewordClass::ALL.map(|c| (c, self.total_bits(c.into())))
    }
}

/// Concatenates the bits of `spans`, in order.
pub fn extract_spans<'a>(payload: &[u8], spans: impl IntoIterator<Item = &'a Span>) -> BitVec {
    let mut out = BitVec::new();
    for s in spans {
        for i in 0..s.width as usize {
            out.push(get_bit(payload, s.bit_offset as usize + i));
        }
    }
    out
}

/// Writes `bits` back over `spans`.
pub fn patch_spans<'a>(
    payload: &mut [u8],
    spans: impl IntoIterator<Item = &'a Span> + Clone,
    bits: &BitVec,
) -> Result<()> {
    let expected: usize = spans.clone().into_iter().map(|s| s.width as usize).sum();
    if expected != bits.len() {
        return Err(Error::BitLength { expected, got: bits.len() });
    }
    let mut k = 0;
    for s in spans {
        for i in 0..s.width as usize {
            set_bit(payload, s.bit_offset as usize + i, bits.get(k));
            k += 1;
        }
    }
    Ok(())
}

/// Parses `payload` and returns the bits of every span in `classes`.
pub fn extract_sensitive_bits(payload: &[u8], dims: Dims, classes: ClassSet) -> Result<BitVec> {
    let parsed = parse_frame(payload, dims)?;
    Ok(extract_spans(payload, parsed.map.select(classes)))
}

/// Parses `payload` and overwrites the bits of every span in `classes`.
/// The payload length never changes.
pub fn patch_sensitive_bits(payload: &[u8], dims: Dims, classes: ClassSet, bits: &BitVec) -> Result<Vec<u8>> {
    let parsed = parse_frame(payload, dims)?;
    let mut out = payload.to_vec();
    patch_spans(&mut out, parsed.map.select(classes), bits)?;
    Ok(out)
}
