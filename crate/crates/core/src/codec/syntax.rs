//! Frame payload syntax (full layout in `docs/bitstream.md` at the repo root).
//!
//! ```text
//! frame  := type:u8 qp:u8 unit{M}
//! unit   := [inter:1 (P frames only)] [mvd_x mvd_y (inter)] block{4} pad-to-byte
//! mvd    := ue(|d|) [sign:1 if d != 0]
//! block  := ue(|dc|) [sign:1 if dc != 0] { ue(run+1) ue(|level|-1) sign:1 } ue(0)
//! ```
//!
//! Units are byte-aligned and never refer to other units, so they can be
//! cut out and reordered without re-encoding.

use std::ops::Range;

use super::bits::{BitReader, BitWriter};
use super::codeword::{CodewordClass, CodewordMap, Span};
use super::motion::MotionVector;
use super::quant::QuantBlock;
use super::{Dims, FrameType};
use crate::{Error, Result};

pub const FRAME_HEADER_BYTES: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSyntax {
    pub inter: bool,
    /// Coded motion vector difference; the predictor is always (0, 0).
    pub mvd: MotionVector,
    /// Luma blocks: top-left, top-right, bottom-left, bottom-right.
    pub blocks: [QuantBlock; 4],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSyntax {
    pub frame_type: FrameType,
    pub qp: u8,
    pub units: Vec<UnitSyntax>,
}

#[derive(Debug, Clone)]
pub struct ParsedFrame {
    pub syntax: FrameSyntax,
    pub map: CodewordMap,
    /// Byte range of each unit in stream order.
    pub units: Vec<Range<usize>>,
}

struct SpanSink {
    spans: Vec<Span>,
    unit: u32,
}

impl SpanSink {
    fn add(&mut self, at: usize, width: u32, class: CodewordClass) {
        if width > 0 {
            self.spans.push(Span { bit_offset: at as u32, width: width as u8, class, unit: self.unit });
        }
    }
}

fn put_signed(w: &mut BitWriter, sink: &mut SpanSink, v: i32, suffix: CodewordClass, sign: CodewordClass) {
    let (at, k) = w.put_ue(v.unsigned_abs());
    sink.add(at, k, suffix);
    if v != 0 {
        sink.add(w.bit_len(), 1, sign);
        w.put_bit(v < 0);
    }
}

fn put_block(w: &mut BitWriter, sink: &mut SpanSink, b: &QuantBlock, inter: bool) {
    let (dc_suffix, dc_sign) = if inter {
        (CodewordClass::InterDcSuffix, CodewordClass::InterDcSign)
    } else {
        (CodewordClass::IntraDcSuffix, CodewordClass::IntraDcSign)
    };
    put_signed(w, sink, b.levels[0], dc_suffix, dc_sign);
    let mut run = 0u32;
    for &l in &b.levels[1..] {
        if l == 0 {
            run += 1;
            continue;
        }
        w.put_ue(run + 1);
        let (at, k) = w.put_ue(l.unsigned_abs() - 1);
        sink.add(at, k, CodewordClass::AcLevelSuffix);
        sink.add(w.bit_len(), 1, CodewordClass::AcSign);
        w.put_bit(l < 0);
        run = 0;
    }
    w.put_ue(0);
}

/// Serializes frame syntax. Returns the payload, its codeword map and the
/// byte range of every unit.
pub fn write_frame(frame: &FrameSyntax) -> (Vec<u8>, CodewordMap, Vec<Range<usize>>) {
    let mut w = BitWriter::new();
    w.put_bits(frame.frame_type as u32, 8);
    w.put_bits(frame.qp as u32, 8);
    let mut sink = SpanSink { spans: Vec::new(), unit: 0 };
    let mut ranges = Vec::with_capacity(frame.units.len());
    for (i, u) in frame.units.iter().enumerate() {
        debug_assert!(frame.frame_type == FrameType::P || !u.inter, "inter unit in I frame");
        sink.unit = i as u32;
        let start = w.bit_len() / 8;
        if frame.frame_type == FrameType::P {
            w.put_bit(u.inter);
        }
        if u.inter {
            put_signed(&mut w, &mut sink, u.mvd.dx, CodewordClass::MvdSuffix, CodewordClass::MvdSign);
            put_signed(&mut w, &mut sink, u.mvd.dy, CodewordClass::MvdSuffix, CodewordClass::MvdSign);
        }
        for b in &u.blocks {
            put_block(&mut w, &mut sink, b, u.inter);
        }
        w.align();
        ranges.push(start..w.bit_len() / 8);
    }
    (w.into_bytes(), CodewordMap { spans: sink.spans }, ranges)
}

fn read_signed(
    r: &mut BitReader,
    sink: &mut SpanSink,
    suffix: CodewordClass,
    sign: CodewordClass,
) -> Result<i64> {
    let (mag, at, k) = r.read_ue()?;
    sink.add(at, k, suffix);
    if mag == 0 {
        return Ok(0);
    }
    sink.add(r.pos(), 1, sign);
    let neg = r.read_bit()?;
    Ok(if neg { -(mag as i64) } else { mag as i64 })
}

fn read_block(r: &mut BitReader, sink: &mut SpanSink, inter: bool) -> Result<QuantBlock> {
    let (dc_suffix, dc_sign) = if inter {
        (CodewordClass::InterDcSuffix, CodewordClass::InterDcSign)
    } else {
        (CodewordClass::IntraDcSuffix, CodewordClass::IntraDcSign)
    };
    let mut b = QuantBlock::default();
    b.levels[0] = clamp_level(read_signed(r, sink, dc_suffix, dc_sign)?);
    let mut pos = 1usize;
    loop {
        let (code, _, _) = r.read_ue()?;
        if code == 0 {
            return Ok(b);
        }
        pos += code as usize - 1;
        if pos > 63 {
            return Err(Error::Bitstream { pos: r.pos(), msg: "AC run past end of block" });
        }
        let (m, at, k) = r.read_ue()?;
        sink.add(at, k, CodewordClass::AcLevelSuffix);
        sink.add(r.pos(), 1, CodewordClass::AcSign);
        let mag = m as i64 + 1;
        b.levels[pos] = clamp_level(if r.read_bit()? { -mag } else { mag });
        pos += 1;
    }
}

// Decoded magnitudes can exceed anything the encoder emits once bits are
// rewritten; keep them representable.
fn clamp_level(v: i64) -> i32 {
    v.clamp(i32::MIN as i64 + 1, i32::MAX as i64) as i32
}

fn clamp_mv(v: i64) -> i32 {
    v.clamp(-(1 << 20), 1 << 20) as i32
}

/// Parses a frame payload. Total over byte strings: malformed input yields
/// an error, never a panic.
pub fn parse_frame(payload: &[u8], dims: Dims) -> Result<ParsedFrame> {
    let unit_count = dims.macroblocks();
    if payload.len() < FRAME_HEADER_BYTES {
        return Err(Error::Bitstream { pos: 0, msg: "truncated frame header" });
    }
    let frame_type = match payload[0] {
        0 => FrameType::I,
        1 => FrameType::P,
        _ => return Err(Error::Bitstream { pos: 0, msg: "invalid frame type" }),
    };
    let qp = payload[1];
    if !(1..=31).contains(&qp) {
        return Err(Error::Bitstream { pos: 8, msg: "invalid qp" });
    }
    let mut r = BitReader::at(payload, FRAME_HEADER_BYTES * 8);
    let mut sink = SpanSink { spans: Vec::new(), unit: 0 };
    let mut units = Vec::with_capacity(unit_count.min(payload.len()));
    let mut ranges = Vec::with_capacity(unit_count.min(payload.len()));
    for i in 0..unit_count {
        if r.remaining() == 0 {
            return Err(Error::Bitstream { pos: r.pos(), msg: "unit count mismatch: stream ends early" });
        }
        sink.unit = i as u32;
        let start = r.pos() / 8;
        let inter = frame_type == FrameType::P && r.read_bit()?;
        let mut mvd = MotionVector::default();
        if inter {
            mvd.dx = clamp_mv(read_signed(&mut r, &mut sink, CodewordClass::MvdSuffix, CodewordClass::MvdSign)?);
            mvd.dy = clamp_mv(read_signed(&mut r, &mut sink, CodewordClass::MvdSuffix, CodewordClass::MvdSign)?);
        }
        let mut blocks = [QuantBlock::default(); 4];
        for b in blocks.iter_mut() {
            *b = read_block(&mut r, &mut sink, inter)?;
        }
        r.align()?;
        ranges.push(start..r.pos() / 8);
        units.push(UnitSyntax { inter, mvd, blocks });
    }
    if r.remaining() != 0 {
        return Err(Error::Bitstream { pos: r.pos(), msg: "unit count mismatch: trailing data" });
    }
    Ok(ParsedFrame {
        syntax: FrameSyntax { frame_type, qp, units },
        map: CodewordMap { spans: sink.spans },
        units: ranges,
    })
}

/// Reassembles a payload with its units in a new order:
/// output unit `k` is input unit `order[k]`.
pub fn reorder_units(payload: &[u8], units: &[Range<usize>], order: &[usize]) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload.len());
    out.extend_from_slice(&payload[..FRAME_HEADER_BYTES]);
    for &k in order {
        out.extend_from_slice(&payload[units[k].clone()]);
    }
    out
}
