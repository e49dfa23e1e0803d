//! A small block-DCT codec with individually addressable codewords.
//!
//! Frames are coded as independent, byte-aligned 16x16 macroblock units
//! (absolute DCs, zero motion-vector predictor), and every fixed-length
//! codeword bit is indexed in a [`CodewordMap`]. That makes two
//! bitstream-level operations lossless and format-preserving: reordering
//! units within a frame, and rewriting suffix/sign bits in place.

pub mod bits;
mod codeword;
pub mod dct;
mod frame;
pub mod motion;
pub mod quant;
pub mod syntax;
mod video;

pub use codeword::{
    extract_sensitive_bits, extract_spans, patch_sensitive_bits, patch_spans, ClassSet, CodewordClass,
    CodewordMap, Span,
};
pub use dct::{dct8x8_forward, dct8x8_inverse};
pub use frame::{analyze_frame, decode_frame, encode_frame, reconstruct, EncodedFrame};
pub use motion::{motion_search, MotionVector};
pub use quant::{dequantize_block, quantize_block, QuantBlock};
pub use syntax::{parse_frame, write_frame, FrameSyntax, ParsedFrame, UnitSyntax};
pub use video::{decode_svc, decode_video, encode_svc, encode_video, DEFAULT_GOP, DEFAULT_QP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub width: usize,
    pub height: usize,
}

impl Dims {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    pub const fn area(self) -> usize {
        self.width * self.height
    }

    pub const fn macroblocks(self) -> usize {
        (self.width / 16) * (self.height / 16)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum FrameType {
    I = 0,
    P = 1,
}
