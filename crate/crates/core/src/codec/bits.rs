//! MSB-first bit I/O with unsigned Exp-Golomb codes.

use crate::{Error, Result};

/// Longest accepted Exp-Golomb prefix; larger values cannot arise from the
/// encoder and would overflow `u32`.
pub const MAX_PREFIX: u32 = 31;

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let len = bytes.len() * 8;
        Self { bytes, len }
    }

    pub fn bit_len(&self) -> usize {
        self.len
    }

    pub fn put_bit(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    pub fn put_bits(&mut self, value: u32, width: u32) {
        for i in (0..width).rev() {
            self.put_bit((value >> i) & 1 == 1);
        }
    }

    /// Writes `ue(v)`: `k` zeros, a one, then the low `k` bits of `v+1`.
    /// Returns the bit offset and width of the `k`-bit suffix.
    pub fn put_ue(&mut self, v: u32) -> (usize, u32) {
        let code = v as u64 + 1;
        let k = 63 - code.leading_zeros();
        for _ in 0..k {
            self.put_bit(false);
        }
        self.put_bit(true);
        let at = self.len;
        for i in (0..k).rev() {
            self.put_bit((code >> i) & 1 == 1);
        }
        (at, k)
    }

    /// Zero-pads to the next byte boundary.
    pub fn align(&mut self) {
        self.len = self.bytes.len() * 8;
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn at(data: &'a [u8], pos: usize) -> Self {
        Self { data, pos }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.data.len() * 8 - self.pos.min(self.data.len() * 8)
    }

    fn err(&self, msg: &'static str) -> Error {
        Error::Bitstream { pos: self.pos, msg }
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let byte = *self.data.get(self.pos / 8).ok_or_else(|| self.err("truncated stream"))?;
        let bit = (byte >> (7 - self.pos % 8)) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u32> {
        let mut v = 0u32;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u32;
        }
        Ok(v)
    }

    /// Reads `ue(v)`; returns the value, suffix offset and suffix width.
    pub fn read_ue(&mut self) -> Result<(u32, usize, u32)> {
        let mut k = 0;
        while !self.read_bit()? {
            k += 1;
            if k > MAX_PREFIX {
                return Err(self.err("Exp-Golomb prefix overrun"));
            }
        }
        let at = self.pos;
        let suffix = self.read_bits(k)? as u64;
        let v = ((1u64 << k) | suffix) - 1;
        u32::try_from(v).map(|v| (v, at, k)).map_err(|_| self.err("Exp-Golomb value overflow"))
    }

    /// Skips to the next byte boundary; padding must be zero.
    pub fn align(&mut self) -> Result<()> {
        while !self.pos.is_multiple_of(8) {
            if self.read_bit()? {
                return Err(self.err("nonzero alignment padding"));
            }
        }
        Ok(())
    }
}

/// Reads a single bit at `pos` (MSB-first).
pub fn get_bit(data: &[u8], pos: usize) -> bool {
    (data[pos / 8] >> (7 - pos % 8)) & 1 == 1
}

pub fn set_bit(data: &mut [u8], pos: usize, bit: bool) {
    let mask = 0x80 >> (pos % 8);
    if bit {
        data[pos / 8] |= mask;
    } else {
        data[pos / 8] &= !mask;
    }
}

/// A packed MSB-first bit vector.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitVec {
    bytes: Vec<u8>,
    len: usize,
}

impl BitVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut v = Self::new();
        bits.into_iter().for_each(|b| v.push(b));
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            set_bit(&mut self.bytes, self.len, true);
        }
        self.len += 1;
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        get_bit(&self.bytes, i)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| get_bit(&self.bytes, i))
    }

    /// XORs the vector with a keystream, MSB of `stream[0]` first.
    pub fn xor_with(&mut self, stream: &[u8]) {
        assert!(stream.len() * 8 >= self.len, "keystream too short");
        for (b, k) in self.bytes.iter_mut().zip(stream) {
            *b ^= k;
        }
        if !self.len.is_multiple_of(8) {
            let last = self.bytes.len() - 1;
            self.bytes[last] &= 0xffu8 << (8 - self.len % 8);
        }
    }

    pub fn invert(&mut self) {
        self.xor_with(&vec![0xff; self.bytes.len()]);
    }
}
