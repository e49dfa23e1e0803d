//! Selective video encryption toolkit.
//!
//! A small block-DCT codec whose codewords are individually addressable, a
//! frame container that keeps each frame's audio attached to it, and a set of
//! encryption schemes built on top of them: keyed frame shuffling with
//! macroblock jumbling and AES on sensitive codewords, plus the classic
//! full-stream, pure-scrambling, crisscross, choose-and-encrypt and
//! perceptual schemes it is measured against. Known-plaintext attacks and a
//! metrics harness reproduce the usual comparison tables.

pub mod attack;
pub mod cli;
pub mod codec;
pub mod container;
mod error;
pub mod keys;
pub mod metrics;
pub mod par;
pub mod schemes;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
