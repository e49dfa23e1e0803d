//! Keyed randomness: AES-CTR keystreams, keyed Fisher-Yates permutations and
//! the AES-GCM wrapping of the shuffle key that travels in the file header.

use aes::cipher::{KeyIvInit, StreamCipher, StreamCipherSeek};
use aes::Aes128;
use aes_gcm::aead::consts::U12;
use aes_gcm::aead::{Aead, KeyInit, Payload};
use aes_gcm::{Aes128Gcm, Aes256Gcm, AesGcm, Nonce};
use rand::rngs::OsRng;
use rand::RngCore;

use crate::{Error, Result};

type Aes128Ctr = ctr::Ctr32BE<Aes128>;
type Aes192Gcm = AesGcm<aes::Aes192, U12>;

/// AES master key: 16, 24 or 32 bytes.
#[derive(Clone, PartialEq, Eq)]
pub struct MasterKey(Vec<u8>);

impl MasterKey {
    pub fn new(bytes: &[u8]) -> Result<Self> {
        match bytes.len() {
            16 | 24 | 32 => Ok(Self(bytes.to_vec())),
            n => Err(Error::KeyLength(n)),
        }
    }

    /// 32, 48 or 64 hex characters.
    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s.trim())
            .map_err(|e| Error::InvalidParam(format!("master key is not hex: {e}")))?;
        Self::new(&bytes)
    }

    pub fn generate(len: usize) -> Result<Self> {
        let mut bytes = vec![0u8; len];
        OsRng.fill_bytes(&mut bytes);
        Self::new(&bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl std::fmt::Debug for MasterKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MasterKey({} bits)", self.0.len() * 8)
    }
}

pub const SHUFFLE_KEY_LEN: usize = 44;
pub const KEY_BLOB_LEN: usize = 12 + SHUFFLE_KEY_LEN + 16;

/// Per-encryption secret: seeds for the frame and block permutations and a
/// stream nonce.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct ShuffleKey {
    pub frame_seed: [u8; 16],
    pub block_seed: [u8; 16],
    pub stream_nonce: [u8; 12],
}

impl ShuffleKey {
    pub fn generate() -> Self {
        let mut k = ShuffleKey { frame_seed: [0; 16], block_seed: [0; 16], stream_nonce: [0; 12] };
        OsRng.fill_bytes(&mut k.frame_seed);
        OsRng.fill_bytes(&mut k.block_seed);
        OsRng.fill_bytes(&mut k.stream_nonce);
        k
    }

    /// `frame_seed ‖ block_seed ‖ stream_nonce`.
    pub fn to_bytes(&self) -> [u8; SHUFFLE_KEY_LEN] {
        let mut out = [0u8; SHUFFLE_KEY_LEN];
        out[..16].copy_from_slice(&self.frame_seed);
        out[16..32].copy_from_slice(&self.block_seed);
        out[32..].copy_from_slice(&self.stream_nonce);
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        if b.len() != SHUFFLE_KEY_LEN {
            return Err(Error::LengthMismatch(b.len(), SHUFFLE_KEY_LEN));
        }
        Ok(ShuffleKey {
            frame_seed: b[..16].try_into().unwrap(),
            block_seed: b[16..32].try_into().unwrap(),
            stream_nonce: b[32..].try_into().unwrap(),
        })
    }
}

impl std::fmt::Debug for ShuffleKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ShuffleKey(..)")
    }
}

/// AES-GCM ciphertext of a serialized [`ShuffleKey`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyBlob {
    pub nonce: [u8; 12],
    /// Ciphertext followed by the 16-byte tag.
    pub sealed: Vec<u8>,
}

impl KeyBlob {
    pub fn to_bytes(&self) -> Vec<u8> {
        [&self.nonce[..], &self.sealed].concat()
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        if b.len() != KEY_BLOB_LEN {
            return Err(Error::WrongKey);
        }
        Ok(KeyBlob { nonce: b[..12].try_into().unwrap(), sealed: b[12..].to_vec() })
    }
}

fn seal<C: Aead + KeyInit>(key: &[u8], nonce: &[u8; 12], msg: &[u8], aad: &[u8]) -> Vec<u8> {
    C::new_from_slice(key)
        .expect("master key length checked")
        .encrypt(Nonce::from_slice(nonce), Payload { msg, aad })
        .expect("AES-GCM encryption of a short message cannot fail")
}

fn open<C: Aead + KeyInit>(key: &[u8], nonce: &[u8; 12], msg: &[u8], aad: &[u8]) -> Result<Vec<u8>> {
    C::new_from_slice(key)
        .expect("master key length checked")
        .decrypt(Nonce::from_slice(nonce), Payload { msg, aad })
        .map_err(|_| Error::WrongKey)
}

/// Seals `shuffle` under `master` with a fresh random nonce. `context` is
/// authenticated but not encrypted.
pub fn wrap_shuffle_key(master: &MasterKey, shuffle: &ShuffleKey, context: &[u8]) -> KeyBlob {
    let mut nonce = [0u8; 12];
    OsRng.fill_bytes(&mut nonce);
    let pt = shuffle.to_bytes();
    let k = master.as_bytes();
    let sealed = match k.len() {
        16 => seal::<Aes128Gcm>(k, &nonce, &pt, context),
        24 => seal::<Aes192Gcm>(k, &nonce, &pt, context),
        _ => seal::<Aes256Gcm>(k, &nonce, &pt, context),
    };
    KeyBlob { nonce, sealed }
}

/// Fails with [`Error::WrongKey`] unless `blob` authenticates under `master`
/// and `context`.
pub fn unwrap_shuffle_key(master: &MasterKey, blob: &KeyBlob, context: &[u8]) -> Result<ShuffleKey> {
    let k = master.as_bytes();
    let pt = match k.len() {
        16 => open::<Aes128Gcm>(k, &blob.nonce, &blob.sealed, context)?,
        24 => open::<Aes192Gcm>(k, &blob.nonce, &blob.sealed, context)?,
        _ => open::<Aes256Gcm>(k, &blob.nonce, &blob.sealed, context)?,
    };
    ShuffleKey::from_bytes(&pt)
}

fn counter_block(tag: &[u8]) -> [u8; 16] {
    let mut iv = [0u8; 16];
    let n = tag.len().min(12);
    iv[..n].copy_from_slice(&tag[..n]);
    iv
}

/// AES-128-CTR keystream. The counter block is the domain tag zero-padded
/// to 16 bytes whose last 4 bytes are replaced by a big-endian block counter
/// starting at 0 (tag bytes past the 12th are ignored).
pub fn keyed_stream(seed: &[u8; 16], tag: &[u8], len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    xor_keyed_stream(seed, tag, &mut out);
    out
}

/// XORs [`keyed_stream`]`(seed, tag, data.len())` into `data`.
pub fn xor_keyed_stream(seed: &[u8; 16], tag: &[u8], data: &mut [u8]) {
    let mut c = Aes128Ctr::new(seed.into(), &counter_block(tag).into());
    c.apply_keystream(data);
}

/// XORs the keystream starting at byte `offset` into `data`, so that
/// disjoint slices of one long stream can be processed independently.
pub fn xor_keyed_stream_at(seed: &[u8; 16], tag: &[u8], offset: u64, data: &mut [u8]) {
    let mut c = Aes128Ctr::new(seed.into(), &counter_block(tag).into());
    c.seek(offset);
    c.apply_keystream(data);
}

/// Concatenates a textual tag and a big-endian index.
pub fn indexed_tag(tag: &[u8], index: u32) -> Vec<u8> {
    [tag, &index.to_be_bytes()].concat()
}

/// Incremental keystream reader.
struct StreamReader {
    cipher: Aes128Ctr,
    buf: [u8; 64],
    pos: usize,
}

impl StreamReader {
    fn new(seed: &[u8; 16], tag: &[u8]) -> Self {
        Self { cipher: Aes128Ctr::new(seed.into(), &counter_block(tag).into()), buf: [0; 64], pos: 64 }
    }

    fn next_u32(&mut self) -> u32 {
        if self.pos == 64 {
            self.buf = [0; 64];
            self.cipher.apply_keystream(&mut self.buf);
            self.pos = 0;
        }
        let w = u32::from_be_bytes(self.buf[self.pos..self.pos + 4].try_into().unwrap());
        self.pos += 4;
        w
    }

    /// Uniform draw from `0..bound` by rejection.
    fn below(&mut self, bound: u32) -> u32 {
        let bound64 = bound as u64;
        let limit = (1u64 << 32) / bound64 * bound64;
        loop {
            let w = self.next_u32() as u64;
            if w < limit {
                return (w % bound64) as u32;
            }
        }
    }
}

/// A bijection on `0..n`: `mapping[i]` is where source index `i` goes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { mapping: (0..n as u32).collect() }
    }

    pub fn from_mapping(mapping: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &d in &mapping {
            let slot = seen.get_mut(d as usize).ok_or_else(|| Error::InvalidParam("mapping out of range".into()))?;
            if std::mem::replace(slot, true) {
                return Err(Error::InvalidParam("mapping is not a bijection".into()));
            }
        }
        Ok(Self { mapping })
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[u32] {
        &self.mapping
    }

    pub fn dest(&self, i: usize) -> usize {
        self.mapping[i] as usize
    }

    /// `out[mapping[i]] = items[i]`.
    pub fn apply<T: Clone>(&self, items: &[T]) -> Vec<T> {
        assert_eq!(items.len(), self.len(), "permutation length mismatch");
        let mut slots: Vec<Option<T>> = vec![None; items.len()];
        for (i, item) in items.iter().enumerate() {
            slots[self.dest(i)] = Some(item.clone());
        }
        slots.into_iter().map(Option::unwrap).collect()
    }

    /// Source index that lands at each output position.
    pub fn sources(&self) -> Vec<usize> {
        invert_permutation(self).mapping.iter().map(|&s| s as usize).collect()
    }
}

/// Keyed Fisher-Yates: start from the identity and, for `i` from `n-1` down
/// to 1, swap slot `i` with slot `j`, `j` uniform in `0..=i`. Each `j` comes
/// from big-endian 32-bit keystream words, rejecting `w >= floor(2^32/(i+1))*(i+1)`.
/// The final array is the mapping.
pub fn derive_permutation(seed: &[u8; 16], tag: &[u8], n: usize) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    let n32 = u32::try_from(n).map_err(|_| Error::InvalidParam("permutation too large".into()))?;
    let mut mapping: Vec<u32> = (0..n32).collect();
    let mut stream = StreamReader::new(seed, tag);
    for i in (1..n).rev() {
        let j = stream.below(i as u32 + 1) as usize;
        mapping.swap(i, j);
    }
    Ok(Permutation { mapping })
}

pub fn invert_permutation(p: &Permutation) -> Permutation {
    let mut inv = vec![0u32; p.len()];
    for (i, &d) in p.mapping.iter().enumerate() {
        inv[d as usize] = i as u32;
    }
    Permutation { mapping: inv }
}
