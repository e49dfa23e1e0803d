//! Known-plaintext attacks on the permutation schemes.
//!
//! Every observation is a pair of rows `(plain, cipher)` related by one
//! unknown permutation `cipher[pi(i)] = plain[i]`. Source index `i` can map
//! to destination `j` only if the two carry equal values in every row, so
//! the surviving candidates form equivalence classes. They are tracked by
//! partition refinement: each index carries a class label, and each row
//! splits labels by value.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::codec::syntax::parse_frame;
use crate::codec::{analyze_frame, reconstruct, Dims};
use crate::container::{CodecId, SchemeId, SvcFile};
use crate::keys::Permutation;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationClasses {
    src_label: Vec<u32>,
    dst_label: Vec<u32>,
    /// Destination indices of every label, ascending.
    members: Vec<Vec<u32>>,
}

impl PermutationClasses {
    /// No observations: every source may go anywhere.
    pub fn unconstrained(n: usize) -> Self {
        let members = if n == 0 { Vec::new() } else { vec![(0..n as u32).collect()] };
        Self { src_label: vec![0; n], dst_label: vec![0; n], members }
    }

    pub fn len(&self) -> usize {
        self.src_label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.src_label.is_empty()
    }

    /// Destinations still possible for source `i`.
    pub fn candidates(&self, i: usize) -> &[u32] {
        &self.members[self.src_label[i] as usize]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.src_label[i] == self.dst_label[j]
    }

    pub fn class_count(&self) -> usize {
        self.members.len()
    }

    pub fn singletons(&self) -> usize {
        self.src_label.iter().filter(|&&l| self.members[l as usize].len() == 1).count()
    }

    /// Fraction of sources whose destination is pinned down.
    pub fn recovery_rate(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.singletons() as f64 / self.len() as f64
    }

    pub fn is_unique(&self) -> bool {
        self.singletons() == self.len()
    }

    /// The recovered permutation, if it is unique.
    pub fn permutation(&self) -> Option<Permutation> {
        if !self.is_unique() {
            return None;
        }
        let mapping = self.src_label.iter().map(|&l| self.members[l as usize][0]).collect();
        Permutation::from_mapping(mapping).ok()
    }

    /// Splits classes by one observed row pair.
    pub fn refine<T: Hash + Eq + Copy>(&mut self, plain: &[T], cipher: &[T]) -> Result<()> {
        if plain.len() != self.len() || cipher.len() != self.len() {
            return Err(Error::LengthMismatch(self.len(), plain.len().max(cipher.len())));
        }
        let mut ids: HashMap<(u32, T), u32> = HashMap::new();
        for (l, &v) in self.src_label.iter_mut().zip(plain) {
            let next = ids.len() as u32;
            *l = *ids.entry((*l, v)).or_insert(next);
        }
        for (l, &v) in self.dst_label.iter_mut().zip(cipher) {
            // a destination whose (label, value) never occurs on the source
            // side cannot be the image of anything
            match ids.get(&(*l, v)) {
                Some(&id) => *l = id,
                None => return Err(Error::NotPermutationPair),
            }
        }
        self.rebuild()
    }

    /// Combines the constraints of two independent analyses.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        let mut out = self.clone();
        out.refine(&other.src_label, &other.dst_label)?;
        Ok(out)
    }

    fn rebuild(&mut self) -> Result<()> {
        let labels = self.src_label.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut members = vec![Vec::new(); labels];
        let mut sources = vec![0usize; labels];
        for &l in &self.src_label {
            sources[l as usize] += 1;
        }
        for (j, &l) in self.dst_label.iter().enumerate() {
            members
                .get_mut(l as usize)
                .ok_or(Error::NotPermutationPair)?
                .push(j as u32);
        }
        if members.iter().zip(&sources).any(|(m, &s)| m.len() != s) {
            return Err(Error::NotPermutationPair);
        }
        self.members = members;
        Ok(())
    }
}

/// Candidate destinations from one known frame of a byte-permutation cipher.
pub fn kpa_byte_permutation(plain: &[u8], cipher: &[u8]) -> Result<PermutationClasses> {
    if plain.len() != cipher.len() {
        return Err(Error::LengthMismatch(plain.len(), cipher.len()));
    }
    let mut a = plain.to_vec();
    let mut b = cipher.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(Error::NotPermutationPair);
    }
    let mut c = PermutationClasses::unconstrained(plain.len());
    c.refine(plain, cipher)?;
    Ok(c)
}

/// Intersects [`kpa_byte_permutation`] over several known pairs.
pub fn kpa_byte_permutation_multi(pairs: &[(&[u8], &[u8])]) -> Result<PermutationClasses> {
    let (first, rest) = pairs.split_first().ok_or(Error::EmptyVideo)?;
    let mut c = kpa_byte_permutation(first.0, first.1)?;
    for &(p, q) in rest {
        c = c.intersect(&kpa_byte_permutation(p, q)?)?;
    }
    Ok(c)
}

/// Undoes the permutation on ciphertext frames as far as it is known.
/// Ambiguous sources take their smallest candidate. Returns the frames and
/// the fraction of bytes that are placed provably correctly.
pub fn apply_recovered(classes: &PermutationClasses, cipher_frames: &[Vec<u8>]) -> Result<(Vec<Vec<u8>>, f64)> {
    let n = classes.len();
    if let Some(f) = cipher_frames.iter().find(|f| f.len() != n) {
        return Err(Error::LengthMismatch(n, f.len()));
    }
    let pick: Vec<usize> = (0..n).map(|i| classes.candidates(i)[0] as usize).collect();
    let frames = cipher_frames.iter().map(|f| pick.iter().map(|&j| f[j]).collect()).collect();
    Ok((frames, classes.recovery_rate()))
}

/// Recovers the crisscross coefficient permutation from the first
/// `known_raws.len()` frames of the source video. The known frames are
/// re-encoded with the public codec (frame types are read from the
/// ciphertext headers) and every block contributes one row pair.
pub fn kpa_coefficient_permutation(
    known_raws: &[Vec<u8>],
    encrypted: &SvcFile,
    qp: u8,
) -> Result<PermutationClasses> {
    if encrypted.header.scheme != SchemeId::Crisscross || encrypted.header.codec != CodecId::Dct {
        return Err(Error::InvalidParam(format!(
            "coefficient attack needs a crisscross DCT file, got {}",
            encrypted.header.scheme
        )));
    }
    if known_raws.len() > encrypted.frame_count() {
        return Err(Error::LengthMismatch(encrypted.frame_count(), known_raws.len()));
    }
    let dims = Dims::new(encrypted.header.width as usize, encrypted.header.height as usize);
    let mut classes = PermutationClasses::unconstrained(64);
    let mut reference: Option<Vec<u8>> = None;
    for (raw, rec) in known_raws.iter().zip(&encrypted.records) {
        let cipher = parse_frame(&rec.video, dims)?.syntax;
        let plain = analyze_frame(raw, dims, reference.as_deref(), qp, cipher.frame_type)?;
        if plain.units.len() != cipher.units.len() {
            return Err(Error::LengthMismatch(plain.units.len(), cipher.units.len()));
        }
        for (pu, cu) in plain.units.iter().zip(&cipher.units) {
            for (pb, cb) in pu.blocks.iter().zip(&cu.blocks) {
                classes.refine(&pb.levels, &cb.levels)?;
            }
        }
        reference = Some(reconstruct(&plain, dims, reference.as_deref()));
    }
    Ok(classes)
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub scheme: SchemeId,
    pub known_frames: usize,
    pub recovery_rate: f64,
    pub unique: bool,
    /// Set when the known pairs violate the permutation premise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precondition_failure: Option<String>,
}

impl AttackReport {
    fn failed(scheme: SchemeId, known_frames: usize, e: Error) -> Self {
        Self { scheme, known_frames, recovery_rate: 0.0, unique: false, precondition_failure: Some(e.to_string()) }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the attack that fits the file's scheme, pairing the first `known`
/// plaintext frames with the ciphertext records at the same positions.
///
/// `plain` holds the attacker's known material: raw frames (a `RAW` file)
/// for pure and crisscross, or the unencrypted payloads for byte attacks
/// on any other scheme.
pub fn attack_file(plain: &SvcFile, encrypted: &SvcFile, known: usize) -> Result<AttackReport> {
    let scheme = encrypted.header.scheme;
    if !encrypted.header.is_encrypted() {
        return Err(Error::NotEncrypted);
    }
    let known = known.min(plain.frame_count()).min(encrypted.frame_count());
    if known == 0 {
        return Err(Error::EmptyVideo);
    }
    let outcome = match scheme {
        SchemeId::Crisscross => {
            if plain.header.codec != CodecId::Raw {
                return Err(Error::InvalidParam("coefficient attack needs raw known frames".into()));
            }
            let raws: Vec<Vec<u8>> = plain.records[..known].iter().map(|r| r.video.clone()).collect();
            // the quantizer is public: it sits in every frame header
            let qp = encrypted.records[0].video.get(1).copied().unwrap_or(0);
            kpa_coefficient_permutation(&raws, encrypted, qp)
        }
        _ => {
            let pairs: Vec<(&[u8], &[u8])> = plain.records[..known]
                .iter()
                .zip(&encrypted.records)
                .map(|(p, c)| (p.video.as_slice(), c.video.as_slice()))
                .collect();
            kpa_byte_permutation_multi(&pairs)
        }
    };
    Ok(match outcome {
        Ok(c) => AttackReport {
            scheme,
            known_frames: known,
            recovery_rate: c.recovery_rate(),
            unique: c.is_unique(),
            precondition_failure: None,
        },
        Err(e @ (Error::NotPermutationPair | Error::LengthMismatch(..))) => AttackReport::failed(scheme, known, e),
        Err(e) => return Err(e),
    })
}
