use super::{CodecId, FrameRecord, SchemeId, SvcFile, SvcHeader};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SVC1";
pub const VERSION: u8 = 1;
pub const FLAG_ENCRYPTED: u8 = 0x01;

pub const FIXED_HEADER_LEN: usize = 28;
pub const INDEX_ENTRY_LEN: usize = 16;

/// Serializes `file` to its canonical byte form: header, key blob, index
/// table, then each record's video and audio payloads back to back.
pub fn serialize_svc(file: &SvcFile) -> Vec<u8> {
    let h = &file.header;
    let n = file.records.len();
    let payload_len: usize = file.records.iter().map(|r| r.video.len() + r.audio.len()).sum();
    let index_start = FIXED_HEADER_LEN + h.key_blob.len();
    let mut offset = (index_start + n * INDEX_ENTRY_LEN) as u64;

    let mut out = Vec::with_capacity(offset as usize + payload_len);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(h.codec as u8);
    out.push(h.scheme as u8);
    out.push(h.flags);
    out.extend_from_slice(&h.width.to_le_bytes());
    out.extend_from_slice(&h.height.to_le_bytes());
    out.extend_from_slice(&h.fps_num.to_le_bytes());
    out.extend_from_slice(&h.fps_den.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&h.sample_rate.to_le_bytes());
    out.push(h.channels);
    out.push(h.bits_per_sample);
    out.extend_from_slice(&(h.key_blob.len() as u16).to_le_bytes());
    out.extend_from_slice(&h.key_blob);
    for r in &file.records {
        out.extend_from_slice(&offset.to_le_bytes());
        out.extend_from_slice(&(r.video.len() as u32).to_le_bytes());
        out.extend_from_slice(&(r.audio.len() as u32).to_le_bytes());
        offset += (r.video.len() + r.audio.len()) as u64;
    }
    for r in &file.records {
        out.extend_from_slice(&r.video);
        out.extend_from_slice(&r.audio);
    }
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or(Error::Truncated(what))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self, what: &'static str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &'static str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &'static str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

/// Parses an SVC byte stream. Never panics on arbitrary input.
pub fn parse_svc(bytes: &[u8]) -> Result<SvcFile> {
    let mut c = Cursor { buf: bytes, pos: 0 };
    if c.take(4, "magic")? != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = c.u8("header")?;
    if version != VERSION {
        return Err(Error::Version(version));
    }
    let codec = CodecId::try_from(c.u8("header")?)?;
    let scheme = SchemeId::try_from(c.u8("header")?)?;
    let flags = c.u8("header")?;
    let width = c.u16("header")?;
    let height = c.u16("header")?;
    let fps_num = c.u16("header")?;
    let fps_den = c.u16("header")?;
    let frame_count = c.u32("header")? as usize;
    let sample_rate = c.u32("header")?;
    let channels = c.u8("header")?;
    let bits_per_sample = c.u8("header")?;
    let key_blob_len = c.u16("header")? as usize;
    let key_blob = c.take(key_blob_len, "key blob")?.to_vec();

    if flags & !FLAG_ENCRYPTED != 0 {
        return Err(Error::InconsistentHeader("reserved flag bits set"));
    }
    if (flags & FLAG_ENCRYPTED != 0) != !key_blob.is_empty() {
        return Err(Error::InconsistentHeader("key blob present iff encrypted flag set"));
    }
    if (scheme == SchemeId::None) == (flags & FLAG_ENCRYPTED != 0) {
        return Err(Error::InconsistentHeader("scheme id disagrees with encrypted flag"));
    }
    if channels > 1 || bits_per_sample != 16 {
        return Err(Error::InconsistentHeader("audio must be 16-bit mono or absent"));
    }
    if fps_den == 0 {
        return Err(Error::InconsistentHeader("zero frame-rate denominator"));
    }

    // Bound the allocation by what the file can actually hold.
    let index_len = frame_count
        .checked_mul(INDEX_ENTRY_LEN)
        .filter(|&l| l <= bytes.len().saturating_sub(c.pos))
        .ok_or(Error::Truncated("index table"))?;
    let mut index = Cursor { buf: c.take(index_len, "index table")?, pos: 0 };

    let mut records = Vec::with_capacity(frame_count);
    for i in 0..frame_count {
        let offset = index.u64("index table")?;
        let video_len = index.u32("index table")? as u64;
        let audio_len = index.u32("index table")? as u64;
        let end = offset
            .checked_add(video_len)
            .and_then(|e| e.checked_add(audio_len))
            .ok_or(Error::PayloadOverflow(i))?;
        if end > bytes.len() as u64 {
            return Err(Error::IndexOutOfBounds(i));
        }
        if !audio_len.is_multiple_of(2) || (channels == 0 && audio_len != 0) {
            return Err(Error::InconsistentHeader("audio payload is not whole 16-bit samples"));
        }
        let (o, v) = (offset as usize, video_len as usize);
        records.push(FrameRecord {
            original_index: i as u32,
            video: bytes[o..o + v].to_vec(),
            audio: bytes[o + v..end as usize].to_vec(),
        });
    }

    Ok(SvcFile {
        header: SvcHeader {
            codec,
            scheme,
            flags,
            width,
            height,
            fps_num,
            fps_den,
            sample_rate,
            channels,
            bits_per_sample,
            key_blob,
        },
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::AudioTrack;
    use proptest::prelude::*;

    fn empty() -> SvcFile {
        SvcFile::assemble(CodecId::Raw, 64, 64, 25, 1, Vec::new(), &AudioTrack::default())
    }

    #[test]
    fn header_only_round_trip() {
        let f = empty();
        let bytes = serialize_svc(&f);
        assert_eq!(bytes.len(), FIXED_HEADER_LEN);
        assert_eq!(parse_svc(&bytes).unwrap(), f);
    }

    #[test]
    fn bad_magic() {
        let mut bytes = serialize_svc(&empty());
        bytes[..4].copy_from_slice(b"XVC1");
        assert!(matches!(parse_svc(&bytes), Err(Error::BadMagic)));
    }

    #[test]
    fn key_blob_without_flag_is_inconsistent() {
        let mut f = empty();
        f.header.key_blob = vec![1, 2, 3];
        let err = parse_svc(&serialize_svc(&f)).unwrap_err();
        assert!(matches!(err, Error::InconsistentHeader(_)), "{err}");
        assert!(err.to_string().starts_with("inconsistent header"));
    }

    #[test]
    fn version_mismatch() {
        let mut bytes = serialize_svc(&empty());
        bytes[4] = 2;
        assert!(matches!(parse_svc(&bytes), Err(Error::Version(2))));
    }

    #[test]
    fn index_outside_file() {
        let audio = AudioTrack { sample_rate: 8000, samples: vec![1, 2, 3, 4] };
        let f = SvcFile::assemble(CodecId::Raw, 16, 16, 25, 1, vec![vec![7; 256]; 2], &audio);
        let mut bytes = serialize_svc(&f);
        let last = bytes.len();
        bytes.truncate(last - 1);
        assert!(matches!(parse_svc(&bytes), Err(Error::IndexOutOfBounds(1))));
        let mut bytes = serialize_svc(&f);
        // offset of record 0 := u64::MAX
        bytes[FIXED_HEADER_LEN..FIXED_HEADER_LEN + 8].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(matches!(parse_svc(&bytes), Err(Error::PayloadOverflow(0))));
    }

    #[test]
    fn serialize_is_deterministic() {
        let f = SvcFile::assemble(CodecId::Dct, 32, 16, 30000, 1001, vec![vec![1, 2, 3]; 3], &AudioTrack::default());
        assert_eq!(serialize_svc(&f), serialize_svc(&f.clone()));
    }

    fn arb_file() -> impl Strategy<Value = SvcFile> {
        (
            proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..64), 0..12),
            proptest::collection::vec(any::<i16>(), 0..200),
            any::<bool>(),
            proptest::collection::vec(any::<u8>(), 1..90),
        )
            .prop_map(|(payloads, samples, enc, blob)| {
                let audio = AudioTrack { sample_rate: 16000, samples };
                let mut f = SvcFile::assemble(CodecId::Dct, 48, 32, 24, 1, payloads, &audio);
                if enc {
                    f.header.flags = FLAG_ENCRYPTED;
                    f.header.scheme = SchemeId::Proposed;
                    f.header.key_blob = blob;
                }
                f
            })
    }

    proptest! {
        #[test]
        fn round_trip(f in arb_file()) {
            prop_assert_eq!(parse_svc(&serialize_svc(&f)).unwrap(), f);
        }

        #[test]
        fn parser_is_total(bytes in proptest::collection::vec(any::<u8>(), 0..400)) {
            let _ = parse_svc(&bytes);
        }

        #[test]
        fn parser_is_total_on_mutated_files(f in arb_file(), pos in any::<prop::sample::Index>(), v in any::<u8>()) {
            let mut bytes = serialize_svc(&f);
            let i = pos.index(bytes.len());
            bytes[i] = v;
            let _ = parse_svc(&bytes);
        }
    }
}
