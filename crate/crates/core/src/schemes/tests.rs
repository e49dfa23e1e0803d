use super::choose_full::chosen_frames;
use super::perceptual::covered_units;
use super::*;
use crate::codec::{decode_svc, CodewordClass};
use crate::container::{parse_svc, serialize_svc, SvcFile};
use crate::keys::{MasterKey, ShuffleKey};
use crate::testutil::{dct_file, raw_file};
use proptest::prelude::*;

fn master() -> MasterKey {
    MasterKey::from_hex("000102030405060708090a0b0c0d0e0f").unwrap()
}

fn file_for(scheme: SchemeId, frames: usize) -> SvcFile {
    if scheme == SchemeId::Pure {
        raw_file(frames)
    } else {
        dct_file(frames)
    }
}

fn roundtrip(params: &SchemeParams, frames: usize) -> (SvcFile, SvcFile, SchemeReport) {
    let plain = file_for(params.scheme, frames);
    let (enc, report) = encrypt(plain.clone(), &master(), params).unwrap();
    // through the wire format
    let enc = parse_svc(&serialize_svc(&enc)).unwrap();
    let dec = decrypt(enc.clone(), &master()).unwrap();
    assert_eq!(dec, plain, "{:?}", params.scheme);
    (plain, enc, report)
}

#[test]
fn every_scheme_inverts() {
    for s in SchemeId::ENCRYPTING {
        for frames in [0, 1, 5, 9] {
            roundtrip(&SchemeParams::new(s), frames);
        }
    }
}

#[test]
fn size_preserving_schemes() {
    for s in SchemeId::ENCRYPTING {
        let (plain, enc, _) = roundtrip(&SchemeParams::new(s), 6);
        assert_eq!(enc.header.key_blob.len(), HEADER_BLOB_LEN);
        assert!(enc.header.is_encrypted());
        assert_eq!(enc.audio_bytes(), plain.audio_bytes());
        if s != SchemeId::Crisscross {
            assert_eq!(enc.video_bytes(), plain.video_bytes(), "{s}");
        }
    }
}

#[test]
fn full_touches_everything() {
    let (plain, enc, r) = roundtrip(&SchemeParams::new(SchemeId::Full), 4);
    assert_eq!(r.bytes_touched, r.total_payload_bytes);
    assert_eq!(r.audio_bytes_touched, plain.audio_bytes());
    assert_eq!(r.aes_bits, 8 * (plain.video_bytes() + plain.audio_bytes()));
    assert_ne!(enc.records[0].video, plain.records[0].video);
    assert_ne!(enc.records[3].audio, plain.records[3].audio);
}

#[test]
fn choose_half_of_equal_frames() {
    let params = SchemeParams::new(SchemeId::Choose).with_frame_fraction(0.5);
    let plain = raw_file(8);
    let (enc, r) = encrypt(plain.clone(), &master(), &params).unwrap();
    assert_eq!(decrypt(enc.clone(), &master()).unwrap(), plain);
    assert_eq!(r.bytes_touched * 2, r.total_payload_bytes);
    for (i, (p, e)) in plain.records.iter().zip(&enc.records).enumerate() {
        assert_eq!(p.video == e.video, i % 2 == 1, "frame {i}");
    }
}

#[test]
fn chosen_frame_rule() {
    assert_eq!(chosen_frames(10, 0.5), vec![0, 2, 4, 6, 8]);
    assert_eq!(chosen_frames(5, 0.5), vec![0, 2, 4]);
    assert_eq!(chosen_frames(10, 0.3), vec![0, 3, 6]);
    assert_eq!(chosen_frames(10, 0.4), vec![0, 2, 4, 6]);
    assert_eq!(chosen_frames(4, 1.0), vec![0, 1, 2, 3]);
    assert!(chosen_frames(0, 0.5).is_empty());
}

#[test]
fn perceptual_zero_fraction_is_identity() {
    let params = SchemeParams::new(SchemeId::Perceptual).with_block_fraction(0.0);
    let (plain, enc, r) = roundtrip(&params, 3);
    assert_eq!(r.bytes_touched, 0);
    assert_eq!(r.aes_bits, 0);
    assert_eq!(enc.records, plain.records);
    assert_eq!(covered_units(6, 0.5), 3);
    assert_eq!(covered_units(6, 0.01), 1);
}

#[test]
fn perceptual_output_still_decodes() {
    let (plain, enc, r) = roundtrip(&SchemeParams::new(SchemeId::Perceptual), 4);
    assert!(r.bytes_touched > 0 && r.bytes_touched < r.total_payload_bytes);
    let mut header_only = enc.clone();
    header_only.header = plain.header.clone();
    let degraded = decode_svc(&header_only).unwrap();
    assert_eq!(degraded.frames.len(), 4);
    assert_ne!(degraded, decode_svc(&plain).unwrap());
}

#[test]
fn proposed_single_frame_single_unit() {
    let video = crate::testutil::clip(16, 16, 1, 2);
    let plain = crate::codec::encode_svc(&video, &crate::testutil::tone(0), 4, 8).unwrap();
    let (enc, r) = encrypt(plain.clone(), &master(), &SchemeParams::new(SchemeId::Proposed)).unwrap();
    assert_eq!(r.bytes_touched, plain.video_bytes());
    assert_eq!(decrypt(enc, &master()).unwrap(), plain);
}

#[test]
fn proposed_moves_audio_with_frames() {
    let plain = dct_file(12);
    let key = ShuffleKey { frame_seed: [1; 16], block_seed: [2; 16], stream_nonce: [3; 12] };
    let params = SchemeParams::new(SchemeId::Proposed);
    let (enc, r) = encrypt_with_key(plain.clone(), &master(), &params, key).unwrap();
    let perm = super::proposed::frame_permutation(&key, 12).unwrap();
    for i in 0..12 {
        assert_eq!(enc.records[perm.dest(i)].audio, plain.records[i].audio);
    }
    assert_ne!(perm.mapping(), crate::keys::Permutation::identity(12).mapping());
    assert_eq!(r.audio_bytes_touched, plain.audio_bytes());
    assert!(r.aes_bits > 0);
    let map_bits: usize = plain
        .records
        .iter()
        .map(|rec| crate::codec::parse_frame(&rec.video, super::proposed::dims(&plain)).unwrap().map.total_encryptable_bits())
        .sum();
    assert_eq!(r.aes_bits, map_bits);
}

#[test]
fn proposed_class_subset() {
    let params = SchemeParams::new(SchemeId::Proposed).with_classes(CodewordClass::AcSign.into());
    let (_, _, r) = roundtrip(&params, 3);
    let all = roundtrip(&SchemeParams::new(SchemeId::Proposed), 3).2;
    assert!(r.aes_bits < all.aes_bits);
}

#[test]
fn wrong_key_is_rejected_before_decoding() {
    for s in SchemeId::ENCRYPTING {
        let (enc, _) = encrypt(file_for(s, 2), &master(), &SchemeParams::new(s)).unwrap();
        let other = MasterKey::from_hex("ff0102030405060708090a0b0c0d0e0f").unwrap();
        assert!(matches!(decrypt(enc, &other), Err(Error::WrongKey)));
    }
}

#[test]
fn tampered_trailer_is_rejected() {
    let params = SchemeParams::new(SchemeId::Choose);
    let (mut enc, _) = encrypt(dct_file(4), &master(), &params).unwrap();
    let last = enc.header.key_blob.len() - 1;
    enc.header.key_blob[last] ^= 1;
    assert!(matches!(decrypt(enc, &master()), Err(Error::WrongKey)));
}

#[test]
fn state_errors() {
    let plain = dct_file(2);
    assert!(matches!(decrypt(plain.clone(), &master()), Err(Error::NotEncrypted)));
    let (enc, _) = encrypt(plain.clone(), &master(), &SchemeParams::new(SchemeId::Full)).unwrap();
    assert!(matches!(encrypt(enc, &master(), &SchemeParams::new(SchemeId::Full)), Err(Error::AlreadyEncrypted)));
    assert!(matches!(
        encrypt(plain.clone(), &master(), &SchemeParams::new(SchemeId::Pure)),
        Err(Error::SchemeCodec { .. })
    ));
    assert!(matches!(
        encrypt(raw_file(2), &master(), &SchemeParams::new(SchemeId::Proposed)),
        Err(Error::SchemeCodec { .. })
    ));
    assert!(matches!(
        encrypt(plain.clone(), &master(), &SchemeParams::new(SchemeId::Choose).with_frame_fraction(0.0)),
        Err(Error::InvalidParam(_))
    ));
    assert!(matches!(
        encrypt(plain, &master(), &SchemeParams::new(SchemeId::Perceptual).with_block_fraction(1.5)),
        Err(Error::InvalidParam(_))
    ));
}

#[test]
fn taxonomy() {
    assert_eq!(classify(SchemeId::Full).unwrap(), Taxonomy::CompletelyLayered);
    assert_eq!(classify(SchemeId::Pure).unwrap(), Taxonomy::Permutation);
    assert_eq!(classify(SchemeId::Crisscross).unwrap(), Taxonomy::Permutation);
    assert_eq!(classify(SchemeId::Choose).unwrap(), Taxonomy::Selective);
    assert_eq!(classify(SchemeId::Proposed).unwrap(), Taxonomy::Selective);
    assert_eq!(classify(SchemeId::Perceptual).unwrap(), Taxonomy::Perceptual);
    assert!(classify(SchemeId::None).is_err());
}

#[test]
fn fresh_keys_differ() {
    let params = SchemeParams::new(SchemeId::Proposed);
    let a = encrypt(dct_file(3), &master(), &params).unwrap().0;
    let b = encrypt(dct_file(3), &master(), &params).unwrap().0;
    assert_ne!(a.header.key_blob, b.header.key_blob);
    assert_ne!(a.records, b.records);
}

#[test]
fn pure_and_crisscross_report_no_aes() {
    for s in [SchemeId::Pure, SchemeId::Crisscross] {
        let (_, _, r) = roundtrip(&SchemeParams::new(s), 3);
        assert_eq!(r.aes_bits, 0);
        assert_eq!(r.bytes_touched, r.total_payload_bytes);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn roundtrip_under_any_key(seeds in any::<[u8; 16]>(), frames in 0usize..6, which in 0usize..6) {
        let s = SchemeId::ENCRYPTING[which];
        let key = ShuffleKey { frame_seed: seeds, block_seed: seeds.map(|b| b ^ 0x5a), stream_nonce: [seeds[0]; 12] };
        let plain = file_for(s, frames);
        let (enc, _) = encrypt_with_key(plain.clone(), &master(), &SchemeParams::new(s), key).unwrap();
        prop_assert_eq!(decrypt(enc, &master()).unwrap(), plain);
    }
}
