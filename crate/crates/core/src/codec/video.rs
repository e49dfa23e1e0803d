use super::frame::{decode_frame, encode_frame};
use super::{Dims, FrameType};
use crate::container::{AudioTrack, CodecId, RawVideo, SvcFile};
use crate::{par, Error, Result};

pub const DEFAULT_QP: u8 = 4;
pub const DEFAULT_GOP: usize = 8;

/// Encodes a clip with an I frame every `gop` frames. GOPs are independent
/// and encoded concurrently.
pub fn encode_video(video: &RawVideo, qp: u8, gop: usize) -> Result<Vec<Vec<u8>>> {
    if gop == 0 {
        return Err(Error::InvalidParam("gop must be at least 1".into()));
    }
    let dims = Dims::new(video.width as usize, video.height as usize);
    let groups: Vec<&[Vec<u8>]> = video.frames.chunks(gop).collect();
    let encoded: Vec<Result<Vec<Vec<u8>>>> = par::map(&groups, |group| {
        let mut out = Vec::with_capacity(group.len());
        let mut reference: Option<Vec<u8>> = None;
        for raw in group.iter() {
            let ft = if reference.is_some() { FrameType::P } else { FrameType::I };
            let enc = encode_frame(raw, dims, reference.as_deref(), qp, ft)?;
            out.push(enc.payload);
            reference = Some(enc.reconstruction);
        }
        Ok(out)
    });
    Ok(encoded.into_iter().collect::<Result<Vec<_>>>()?.concat())
}

/// Decodes payloads in stream order. Each P frame predicts from the previous
/// decoded frame (mid-gray when there is none). Runs that start at an I frame
/// are decoded concurrently.
pub fn decode_video(payloads: &[Vec<u8>], dims: Dims) -> Result<Vec<Vec<u8>>> {
    let mut starts: Vec<usize> = (0..payloads.len())
        .filter(|&i| i == 0 || payloads[i].first() == Some(&(FrameType::I as u8)))
        .collect();
    starts.push(payloads.len());
    let runs: Vec<Result<Vec<Vec<u8>>>> = par::map_range(starts.len() - 1, |r| {
        let mut out: Vec<Vec<u8>> = Vec::with_capacity(starts[r + 1] - starts[r]);
        for p in &payloads[starts[r]..starts[r + 1]] {
            let frame = decode_frame(p, dims, out.last().map(Vec::as_slice))?;
            out.push(frame);
        }
        Ok(out)
    });
    Ok(runs.into_iter().collect::<Result<Vec<_>>>()?.concat())
}

/// Compresses raw video into a `DCT` container.
pub fn encode_svc(video: &RawVideo, audio: &AudioTrack, qp: u8, gop: usize) -> Result<SvcFile> {
    let payloads = encode_video(video, qp, gop)?;
    Ok(SvcFile::assemble(CodecId::Dct, video.width, video.height, video.fps_num, video.fps_den, payloads, audio))
}

/// Decodes (or, for `RAW` files, copies) every frame in record order.
pub fn decode_svc(svc: &SvcFile) -> Result<RawVideo> {
    let dims = Dims::new(svc.header.width as usize, svc.header.height as usize);
    let payloads: Vec<Vec<u8>> = svc.records.iter().map(|r| r.video.clone()).collect();
    let frames = match svc.header.codec {
        CodecId::Dct => decode_video(&payloads, dims)?,
        CodecId::Raw => payloads,
    };
    RawVideo::new(svc.header.width, svc.header.height, svc.header.fps_num, svc.header.fps_den.max(1), frames)
}
