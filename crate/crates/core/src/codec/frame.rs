use super::codeword::CodewordMap;
use super::dct::{dct8x8_forward, dct8x8_inverse, fdct, idct, to_pixel};
use super::motion::{motion_search, predict_16x16, MotionVector, DEFAULT_SEARCH_RADIUS};
use super::quant::{check_qp, dequantize_block, quantize_block, QuantBlock};
use super::syntax::{parse_frame, write_frame, FrameSyntax, UnitSyntax};
use super::{Dims, FrameType};
use crate::container::check_dims;
use crate::{par, Error, Result};

/// Output of [`encode_frame`].
#[derive(Debug, Clone)]
pub struct EncodedFrame {
    pub payload: Vec<u8>,
    pub map: CodewordMap,
    /// What a decoder reconstructs from `payload`; the next P frame's reference.
    pub reconstruction: Vec<u8>,
}

const BLOCK_OFFSETS: [(usize, usize); 4] = [(0, 0), (8, 0), (0, 8), (8, 8)];

fn block_at(mb: &[u8; 256], b: usize) -> [u8; 64] {
    let (bx, by) = BLOCK_OFFSETS[b];
    std::array::from_fn(|i| mb[(by + i / 8) * 16 + bx + i % 8])
}

fn macroblock(frame: &[u8], dims: Dims, ox: usize, oy: usize) -> [u8; 256] {
    std::array::from_fn(|i| frame[(oy + i / 16) * dims.width + ox + i % 16])
}

fn mb_origin(dims: Dims, k: usize) -> (usize, usize) {
    let cols = dims.width / 16;
    ((k % cols) * 16, (k / cols) * 16)
}

fn encode_intra(mb: &[u8; 256], qp: u8) -> Result<[QuantBlock; 4]> {
    let mut blocks = [QuantBlock::default(); 4];
    for (b, out) in blocks.iter_mut().enumerate() {
        *out = quantize_block(&dct8x8_forward(&block_at(mb, b)), qp)?;
    }
    Ok(blocks)
}

fn encode_inter(mb: &[u8; 256], pred: &[u8; 256], qp: u8) -> Result<[QuantBlock; 4]> {
    let mut blocks = [QuantBlock::default(); 4];
    for (b, out) in blocks.iter_mut().enumerate() {
        let (cur, p) = (block_at(mb, b), block_at(pred, b));
        let residual: [f64; 64] = std::array::from_fn(|i| cur[i] as f64 - p[i] as f64);
        *out = quantize_block(&fdct(&residual), qp)?;
    }
    Ok(blocks)
}

fn reconstruct_unit(unit: &UnitSyntax, qp: u8, reference: &[u8], dims: Dims, ox: usize, oy: usize) -> [u8; 256] {
    let mut out = [0u8; 256];
    let pred = unit.inter.then(|| predict_16x16(reference, dims, ox, oy, unit.mvd));
    for (b, block) in unit.blocks.iter().enumerate() {
        let coeffs = dequantize_block(block, qp);
        let samples: [u8; 64] = match &pred {
            Some(pred) => {
                let p = block_at(pred, b);
                let r = idct(&coeffs);
                std::array::from_fn(|i| to_pixel(p[i] as f64 + r[i]))
            }
            None => dct8x8_inverse(&coeffs),
        };
        let (bx, by) = BLOCK_OFFSETS[b];
        for i in 0..64 {
            out[(by + i / 8) * 16 + bx + i % 8] = samples[i];
        }
    }
    out
}

/// Reconstructs a frame from parsed syntax. Unit `k` in stream order lands
/// at raster macroblock `k`. A missing reference is mid-gray.
pub fn reconstruct(syntax: &FrameSyntax, dims: Dims, reference: Option<&[u8]>) -> Vec<u8> {
    let gray;
    let reference = match reference {
        Some(r) => r,
        None => {
            gray = vec![128u8; dims.area()];
            &gray
        }
    };
    let rec: Vec<[u8; 256]> = par::map_range(syntax.units.len(), |k| {
        let (ox, oy) = mb_origin(dims, k);
        reconstruct_unit(&syntax.units[k], syntax.qp, reference, dims, ox, oy)
    });
    let mut frame = vec![0u8; dims.area()];
    for (k, mb) in rec.iter().enumerate() {
        let (ox, oy) = mb_origin(dims, k);
        for y in 0..16 {
            frame[(oy + y) * dims.width + ox..][..16].copy_from_slice(&mb[y * 16..][..16]);
        }
    }
    frame
}

/// Builds the syntax for one frame without serializing it.
pub fn analyze_frame(
    raw: &[u8],
    dims: Dims,
    reference: Option<&[u8]>,
    qp: u8,
    frame_type: FrameType,
) -> Result<FrameSyntax> {
    check_dims(dims.width, dims.height)?;
    check_qp(qp)?;
    if raw.len() != dims.area() {
        return Err(Error::Dimensions(format!("frame has {} bytes, expected {}", raw.len(), dims.area())));
    }
    let reference = match (frame_type, reference) {
        (FrameType::P, Some(r)) if r.len() == dims.area() => Some(r),
        (FrameType::P, Some(_)) => return Err(Error::Dimensions("reference size differs from frame".into())),
        (FrameType::P, None) => return Err(Error::InvalidParam("P frame needs a reference".into())),
        (FrameType::I, _) => None,
    };
    let units: Vec<Result<UnitSyntax>> = par::map_range(dims.macroblocks(), |k| {
        let (ox, oy) = mb_origin(dims, k);
        let mb = macroblock(raw, dims, ox, oy);
        if let Some(reference) = reference {
            let (mv, sad) = motion_search(raw, reference, dims, ox, oy, DEFAULT_SEARCH_RADIUS);
            let mean = mb.iter().map(|&p| p as u32).sum::<u32>() / 256;
            let activity: u32 = mb.iter().map(|&p| (p as u32).abs_diff(mean)).sum();
            if sad <= activity {
                let pred = predict_16x16(reference, dims, ox, oy, mv);
                return Ok(UnitSyntax { inter: true, mvd: mv, blocks: encode_inter(&mb, &pred, qp)? });
            }
        }
        Ok(UnitSyntax { inter: false, mvd: MotionVector::default(), blocks: encode_intra(&mb, qp)? })
    });
    Ok(FrameSyntax { frame_type, qp, units: units.into_iter().collect::<Result<_>>()? })
}

/// Encodes one luma frame. P frames need the previous reconstruction as
/// `reference`.
pub fn encode_frame(
    raw: &[u8],
    dims: Dims,
    reference: Option<&[u8]>,
    qp: u8,
    frame_type: FrameType,
) -> Result<EncodedFrame> {
    let syntax = analyze_frame(raw, dims, reference, qp, frame_type)?;
    let reconstruction = reconstruct(&syntax, dims, reference);
    let (payload, map, _) = write_frame(&syntax);
    Ok(EncodedFrame { payload, map, reconstruction })
}

/// Decodes one payload. Any syntactically valid payload decodes, whatever
/// its content; motion reads are clamped to the frame.
pub fn decode_frame(payload: &[u8], dims: Dims, reference: Option<&[u8]>) -> Result<Vec<u8>> {
    if reference.is_some_and(|r| r.len() != dims.area()) {
        return Err(Error::Dimensions("reference size differs from frame".into()));
    }
    let parsed = parse_frame(payload, dims)?;
    Ok(reconstruct(&parsed.syntax, dims, reference))
}
