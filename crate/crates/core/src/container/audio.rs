use super::AudioTrack;

/// Splits a track into `frame_count` little-endian PCM chunks.
///
/// Chunk `i` holds samples `[floor(i*S/N), floor((i+1)*S/N))`, so the chunks
/// concatenate back to the exact input. An empty track yields empty chunks.
pub fn partition_audio(track: &AudioTrack, frame_count: usize) -> Vec<Vec<u8>> {
    assert!(frame_count >= 1, "partition_audio needs at least one frame");
    let s = track.samples.len() as u128;
    let n = frame_count as u128;
    let bound = |i: usize| (i as u128 * s / n) as usize;
    (0..frame_count)
        .map(|i| {
            track.samples[bound(i)..bound(i + 1)]
                .iter()
                .flat_map(|v| v.to_le_bytes())
                .collect()
        })
        .collect()
}
