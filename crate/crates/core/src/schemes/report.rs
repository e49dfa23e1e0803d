use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::container::SchemeId;

/// Pipeline stages, labelled as in the usual timing table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Shredding,
    Shuffling,
    Stitching,
    Aes,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Shredding, Stage::Shuffling, Stage::Stitching, Stage::Aes];

    pub fn label(self) -> &'static str {
        match self {
            Stage::Shredding => "Video Shredding",
            Stage::Shuffling => "Shuffling",
            Stage::Stitching => "Video Stitching",
            Stage::Aes => "AES Encryption",
        }
    }
}

/// Wall-clock milliseconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub shredding_ms: f64,
    pub shuffling_ms: f64,
    pub stitching_ms: f64,
    pub aes_ms: f64,
}

impl StageTimings {
    pub fn get(&self, stage: Stage) -> f64 {
        match stage {
            Stage::Shredding => self.shredding_ms,
            Stage::Shuffling => self.shuffling_ms,
            Stage::Stitching => self.stitching_ms,
            Stage::Aes => self.aes_ms,
        }
    }

    pub fn get_mut(&mut self, stage: Stage) -> &mut f64 {
        match stage {
            Stage::Shredding => &mut self.shredding_ms,
            Stage::Shuffling => &mut self.shuffling_ms,
            Stage::Stitching => &mut self.stitching_ms,
            Stage::Aes => &mut self.aes_ms,
        }
    }

    pub fn total_ms(&self) -> f64 {
        Stage::ALL.iter().map(|&s| self.get(s)).sum()
    }

    pub(crate) fn time<T>(&mut self, stage: Stage, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.get_mut(stage) += ms(t.elapsed());
        out
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// What an encryption touched. Byte counts are over video payloads; audio is
/// tallied separately.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeReport {
    pub scheme: SchemeId,
    /// Video payload bytes altered or repositioned.
    pub bytes_touched: usize,
    pub total_payload_bytes: usize,
    pub audio_bytes_touched: usize,
    pub audio_total_bytes: usize,
    /// Payload bits run through AES (keystream XOR).
    pub aes_bits: usize,
    pub stage_timings: StageTimings,
}

impl SchemeReport {
    pub(crate) fn new(scheme: SchemeId) -> Self {
        Self {
            scheme,
            bytes_touched: 0,
            total_payload_bytes: 0,
            audio_bytes_touched: 0,
            audio_total_bytes: 0,
            aes_bits: 0,
            stage_timings: StageTimings::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl Serialize for SchemeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Aligned two-column stage table.
pub struct TimingTable<'a>(pub &'a StageTimings);

impl fmt::Display for TimingTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<18}{:>24}", "Task", "Computation Time (ms)")?;
        for s in Stage::ALL {
            writeln!(f, "{:<18}{:>24.3}", s.label(), self.0.get(s))?;
        }
        write!(f, "{:<18}{:>24.3}", "Total", self.0.total_ms())
    }
}

impl fmt::Display for SchemeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme              {}", self.scheme)?;
        writeln!(f, "video bytes touched {} / {}", self.bytes_touched, self.total_payload_bytes)?;
        writeln!(f, "audio bytes touched {} / {}", self.audio_bytes_touched, self.audio_total_bytes)?;
        writeln!(f, "AES-processed bits  {}", self.aes_bits)?;
        write!(f, "{}", TimingTable(&self.stage_timings))
    }
}
