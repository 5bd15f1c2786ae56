//! Fixed-stride framing of a signal with an optional analysis window.

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Rectangular,
    Hann,
}

/// Frame geometry in seconds plus the window applied to each frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub frame_length: f64,
    pub hop_length: f64,
    pub window: WindowKind,
}

impl FrameSpec {
    pub fn new(frame_length: f64, hop_length: f64, window: WindowKind) -> Result<Self> {
        if !(frame_length.is_finite() && hop_length.is_finite())
            || hop_length <= 0.0
            || hop_length > frame_length
        {
            return Err(Error::InvalidConfig(format!(
                "frame spec needs 0 < hop ({hop_length}) <= frame length ({frame_length})"
            )));
        }
        Ok(FrameSpec {
            frame_length,
            hop_length,
            window,
        })
    }

    /// 50 ms frames every 12.5 ms, the geometry used by the whole pipeline.
    pub fn pipeline_default(window: WindowKind) -> Self {
        FrameSpec {
            frame_length: 0.050,
            hop_length: 0.0125,
            window,
        }
    }

    pub fn frame_samples(&self, sample_rate: u32) -> usize {
        (self.frame_length * sample_rate as f64).round() as usize
    }

    pub fn hop_samples(&self, sample_rate: u32) -> usize {
        ((self.hop_length * sample_rate as f64).round() as usize).max(1)
    }
}

/// floor((n - frame) / hop) + 1, or None when the signal is shorter than a frame.
pub fn num_frames(n: usize, frame: usize, hop: usize) -> Option<usize> {
    if n < frame || frame == 0 {
        return None;
    }
    Some((n - frame) / hop + 1)
}

pub fn window_weights(kind: WindowKind, len: usize) -> Vec<f64> {
    match kind {
        WindowKind::Rectangular => vec![1.0; len],
        WindowKind::Hann => {
            if len == 1 {
                return vec![1.0];
            }
            (0..len)
                .map(|n| {
                    0.5 * (1.0
                        - (2.0 * std::f64::consts::PI * n as f64 / (len - 1) as f64).cos())
                })
                .collect()
        }
    }
}

/// Cuts the signal into frames and multiplies each by the window.
pub fn frame_signal(audio: &AudioBuffer, spec: &FrameSpec) -> Result<Vec<Vec<f64>>> {
    frame_samples(audio.samples(), audio.sample_rate(), spec)
}

/// Same as [`frame_signal`] but over a raw slice, for pre-processed signals.
pub fn frame_samples(samples: &[f64], sample_rate: u32, spec: &FrameSpec) -> Result<Vec<Vec<f64>>> {
    let frame_len = spec.frame_samples(sample_rate);
    let hop = spec.hop_samples(sample_rate);
    let count = num_frames(samples.len(), frame_len, hop).ok_or(Error::AudioTooShort {
        samples: samples.len(),
        needed: frame_len,
    })?;
    let weights = window_weights(spec.window, frame_len);
    let mut frames = Vec::with_capacity(count);
    for f in 0..count {
        let start = f * hop;
        let frame: Vec<f64> = samples[start..start + frame_len]
            .iter()
            .zip(&weights)
            .map(|(s, w)| s * w)
            .collect();
        frames.push(frame);
    }
    Ok(frames)
}
