//! Fundamental frequency estimation by normalized autocorrelation.
//!
//! Each rectangular frame is scanned over the lag range implied by the
//! configured F0 search band. The lag score is the normalized
//! cross-correlation of the frame with itself shifted by the lag, so a
//! perfectly periodic frame scores 1.0 at its period. A frame is voiced
//! when the best score clears the voicing threshold; the winning lag is
//! refined by parabolic interpolation before conversion to Hz.
//!
//! To avoid octave errors on strongly periodic signals, the selected lag is
//! the smallest local maximum whose score is within a small tolerance of
//! the global maximum, rather than the global maximum itself.

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::features::frame::{frame_samples, FrameSpec, WindowKind};

/// Default voicing decision threshold on the normalized autocorrelation peak.
pub const DEFAULT_VOICING_THRESHOLD: f64 = 0.30;

/// Default F0 search band in Hz.
pub const DEFAULT_F0_RANGE: (f64, f64) = (60.0, 400.0);

/// Peaks within this much of the global maximum compete for the smallest lag.
const PEAK_TOLERANCE: f64 = 0.03;

/// Frames whose energy is below this are unvoiced outright.
const SILENCE_ENERGY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchOptions {
    pub f_min: f64,
    pub f_max: f64,
    pub voicing_threshold: f64,
}

impl Default for PitchOptions {
    fn default() -> Self {
        PitchOptions {
            f_min: DEFAULT_F0_RANGE.0,
            f_max: DEFAULT_F0_RANGE.1,
            voicing_threshold: DEFAULT_VOICING_THRESHOLD,
        }
    }
}

/// Per-frame F0 in Hz; 0.0 marks unvoiced frames.
#[derive(Debug, Clone, PartialEq)]
pub struct F0Contour {
    pub values: Vec<f64>,
    pub frame_spec: FrameSpec,
}

impl F0Contour {
    pub fn voiced_count(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }
}

/// F0 plus the per-frame peak correlation used as a voicing probability.
#[derive(Debug, Clone)]
pub struct PitchTracks {
    pub f0: Vec<f64>,
    pub voicing: Vec<f64>,
    pub frame_spec: FrameSpec,
}

/// Estimates the F0 contour of `audio` on the given frame grid.
pub fn estimate_f0(
    audio: &AudioBuffer,
    spec: &FrameSpec,
    f_min: f64,
    f_max: f64,
) -> Result<F0Contour> {
    let tracks = estimate_pitch(
        audio,
        spec,
        &PitchOptions {
            f_min,
            f_max,
            voicing_threshold: DEFAULT_VOICING_THRESHOLD,
        },
    )?;
    Ok(F0Contour {
        values: tracks.f0,
        frame_spec: tracks.frame_spec,
    })
}

/// Full pitch analysis: F0 contour and voicing probability per frame.
pub fn estimate_pitch(
    audio: &AudioBuffer,
    spec: &FrameSpec,
    opts: &PitchOptions,
) -> Result<PitchTracks> {
    let sr = audio.sample_rate();
    if !(opts.f_min > 0.0 && opts.f_min < opts.f_max && opts.f_max < sr as f64 / 2.0) {
        return Err(Error::InvalidRange {
            f_min: opts.f_min,
            f_max: opts.f_max,
            sample_rate: sr,
        });
    }
    // Lags are analyzed on rectangular frames regardless of spec.window.
    let rect = FrameSpec {
        window: WindowKind::Rectangular,
        ..*spec
    };
    let frames = frame_samples(audio.samples(), sr, &rect)?;
    let lag_min = ((sr as f64 / opts.f_max).ceil() as usize).max(1);
    let lag_max = (sr as f64 / opts.f_min).floor() as usize;

    let mut f0 = Vec::with_capacity(frames.len());
    let mut voicing = Vec::with_capacity(frames.len());
    for frame in &frames {
        let (hz, prob) = analyze_frame(frame, sr, lag_min, lag_max, opts);
        f0.push(hz);
        voicing.push(prob);
    }
    Ok(PitchTracks {
        f0,
        voicing,
        frame_spec: *spec,
    })
}

fn analyze_frame(
    frame: &[f64],
    sample_rate: u32,
    lag_min: usize,
    lag_max: usize,
    opts: &PitchOptions,
) -> (f64, f64) {
    let len = frame.len();
    let lag_max = lag_max.min(len.saturating_sub(1));
    if lag_min > lag_max {
        return (0.0, 0.0);
    }
    let energy: f64 = frame.iter().map(|s| s * s).sum();
    if energy < SILENCE_ENERGY {
        return (0.0, 0.0);
    }

    let ncc: Vec<f64> = (lag_min..=lag_max)
        .map(|lag| normalized_correlation(frame, lag))
        .collect();
    let best = ncc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let prob = best.clamp(0.0, 1.0);
    if best < opts.voicing_threshold {
        return (0.0, prob);
    }

    // Smallest local maximum competitive with the global one.
    let mut chosen = None;
    for k in 0..ncc.len() {
        let left_ok = k == 0 || ncc[k] >= ncc[k - 1];
        let right_ok = k + 1 == ncc.len() || ncc[k] >= ncc[k + 1];
        if left_ok && right_ok && ncc[k] >= best - PEAK_TOLERANCE {
            chosen = Some(k);
            break;
        }
    }
    let k = match chosen {
        Some(k) => k,
        None => return (0.0, prob),
    };

    let mut lag = (lag_min + k) as f64;
    if k > 0 && k + 1 < ncc.len() {
        let (l, c, r) = (ncc[k - 1], ncc[k], ncc[k + 1]);
        let denom = l - 2.0 * c + r;
        if denom.abs() > 1e-12 {
            let shift = 0.5 * (l - r) / denom;
            if shift.abs() <= 0.5 {
                lag += shift;
            }
        }
    }
    let hz = (sample_rate as f64 / lag).clamp(opts.f_min, opts.f_max);
    (hz, prob)
}

/// Normalized cross-correlation of the frame with itself at the given lag,
/// over the overlapping region. Returns 0 when either side has no energy.
fn normalized_correlation(frame: &[f64], lag: usize) -> f64 {
    let n = frame.len() - lag;
    let mut dot = 0.0;
    let mut e0 = 0.0;
    let mut e1 = 0.0;
    for t in 0..n {
        let a = frame[t];
        let b = frame[t + lag];
        dot += a * b;
        e0 += a * a;
        e1 += b * b;
    }
    let denom = (e0 * e1).sqrt();
    if denom < SILENCE_ENERGY {
        0.0
    } else {
        dot / denom
    }
}
