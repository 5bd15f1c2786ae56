//! Utterance-level acoustic feature extraction.
//!
//! Every utterance is reduced to a fixed 384-dimensional vector:
//!
//! * 16 low-level descriptor tracks on a 50 ms / 12.5 ms frame grid:
//!   zero-crossing rate, RMS energy, F0, voicing probability, and MFCC
//!   coefficients 1–12 (pre-emphasis 0.97 is applied to the signal before
//!   the MFCC chain only);
//! * each track plus its regression delta ([`delta`]) — 32 tracks;
//! * each of the 32 tracks summarized by the 12 functionals
//!   ([`functionals`]): 32 x 12 = 384 values.
//!
//! Output order: for each descriptor in the order above, the 12 raw-track
//! functionals followed by the 12 delta-track functionals. Extraction is a
//! pure function of the samples, so identical audio always produces a
//! bitwise-identical vector.

mod frame;
mod lld;
mod mel;
mod pitch;

pub use frame::{frame_samples, frame_signal, num_frames, window_weights, FrameSpec, WindowKind};
pub use lld::{
    delta, functionals, rms_energy, zero_crossing_rate, LldTrack, FUNCTIONAL_NAMES,
    NUM_FUNCTIONALS,
};
pub use mel::{
    check_cepstral_order, dct_coefficients, hz_to_mel, log_mel_frames, mel_spectrogram, mel_to_hz,
    mfcc, mfcc_with, next_pow2, power_spectrum, MelFilterbank, MelSpectrogram, LOG_FLOOR,
    MEL_F_MAX, MEL_SPECTROGRAM_BANDS, MFCC_COEFFS, MFCC_MEL_FILTERS,
};
pub use pitch::{
    estimate_f0, estimate_pitch, F0Contour, PitchOptions, PitchTracks, DEFAULT_F0_RANGE,
    DEFAULT_VOICING_THRESHOLD,
};

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// Identifier for the documented 384-entry layout. Bump when the layout,
/// any descriptor definition, or any analysis constant changes.
pub const LAYOUT_VERSION: &str = "lld16x2-f12/1";

/// Total feature dimension: 16 descriptors x (raw + delta) x 12 functionals.
pub const FEATURE_DIM: usize = 384;

/// Pre-emphasis coefficient applied before the MFCC chain.
pub const PRE_EMPHASIS: f64 = 0.97;

const LLD_NAMES: [&str; 16] = [
    "zcr", "rms", "f0", "voicing", "mfcc1", "mfcc2", "mfcc3", "mfcc4", "mfcc5", "mfcc6", "mfcc7",
    "mfcc8", "mfcc9", "mfcc10", "mfcc11", "mfcc12",
];

/// The fixed-length per-utterance descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub layout_version: String,
}

impl FeatureVector {
    /// Wraps raw values after checking dimension and finiteness.
    pub fn new(values: Vec<f64>, layout_version: impl Into<String>) -> Result<Self> {
        if values.len() != FEATURE_DIM {
            return Err(Error::DimensionMismatch {
                expected: FEATURE_DIM,
                got: values.len(),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidAudio(format!(
                "non-finite feature at index {bad}"
            )));
        }
        Ok(FeatureVector {
            values,
            layout_version: layout_version.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Column names for the 384 features, in vector order.
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(FEATURE_DIM);
    for lld in LLD_NAMES {
        for func in FUNCTIONAL_NAMES {
            names.push(format!("{lld}_{func}"));
        }
        for func in FUNCTIONAL_NAMES {
            names.push(format!("{lld}_de_{func}"));
        }
    }
    names
}

fn pre_emphasize(samples: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev = 0.0;
    for &s in samples {
        out.push(s - PRE_EMPHASIS * prev);
        prev = s;
    }
    out
}

/// Extracts the 384-dimensional feature vector from 16 kHz mono audio.
pub fn extract_feature_vector(audio: &AudioBuffer) -> Result<FeatureVector> {
    extract_feature_vector_with(audio, &PitchOptions::default())
}

/// Extraction with explicit pitch options on the default frame grid.
pub fn extract_feature_vector_with(
    audio: &AudioBuffer,
    pitch_opts: &PitchOptions,
) -> Result<FeatureVector> {
    extract_feature_vector_opts(
        audio,
        &FrameSpec::pipeline_default(WindowKind::Hann),
        pitch_opts,
    )
}

/// Extraction with explicit frame grid and pitch options.
pub fn extract_feature_vector_opts(
    audio: &AudioBuffer,
    frame: &FrameSpec,
    pitch_opts: &PitchOptions,
) -> Result<FeatureVector> {
    audio.require_pipeline_rate()?;
    let sr = audio.sample_rate();
    let rect = FrameSpec {
        window: WindowKind::Rectangular,
        ..*frame
    };
    let hann = FrameSpec {
        window: WindowKind::Hann,
        ..*frame
    };

    let raw_frames = frame_signal(audio, &rect)?;
    let mut zcr = Vec::with_capacity(raw_frames.len());
    let mut rms = Vec::with_capacity(raw_frames.len());
    for frame in &raw_frames {
        zcr.push(zero_crossing_rate(frame));
        rms.push(rms_energy(frame));
    }

    let pitch = estimate_pitch(audio, &rect, pitch_opts)?;

    let emphasized = pre_emphasize(audio.samples());
    let mfcc_frames = frame_samples(&emphasized, sr, &hann)?;
    let frame_len = mfcc_frames.first().map_or(0, Vec::len);
    let bank = MelFilterbank::new(sr, next_pow2(frame_len), MFCC_MEL_FILTERS, 0.0, MEL_F_MAX);
    let mut mfcc_tracks: Vec<Vec<f64>> = (0..MFCC_COEFFS)
        .map(|_| Vec::with_capacity(mfcc_frames.len()))
        .collect();
    for frame in &mfcc_frames {
        let coeffs = mfcc_with(frame, &bank, MFCC_COEFFS);
        for (track, value) in mfcc_tracks.iter_mut().zip(coeffs) {
            track.push(value);
        }
    }

    let mut tracks = Vec::with_capacity(16);
    tracks.push(LldTrack::new("zcr", zcr));
    tracks.push(LldTrack::new("rms", rms));
    tracks.push(LldTrack::new("f0", pitch.f0));
    tracks.push(LldTrack::new("voicing", pitch.voicing));
    for (i, values) in mfcc_tracks.into_iter().enumerate() {
        tracks.push(LldTrack::new(format!("mfcc{}", i + 1), values));
    }

    let mut values = Vec::with_capacity(FEATURE_DIM);
    for track in &tracks {
        values.extend_from_slice(&functionals(track)?);
        values.extend_from_slice(&functionals(&delta(track))?);
    }
    FeatureVector::new(values, LAYOUT_VERSION)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, secs: f64, amp: f64) -> AudioBuffer {
        let n = (secs * 16_000.0) as usize;
        let samples = (0..n)
            .map(|t| amp * (2.0 * std::f64::consts::PI * freq * t as f64 / 16_000.0).sin())
            .collect();
        AudioBuffer::new(samples, 16_000).unwrap()
    }

    #[test]
    fn vector_is_384_and_finite() {
        let fv = extract_feature_vector(&sine(220.0, 1.0, 0.5)).unwrap();
        assert_eq!(fv.values.len(), FEATURE_DIM);
        assert!(fv.values.iter().all(|v| v.is_finite()));
        assert_eq!(fv.layout_version, LAYOUT_VERSION);
    }

    #[test]
    fn extraction_is_deterministic() {
        let audio = sine(173.0, 0.7, 0.4);
        let a = extract_feature_vector(&audio).unwrap();
        let b = extract_feature_vector(&audio).unwrap();
        assert_eq!(a, b);
        // Bitwise equality, not approximate.
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn sine_f0_mean_functional_near_220() {
        let fv = extract_feature_vector(&sine(220.0, 1.0, 0.6)).unwrap();
        let names = feature_names();
        let idx = names.iter().position(|n| n == "f0_mean").unwrap();
        assert!(
            (fv.values[idx] - 220.0).abs() < 3.0,
            "f0_mean = {}",
            fv.values[idx]
        );
    }

    #[test]
    fn feature_names_are_unique_and_aligned() {
        let names = feature_names();
        assert_eq!(names.len(), FEATURE_DIM);
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), FEATURE_DIM);
        assert_eq!(names[0], "zcr_mean");
        assert_eq!(names[12], "zcr_de_mean");
        assert_eq!(names[24], "rms_mean");
    }

    #[test]
    fn too_short_audio_propagates() {
        let audio = AudioBuffer::new(vec![0.1; 400], 16_000).unwrap();
        let err = extract_feature_vector(&audio).unwrap_err();
        assert_eq!(err.code(), "audio_too_short");
    }

    #[test]
    fn wrong_rate_rejected() {
        let audio = AudioBuffer::new(vec![0.0; 8_000], 8_000).unwrap();
        let err = extract_feature_vector(&audio).unwrap_err();
        assert_eq!(err.code(), "unsupported_format");
    }
}
