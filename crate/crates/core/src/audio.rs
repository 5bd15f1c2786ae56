//! Audio ingestion: validated sample buffers and WAV decoding.
//!
//! The pipeline accepts exactly one input format: RIFF WAVE, PCM signed
//! 16-bit little-endian, mono, 16 kHz. Anything else is rejected with a
//! clear error instead of being resampled, so that extracted features can
//! never silently drift with the input format.

use std::path::Path;

use crate::error::{Error, Result};

/// Sample rate required at pipeline entry.
pub const PIPELINE_SAMPLE_RATE: u32 = 16_000;

/// A validated mono signal: finite samples in [-1, 1] at a known rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioBuffer {
    /// Wraps a sample vector, validating amplitude range and finiteness.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidAudio("sample rate must be positive".into()));
        }
        for (i, &s) in samples.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::InvalidAudio(format!("non-finite sample at {i}")));
            }
            if !(-1.0..=1.0).contains(&s) {
                return Err(Error::InvalidAudio(format!(
                    "sample {s} at {i} outside [-1, 1]"
                )));
            }
        }
        Ok(AudioBuffer {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Rejects buffers that are not at the pipeline's 16 kHz entry rate.
    pub fn require_pipeline_rate(&self) -> Result<()> {
        if self.sample_rate != PIPELINE_SAMPLE_RATE {
            return Err(Error::UnsupportedFormat(format!(
                "sample rate {} Hz, pipeline requires {} Hz mono (resample offline)",
                self.sample_rate, PIPELINE_SAMPLE_RATE
            )));
        }
        Ok(())
    }
}

/// Loads a 16 kHz mono PCM16 WAV file.
pub fn load_wav(path: &Path) -> Result<AudioBuffer> {
    let reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(source) => Error::Io {
            path: path.display().to_string(),
            source,
        },
        other => Error::UnsupportedFormat(format!("{}: {other}", path.display())),
    })?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "{}: {} channels, need mono",
            path.display(),
            spec.channels
        )));
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedFormat(format!(
            "{}: need PCM signed 16-bit, got {:?} {} bit",
            path.display(),
            spec.sample_format,
            spec.bits_per_sample
        )));
    }
    if spec.sample_rate != PIPELINE_SAMPLE_RATE {
        return Err(Error::UnsupportedFormat(format!(
            "{}: sample rate {} Hz, pipeline requires {} Hz (resample offline)",
            path.display(),
            spec.sample_rate,
            PIPELINE_SAMPLE_RATE
        )));
    }
    let samples: Vec<f64> = reader
        .into_samples::<i16>()
        .map(|s| {
            s.map(|v| f64::from(v) / 32768.0).map_err(|e| {
                Error::UnsupportedFormat(format!("{}: bad sample: {e}", path.display()))
            })
        })
        .collect::<Result<_>>()?;
    AudioBuffer::new(samples, PIPELINE_SAMPLE_RATE)
}
