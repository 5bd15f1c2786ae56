//! Mel filterbank analysis: log-mel spectrograms and cepstral coefficients.
//!
//! Conventions fixed for reproducibility: HTK mel scale
//! (2595 log10(1 + f/700)), triangular filters spanning 0–8000 Hz, power
//! spectrum from a zero-padded FFT, and max(x, 1e-10) applied before every
//! logarithm. Cepstra use an orthogonal-style DCT-II with the DC term
//! excluded, so a pure gain change never leaks into the coefficients.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::features::frame::{frame_samples, FrameSpec, WindowKind};

/// Floor applied before every logarithm.
pub const LOG_FLOOR: f64 = 1e-10;

/// Bands in the pipeline's log-mel spectrogram.
pub const MEL_SPECTROGRAM_BANDS: usize = 80;

/// Filters in the MFCC filterbank.
pub const MFCC_MEL_FILTERS: usize = 26;

/// Cepstral coefficients kept per frame (c1..c12).
pub const MFCC_COEFFS: usize = 12;

/// Upper edge of every filterbank in Hz.
pub const MEL_F_MAX: f64 = 8_000.0;

/// T x 80 matrix of log-mel energies.
#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram {
    pub frames: Vec<Vec<f64>>,
    pub frame_spec: FrameSpec,
}

impl MelSpectrogram {
    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn num_bands(&self) -> usize {
        self.frames.first().map_or(0, Vec::len)
    }
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular mel filterbank over FFT power-spectrum bins.
///
/// Filter weights are evaluated at each bin's center frequency (no
/// snap-to-bin), so neighboring filters always overlap smoothly.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    /// Per filter: (first bin index, weights for consecutive bins).
    filters: Vec<(usize, Vec<f64>)>,
    n_fft: usize,
}

impl MelFilterbank {
    pub fn new(sample_rate: u32, n_fft: usize, n_filters: usize, f_lo: f64, f_hi: f64) -> Self {
        let mel_lo = hz_to_mel(f_lo);
        let mel_hi = hz_to_mel(f_hi);
        let edges: Vec<f64> = (0..n_filters + 2)
            .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n_filters + 1) as f64))
            .collect();
        let bin_hz = sample_rate as f64 / n_fft as f64;
        let n_bins = n_fft / 2 + 1;
        let mut filters = Vec::with_capacity(n_filters);
        for f in 0..n_filters {
            let (left, center, right) = (edges[f], edges[f + 1], edges[f + 2]);
            let mut start = None;
            let mut weights = Vec::new();
            for bin in 0..n_bins {
                let freq = bin as f64 * bin_hz;
                let w = if freq <= left || freq >= right {
                    0.0
                } else if freq <= center {
                    (freq - left) / (center - left)
                } else {
                    (right - freq) / (right - center)
                };
                if w > 0.0 {
                    if start.is_none() {
                        start = Some(bin);
                    }
                    weights.push(w);
                } else if start.is_some() {
                    break;
                }
            }
            filters.push((start.unwrap_or(0), weights));
        }
        MelFilterbank { filters, n_fft }
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }

    /// Filter energies for one power spectrum (length n_fft/2 + 1).
    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        self.filters
            .iter()
            .map(|(start, weights)| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| w * power[start + i])
                    .sum()
            })
            .collect()
    }
}

pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Power spectrum of a frame, zero-padded to `n_fft`.
pub fn power_spectrum(frame: &[f64], n_fft: usize) -> Vec<f64> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n_fft);
    let mut buf: Vec<Complex<f64>> = frame
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(n_fft)
        .collect();
    fft.process(&mut buf);
    buf[..n_fft / 2 + 1].iter().map(|c| c.norm_sqr()).collect()
}

/// DCT-II with sqrt(2/M) scaling, coefficients `1..=n_coeffs` (DC excluded).
pub fn dct_coefficients(values: &[f64], n_coeffs: usize) -> Vec<f64> {
    let m = values.len() as f64;
    let scale = (2.0 / m).sqrt();
    (1..=n_coeffs)
        .map(|k| {
            scale
                * values
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        v * (std::f64::consts::PI * k as f64 * (i as f64 + 0.5) / m).cos()
                    })
                    .sum::<f64>()
        })
        .collect()
}

/// 80-band log-mel spectrogram on the pipeline frame grid (50 ms / 12.5 ms).
pub fn mel_spectrogram(audio: &AudioBuffer) -> Result<MelSpectrogram> {
    audio.require_pipeline_rate()?;
    let spec = FrameSpec::pipeline_default(WindowKind::Hann);
    log_mel_frames(audio, &spec, MEL_SPECTROGRAM_BANDS)
}

/// Log-mel analysis with explicit frame spec and band count.
pub fn log_mel_frames(
    audio: &AudioBuffer,
    spec: &FrameSpec,
    n_bands: usize,
) -> Result<MelSpectrogram> {
    let frames = frame_samples(audio.samples(), audio.sample_rate(), spec)?;
    let frame_len = frames.first().map_or(0, Vec::len);
    let n_fft = next_pow2(frame_len);
    let bank = MelFilterbank::new(audio.sample_rate(), n_fft, n_bands, 0.0, MEL_F_MAX);
    let mut out = Vec::with_capacity(frames.len());
    for frame in &frames {
        let power = power_spectrum(frame, n_fft);
        let energies = bank.apply(&power);
        out.push(energies.iter().map(|&e| e.max(LOG_FLOOR).ln()).collect());
    }
    Ok(MelSpectrogram {
        frames: out,
        frame_spec: *spec,
    })
}

/// MFCC 1..n_coeffs of one windowed frame.
pub fn mfcc(frame: &[f64], sample_rate: u32, n_coeffs: usize, n_mels: usize) -> Vec<f64> {
    let n_fft = next_pow2(frame.len());
    let bank = MelFilterbank::new(sample_rate, n_fft, n_mels, 0.0, MEL_F_MAX);
    mfcc_with(frame, &bank, n_coeffs)
}

/// MFCC against a prebuilt filterbank; used by batch extraction.
pub fn mfcc_with(frame: &[f64], bank: &MelFilterbank, n_coeffs: usize) -> Vec<f64> {
    let power = power_spectrum(frame, bank.n_fft());
    let log_energies: Vec<f64> = bank
        .apply(&power)
        .iter()
        .map(|&e| e.max(LOG_FLOOR).ln())
        .collect();
    dct_coefficients(&log_energies, n_coeffs)
}

/// Error when a cepstral order cannot be served by the filter count.
pub fn check_cepstral_order(order: usize, n_bands: usize) -> Result<()> {
    if order == 0 || order >= n_bands {
        return Err(Error::InvalidConfig(format!(
            "cepstral order {order} must be in 1..{n_bands}"
        )));
    }
    Ok(())
}
