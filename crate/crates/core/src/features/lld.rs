//! Per-frame low-level descriptors and the utterance-level functionals
//! that summarize each descriptor track.

use crate::error::{Error, Result};

/// A named per-frame descriptor track. Unvoiced F0 frames hold 0.0; NaN
/// never appears in a valid track.
#[derive(Debug, Clone, PartialEq)]
pub struct LldTrack {
    pub name: String,
    pub values: Vec<f64>,
}

impl LldTrack {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        LldTrack {
            name: name.into(),
            values,
        }
    }
}

/// Fraction of adjacent sample pairs whose signs differ, in [0, 1].
///
/// A pair counts as a crossing only when the product is strictly negative,
/// so exact zeros never contribute.
pub fn zero_crossing_rate(frame: &[f64]) -> f64 {
    if frame.len() < 2 {
        return 0.0;
    }
    let crossings = frame
        .windows(2)
        .filter(|pair| pair[0] * pair[1] < 0.0)
        .count();
    crossings as f64 / (frame.len() - 1) as f64
}

/// Root-mean-square of the frame samples.
pub fn rms_energy(frame: &[f64]) -> f64 {
    if frame.is_empty() {
        return 0.0;
    }
    (frame.iter().map(|s| s * s).sum::<f64>() / frame.len() as f64).sqrt()
}

/// Regression delta over the two neighboring frames with edge replication:
/// the least-squares slope of the 3-point window centered on each frame,
/// which reduces to (x[t+1] - x[t-1]) / 2. Output length equals input length.
pub fn delta(track: &LldTrack) -> LldTrack {
    let x = &track.values;
    let n = x.len();
    let values = (0..n)
        .map(|t| {
            let prev = x[t.saturating_sub(1)];
            let next = x[(t + 1).min(n.saturating_sub(1))];
            (next - prev) / 2.0
        })
        .collect();
    LldTrack::new(format!("{}_de", track.name), values)
}

/// Number of functionals produced per track.
pub const NUM_FUNCTIONALS: usize = 12;

/// Names of the 12 functionals, in output order.
pub const FUNCTIONAL_NAMES: [&str; NUM_FUNCTIONALS] = [
    "mean", "stddev", "kurtosis", "skewness", "min", "max", "range", "minpos", "maxpos", "slope",
    "offset", "mse",
];

/// Moment threshold below which skewness/kurtosis of a near-constant track
/// are reported as 0 instead of dividing by ~0.
const MOMENT_EPS: f64 = 1e-12;

/// Reduces a track to 12 utterance-level statistics:
/// mean, population std-dev, excess kurtosis, skewness, min, max, range,
/// relative position of the first min/max in [0, 1], and the slope,
/// offset (value at frame 0) and mean squared error of the least-squares
/// line over frame indices.
pub fn functionals(track: &LldTrack) -> Result<[f64; NUM_FUNCTIONALS]> {
    let x = &track.values;
    let n = x.len();
    if n < 2 {
        return Err(Error::TrackTooShort { len: n, needed: 2 });
    }
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
    let m3 = x.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / nf;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / nf;
    let stddev = m2.sqrt();
    let (kurtosis, skewness) = if m2 < MOMENT_EPS {
        (0.0, 0.0)
    } else {
        (m4 / (m2 * m2) - 3.0, m3 / m2.powf(1.5))
    };

    let mut min = x[0];
    let mut max = x[0];
    let mut argmin = 0usize;
    let mut argmax = 0usize;
    for (i, &v) in x.iter().enumerate() {
        if v < min {
            min = v;
            argmin = i;
        }
        if v > max {
            max = v;
            argmax = i;
        }
    }
    let minpos = argmin as f64 / (nf - 1.0);
    let maxpos = argmax as f64 / (nf - 1.0);

    // Least squares of x[t] against t = 0..n-1.
    let t_mean = (nf - 1.0) / 2.0;
    let mut st_xx = 0.0;
    let mut st_xy = 0.0;
    for (t, &v) in x.iter().enumerate() {
        let dt = t as f64 - t_mean;
        st_xx += dt * dt;
        st_xy += dt * (v - mean);
    }
    let slope = st_xy / st_xx;
    let offset = mean - slope * t_mean;
    let mse = x
        .iter()
        .enumerate()
        .map(|(t, &v)| {
            let r = v - (slope * t as f64 + offset);
            r * r
        })
        .sum::<f64>()
        / nf;

    Ok([
        mean, stddev, kurtosis, skewness, min, max, max - min, minpos, maxpos, slope, offset, mse,
    ])
}
