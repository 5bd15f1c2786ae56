//! Objective similarity metrics: mel-cepstral distortion and F0 Pearson
//! correlation, with dynamic-time-warping alignment between sequences.
//!
//! The two inputs of a comparison are rarely frame-synchronous, so frames
//! are paired by DTW over the mel-cepstral sequences and the same path is
//! reused when correlating F0 contours.

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::features::{check_cepstral_order, dct_coefficients, mel_spectrogram, F0Contour};

/// dB constant of the exact distortion formula: 10 sqrt(2) / ln 10.
pub const MCD_CONST: f64 = 6.141851463713754;

/// Variance below this counts as a constant contour.
const VAR_EPS: f64 = 1e-12;

/// T x M matrix of mel-cepstral coefficients (c1..cM per frame).
#[derive(Debug, Clone, PartialEq)]
pub struct McepSequence {
    pub frames: Vec<Vec<f64>>,
    pub order: usize,
}

impl McepSequence {
    pub fn new(frames: Vec<Vec<f64>>, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidConfig("mcep order must be >= 1".into()));
        }
        for (t, frame) in frames.iter().enumerate() {
            if frame.len() != order {
                return Err(Error::DimensionMismatch {
                    expected: order,
                    got: frame.len(),
                });
            }
            if frame.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidAudio(format!(
                    "non-finite mcep value in frame {t}"
                )));
            }
        }
        Ok(McepSequence { frames, order })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Mel-cepstral coefficients 1..order from the 80-band log-mel spectrum.
/// The DC term is excluded, so the sequence is insensitive to overall gain.
pub fn extract_mcep(audio: &AudioBuffer, order: usize) -> Result<McepSequence> {
    let spec = mel_spectrogram(audio)?;
    cepstra_from_mel(&spec, order)
}

/// Like [`extract_mcep`] but on an explicit frame grid.
pub fn extract_mcep_with(
    audio: &AudioBuffer,
    order: usize,
    frame: &crate::features::FrameSpec,
) -> Result<McepSequence> {
    audio.require_pipeline_rate()?;
    let hann = crate::features::FrameSpec {
        window: crate::features::WindowKind::Hann,
        ..*frame
    };
    let spec = crate::features::log_mel_frames(audio, &hann, 80)?;
    cepstra_from_mel(&spec, order)
}

fn cepstra_from_mel(
    spec: &crate::features::MelSpectrogram,
    order: usize,
) -> Result<McepSequence> {
    check_cepstral_order(order, spec.num_bands())?;
    let frames = spec
        .frames
        .iter()
        .map(|row| dct_coefficients(row, order))
        .collect();
    McepSequence::new(frames, order)
}

/// A monotone frame correspondence between two sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentPath {
    pub pairs: Vec<(usize, usize)>,
}

impl AlignmentPath {
    /// Identity alignment for equal-length sequences.
    pub fn diagonal(len: usize) -> Self {
        AlignmentPath {
            pairs: (0..len).map(|i| (i, i)).collect(),
        }
    }

    /// Checks endpoints and step increments against the path contract.
    pub fn validate(&self, len_a: usize, len_b: usize) -> Result<()> {
        let bad = |msg: String| Error::InvalidConfig(format!("invalid alignment path: {msg}"));
        if self.pairs.is_empty() {
            return Err(bad("empty".into()));
        }
        if self.pairs[0] != (0, 0) {
            return Err(bad(format!("starts at {:?}", self.pairs[0])));
        }
        let last = *self.pairs.last().unwrap();
        if last != (len_a - 1, len_b - 1) {
            return Err(bad(format!("ends at {last:?}")));
        }
        for w in self.pairs.windows(2) {
            let di = w[1].0 as i64 - w[0].0 as i64;
            let dj = w[1].1 as i64 - w[0].1 as i64;
            if !matches!((di, dj), (1, 0) | (0, 1) | (1, 1)) {
                return Err(bad(format!("step {:?} -> {:?}", w[0], w[1])));
            }
        }
        Ok(())
    }
}

fn frame_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Minimum-cost monotone alignment under steps {(1,0), (0,1), (1,1)} with
/// Euclidean frame distance. Ties during backtracking prefer the diagonal
/// step, then (1,0).
pub fn dtw_align(a: &McepSequence, b: &McepSequence) -> Result<AlignmentPath> {
    if a.order != b.order {
        return Err(Error::OrderMismatch {
            a: a.order,
            b: b.order,
        });
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidConfig(
            "cannot align an empty sequence".into(),
        ));
    }
    let (ta, tb) = (a.len(), b.len());
    let mut cost = vec![vec![0.0f64; tb]; ta];
    for i in 0..ta {
        for j in 0..tb {
            let d = frame_distance(&a.frames[i], &b.frames[j]);
            let prev = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cost[0][j - 1],
                (_, 0) => cost[i - 1][0],
                _ => cost[i - 1][j - 1].min(cost[i - 1][j]).min(cost[i][j - 1]),
            };
            cost[i][j] = d + prev;
        }
    }

    let mut pairs = Vec::with_capacity(ta.max(tb));
    let (mut i, mut j) = (ta - 1, tb - 1);
    pairs.push((i, j));
    while i > 0 || j > 0 {
        if i == 0 {
            j -= 1;
        } else if j == 0 {
            i -= 1;
        } else {
            let diag = cost[i - 1][j - 1];
            let up = cost[i - 1][j];
            let left = cost[i][j - 1];
            if diag <= up && diag <= left {
                i -= 1;
                j -= 1;
            } else if up <= left {
                i -= 1;
            } else {
                j -= 1;
            }
        }
        pairs.push((i, j));
    }
    pairs.reverse();
    Ok(AlignmentPath { pairs })
}

/// Summed frame distance along a path.
pub fn path_cost(a: &McepSequence, b: &McepSequence, path: &AlignmentPath) -> f64 {
    path.pairs
        .iter()
        .map(|&(i, j)| frame_distance(&a.frames[i], &b.frames[j]))
        .sum()
}

/// Which constant placement the distortion uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McdVariant {
    /// (10 sqrt(2) / ln 10) * (1/M) * sqrt(sum d^2) per aligned pair.
    Exact,
    /// The common literature form (10 / ln 10) * sqrt(2 sum d^2).
    SqrtTwoSum,
}

/// Mel-cepstral distortion in dB: sequences are DTW-aligned, the per-pair
/// distortion is evaluated with the chosen constant placement, and the
/// result is the average over the path.
pub fn mcd_with_variant(
    reference: &McepSequence,
    test: &McepSequence,
    variant: McdVariant,
) -> Result<f64> {
    let path = dtw_align(reference, test)?;
    Ok(mcd_along_path(reference, test, &path, variant))
}

/// Distortion averaged over an existing alignment.
pub fn mcd_along_path(
    reference: &McepSequence,
    test: &McepSequence,
    path: &AlignmentPath,
    variant: McdVariant,
) -> f64 {
    let m = reference.order as f64;
    let mut total = 0.0;
    for &(i, j) in &path.pairs {
        let sum_sq: f64 = reference.frames[i]
            .iter()
            .zip(&test.frames[j])
            .map(|(y, yh)| (y - yh) * (y - yh))
            .sum();
        total += match variant {
            McdVariant::Exact => MCD_CONST / m * sum_sq.sqrt(),
            McdVariant::SqrtTwoSum => 10.0 / std::f64::consts::LN_10 * (2.0 * sum_sq).sqrt(),
        };
    }
    total / path.pairs.len() as f64
}

/// Distortion with the exact constant placement.
pub fn mcd(reference: &McepSequence, test: &McepSequence) -> Result<f64> {
    mcd_with_variant(reference, test, McdVariant::Exact)
}

/// Pearson correlation between two F0 contours over the aligned frames in
/// which both sides are voiced. Frames where either contour is 0.0 are
/// excluded after alignment.
pub fn f0_pcc(reference: &F0Contour, test: &F0Contour, path: &AlignmentPath) -> Result<f64> {
    path.validate(reference.values.len(), test.values.len())?;
    let voiced: Vec<(f64, f64)> = path
        .pairs
        .iter()
        .filter_map(|&(i, j)| {
            let r = reference.values[i];
            let t = test.values[j];
            (r > 0.0 && t > 0.0).then_some((r, t))
        })
        .collect();
    if voiced.len() < 2 {
        return Err(Error::InsufficientVoicedOverlap {
            usable: voiced.len(),
        });
    }
    let n = voiced.len() as f64;
    let mean_r = voiced.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_t = voiced.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_r = 0.0;
    let mut var_t = 0.0;
    for &(r, t) in &voiced {
        cov += (r - mean_r) * (t - mean_t);
        var_r += (r - mean_r) * (r - mean_r);
        var_t += (t - mean_t) * (t - mean_t);
    }
    if var_r < VAR_EPS {
        return Err(Error::ZeroVariance {
            which: "reference".into(),
        });
    }
    if var_t < VAR_EPS {
        return Err(Error::ZeroVariance {
            which: "test".into(),
        });
    }
    Ok((cov / (var_r.sqrt() * var_t.sqrt())).clamp(-1.0, 1.0))
}
