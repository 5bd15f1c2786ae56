//! Pipeline configuration: emotion set, analysis constants, solver knobs,
//! and seeds. Loaded from JSON with every field optional; omitted fields
//! take the documented defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::{FrameSpec, PitchOptions, WindowKind, LAYOUT_VERSION};
use crate::probe::TrainConfig;
use crate::ranking::{PairSampling, SolverOptions};

fn default_emotion_set() -> Vec<String> {
    ["neutral", "angry", "happy", "sad", "surprise"]
        .map(String::from)
        .to_vec()
}

fn default_primary() -> String {
    "surprise".to_string()
}

fn default_c() -> f64 {
    0.1
}

fn default_frame_length() -> f64 {
    0.050
}

fn default_hop_length() -> f64 {
    0.0125
}

fn default_mcep_order() -> usize {
    24
}

fn default_layout() -> String {
    LAYOUT_VERSION.to_string()
}

fn default_seed() -> u64 {
    42
}

fn default_similar_cap() -> usize {
    4
}

fn default_probe_noise() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub emotion_set: Vec<String>,
    pub primary_emotion: String,
    /// Margin/slack trade-off C of the ranking objective.
    pub c_tradeoff: f64,
    pub solver: SolverOptions,
    /// Within-set pairs capped at this multiple of ordered pairs.
    pub similar_pair_cap_factor: usize,
    pub frame_length_s: f64,
    pub hop_length_s: f64,
    pub f0: PitchOptions,
    pub mcep_order: usize,
    pub probe: ProbeSection,
    pub layout_version: String,
    pub seed: u64,
}

/// Probe hyperparameters without the seed (the pipeline seed is reused).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeSection {
    pub learning_rate: f64,
    pub l2_penalty: f64,
    pub epochs: usize,
    pub noise_sigma: f64,
}

impl Default for ProbeSection {
    fn default() -> Self {
        ProbeSection {
            learning_rate: 1.0,
            l2_penalty: 1e-4,
            epochs: 200,
            noise_sigma: default_probe_noise(),
        }
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            emotion_set: default_emotion_set(),
            primary_emotion: default_primary(),
            c_tradeoff: default_c(),
            solver: SolverOptions::default(),
            similar_pair_cap_factor: default_similar_cap(),
            frame_length_s: default_frame_length(),
            hop_length_s: default_hop_length(),
            f0: PitchOptions::default(),
            mcep_order: default_mcep_order(),
            probe: ProbeSection::default(),
            layout_version: default_layout(),
            seed: default_seed(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: PipelineConfig =
            serde_json::from_str(&text).map_err(|e| Error::ParseError {
                path: path.display().to_string(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.emotion_set.len() < 2 {
            return Err(Error::InvalidConfig(
                "emotion set needs at least 2 labels".into(),
            ));
        }
        let mut sorted = self.emotion_set.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.emotion_set.len() {
            return Err(Error::InvalidConfig("duplicate emotion labels".into()));
        }
        if !self.emotion_set.contains(&self.primary_emotion) {
            return Err(Error::UnknownEmotion {
                label: self.primary_emotion.clone(),
                context: Some("primary emotion not in emotion set".into()),
            });
        }
        if !(self.c_tradeoff.is_finite() && self.c_tradeoff > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "c_tradeoff must be positive, got {}",
                self.c_tradeoff
            )));
        }
        FrameSpec::new(self.frame_length_s, self.hop_length_s, WindowKind::Hann)?;
        if self.mcep_order == 0 || self.mcep_order >= 80 {
            return Err(Error::InvalidConfig(format!(
                "mcep_order must be in 1..80, got {}",
                self.mcep_order
            )));
        }
        if !(self.f0.f_min > 0.0 && self.f0.f_min < self.f0.f_max) {
            return Err(Error::InvalidConfig(format!(
                "f0 range [{}, {}] invalid",
                self.f0.f_min, self.f0.f_max
            )));
        }
        if self.layout_version != LAYOUT_VERSION {
            return Err(Error::InvalidConfig(format!(
                "layout_version '{}' not produced by this build (only '{LAYOUT_VERSION}')",
                self.layout_version
            )));
        }
        self.probe_train_config().validate()?;
        Ok(())
    }

    /// Reference emotions: the configured set minus the primary.
    pub fn reference_emotions(&self) -> Vec<String> {
        self.emotion_set
            .iter()
            .filter(|e| **e != self.primary_emotion)
            .cloned()
            .collect()
    }

    /// (primary, reference) pairs, one ranking model each.
    pub fn primary_pairs(&self) -> Vec<(String, String)> {
        self.reference_emotions()
            .into_iter()
            .map(|e| (self.primary_emotion.clone(), e))
            .collect()
    }

    /// All unordered pairs, for the full pairwise mode.
    pub fn all_pairs(&self) -> Vec<(String, String)> {
        let mut pairs = Vec::new();
        for i in 0..self.emotion_set.len() {
            for j in i + 1..self.emotion_set.len() {
                pairs.push((self.emotion_set[i].clone(), self.emotion_set[j].clone()));
            }
        }
        pairs
    }

    pub fn frame_spec(&self, window: WindowKind) -> FrameSpec {
        FrameSpec {
            frame_length: self.frame_length_s,
            hop_length: self.hop_length_s,
            window,
        }
    }

    pub fn pair_sampling(&self) -> PairSampling {
        PairSampling {
            cap_factor: self.similar_pair_cap_factor,
            seed: self.seed,
        }
    }

    pub fn probe_train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.probe.learning_rate,
            l2_penalty: self.probe.l2_penalty,
            epochs: self.probe.epochs,
            noise_sigma: self.probe.noise_sigma,
            seed: self.seed,
        }
    }

    /// SHA-256 over the canonical JSON form; identifies a run's settings.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex_string(&hasher.finalize())
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
