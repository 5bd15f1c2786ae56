//! Manual emotion-attribute vectors from user mixing percentages.
//!
//! A mix declares one primary emotion plus a percentage per reference
//! emotion. Each percentage p maps to the attribute entry 1 - p/100: the
//! attribute measures stylistic *difference* from the reference, so 0%
//! admixture gives the maximal value 1.0 and 100% gives 0.0. References
//! left unspecified default to 0%.
//!
//! Two modes exist. In mixing mode the primary's own share is implicitly
//! 100% and reference percentages are free in [0, 100]. In transition mode
//! the primary's share is the remainder 100 - sum(references), so the
//! reference percentages may not total more than 100.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::{pair_key, AttributeSource, EmotionAttributeVector};

const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixMode {
    Mixing,
    Transition,
}

/// User-declared mixing request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixSpec {
    pub primary_emotion: String,
    pub reference_percentages: BTreeMap<String, f64>,
    pub mode: MixMode,
}

impl MixSpec {
    pub fn new(
        primary_emotion: impl Into<String>,
        reference_percentages: BTreeMap<String, f64>,
        mode: MixMode,
    ) -> Self {
        MixSpec {
            primary_emotion: primary_emotion.into(),
            reference_percentages,
            mode,
        }
    }

    /// Validates percentages, membership, and the transition-mode budget
    /// against the configured reference emotions.
    pub fn validate(&self, references: &[String]) -> Result<()> {
        if self.reference_percentages.contains_key(&self.primary_emotion) {
            return Err(Error::InvalidConfig(format!(
                "primary emotion '{}' cannot also be a reference",
                self.primary_emotion
            )));
        }
        for (emotion, &p) in &self.reference_percentages {
            if !references.contains(emotion) {
                return Err(Error::UnknownEmotion {
                    label: emotion.clone(),
                    context: Some("not a configured reference emotion".into()),
                });
            }
            if !p.is_finite() || !(0.0..=100.0).contains(&p) {
                return Err(Error::InvalidPercentage {
                    emotion: emotion.clone(),
                    value: p,
                });
            }
        }
        if self.mode == MixMode::Transition {
            let ref_sum: f64 = self.reference_percentages.values().sum();
            // The primary absorbs 100 - sum; a negative share means the
            // declared percentages cannot total 100.
            if ref_sum > 100.0 + SUM_TOL {
                return Err(Error::TransitionSumViolation { sum: ref_sum });
            }
        }
        Ok(())
    }
}

/// Builds the manual attribute vector for a mix over the configured
/// reference emotions. Every reference gets an entry; unspecified ones
/// count as 0% (entry 1.0).
pub fn build_manual_vector(spec: &MixSpec, references: &[String]) -> Result<EmotionAttributeVector> {
    spec.validate(references)?;
    let mut entries = BTreeMap::new();
    for emotion in references {
        let p = spec.reference_percentages.get(emotion).copied().unwrap_or(0.0);
        entries.insert(pair_key(&spec.primary_emotion, emotion), 1.0 - p / 100.0);
    }
    EmotionAttributeVector::new(entries, AttributeSource::Manual)
}

/// Recovers the percentage encoded in an attribute entry.
pub fn attribute_to_percentage(entry: f64) -> f64 {
    (1.0 - entry) * 100.0
}

/// One vector per step, varying a single reference emotion's percentage
/// while every other entry stays fixed.
pub fn sweep(
    spec: &MixSpec,
    references: &[String],
    emotion: &str,
    steps: &[f64],
) -> Result<Vec<EmotionAttributeVector>> {
    if !references.iter().any(|r| r == emotion) {
        return Err(Error::UnknownEmotion {
            label: emotion.to_string(),
            context: Some("sweep target must be a reference emotion".into()),
        });
    }
    steps
        .iter()
        .map(|&p| {
            let mut stepped = spec.clone();
            stepped.reference_percentages.insert(emotion.to_string(), p);
            build_manual_vector(&stepped, references)
        })
        .collect()
}
