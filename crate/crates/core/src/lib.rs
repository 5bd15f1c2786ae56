//! emomix-core: relative emotion attributes for speech.
//!
//! The crate covers the non-neural core of a mixed-emotion voice pipeline:
//!
//! * [`features`] — deterministic 384-dimensional acoustic descriptors;
//! * [`ranking`] — max-margin pairwise ranking functions, one per emotion
//!   pair, with score normalization into [0, 1] attributes;
//! * [`mixer`] — manual attribute vectors built from mixing percentages;
//! * [`metrics`] — mel-cepstral distortion and F0 Pearson correlation with
//!   dynamic-time-warping alignment;
//! * [`probe`] — a linear softmax classifier over feature vectors used to
//!   analyze how class probabilities move along feature-space sweeps;
//! * [`manifest`], [`config`], [`cache`] — dataset description, pipeline
//!   configuration, and the on-disk feature cache.

pub mod audio;
pub mod cache;
pub mod config;
pub mod error;
pub mod features;
pub mod io;
pub mod manifest;
pub mod metrics;
pub mod mixer;
pub mod probe;
pub mod ranking;

pub use audio::{load_wav, AudioBuffer, PIPELINE_SAMPLE_RATE};
pub use error::{Error, Result};
pub use features::{extract_feature_vector, FeatureVector, FEATURE_DIM, LAYOUT_VERSION};
