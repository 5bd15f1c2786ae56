//! Error type shared by all toolkit modules.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The signal is shorter than a single analysis frame.
    #[error("audio too short: {samples} samples, need at least {needed}")]
    AudioTooShort { samples: usize, needed: usize },

    /// Sample out of [-1, 1] or non-finite, or an unusable sample rate.
    #[error("invalid audio: {0}")]
    InvalidAudio(String),

    /// The pipeline only accepts 16 kHz mono PCM16 input.
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    /// F0 search range violates 0 < f_min < f_max < sample_rate / 2.
    #[error("invalid F0 range: f_min={f_min}, f_max={f_max}, sample_rate={sample_rate}")]
    InvalidRange {
        f_min: f64,
        f_max: f64,
        sample_rate: u32,
    },

    /// Functionals need at least two frames.
    #[error("track too short: {len} values, need at least {needed}")]
    TrackTooShort { len: usize, needed: usize },

    /// A ranking problem was given an empty emotion set.
    #[error("empty emotion set: {0}")]
    EmptyEmotionSet(String),

    /// Vector length differs from what the model expects.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// No trained model for a configured emotion pair.
    #[error("missing pair model: {pair}")]
    MissingPairModel { pair: String },

    /// Mixing percentage outside [0, 100].
    #[error("invalid percentage for '{emotion}': {value} (must be in [0, 100])")]
    InvalidPercentage { emotion: String, value: f64 },

    /// Transition-mode percentages (with the primary's implicit share) must total 100.
    #[error("transition percentages sum to {sum}, which exceeds 100")]
    TransitionSumViolation { sum: f64 },

    /// Emotion label not in the configured set.
    #[error("unknown emotion '{label}'{}", context.as_deref().map(|c| format!(" ({c})")).unwrap_or_default())]
    UnknownEmotion {
        label: String,
        context: Option<String>,
    },

    /// Mel-cepstral sequences being compared have different orders.
    #[error("mcep order mismatch: {a} vs {b}")]
    OrderMismatch { a: usize, b: usize },

    /// Fewer than two mutually voiced aligned frames.
    #[error("insufficient voiced overlap: {usable} usable pairs, need at least 2")]
    InsufficientVoicedOverlap { usable: usize },

    /// An F0 contour has zero variance over the compared frames.
    #[error("zero variance in F0 contour ({which})")]
    ZeroVariance { which: String },

    /// Probe training needs at least two distinct classes with samples.
    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    /// Manifest or config parse failure with location.
    #[error("parse error at {path}:{line}:{column}: {message}")]
    ParseError {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    /// Manifest references a file that does not exist.
    #[error("missing file: {path} (manifest line {line})")]
    MissingFile { path: String, line: usize },

    /// Manifest lists the same path twice.
    #[error("duplicate path: {path} (manifest line {line})")]
    DuplicatePath { path: String, line: usize },

    /// Cache file is corrupt or from an incompatible layout.
    #[error("bad cache file {path}: {message}")]
    BadCache { path: String, message: String },

    /// Configuration value out of range or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code for each error category.
    pub fn code(&self) -> &'static str {
        match self {
            Error::AudioTooShort { .. } => "audio_too_short",
            Error::InvalidAudio(_) => "invalid_audio",
            Error::UnsupportedFormat(_) => "unsupported_format",
            Error::InvalidRange { .. } => "invalid_range",
            Error::TrackTooShort { .. } => "track_too_short",
            Error::EmptyEmotionSet(_) => "empty_emotion_set",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::MissingPairModel { .. } => "missing_pair_model",
            Error::InvalidPercentage { .. } => "invalid_percentage",
            Error::TransitionSumViolation { .. } => "transition_sum_violation",
            Error::UnknownEmotion { .. } => "unknown_emotion",
            Error::OrderMismatch { .. } => "order_mismatch",
            Error::InsufficientVoicedOverlap { .. } => "insufficient_voiced_overlap",
            Error::ZeroVariance { .. } => "zero_variance",
            Error::DegenerateLabels(_) => "degenerate_labels",
            Error::ParseError { .. } => "parse_error",
            Error::MissingFile { .. } => "missing_file",
            Error::DuplicatePath { .. } => "duplicate_path",
            Error::BadCache { .. } => "bad_cache",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Io { .. } => "io_error",
            Error::Json(_) => "json_error",
        }
    }

    /// Process exit code for the CLI; one per error family.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::UnknownEmotion { .. } => 2,
            Error::ParseError { .. } | Error::MissingFile { .. } | Error::DuplicatePath { .. } => 3,
            Error::AudioTooShort { .. }
            | Error::InvalidAudio(_)
            | Error::UnsupportedFormat(_)
            | Error::InvalidRange { .. }
            | Error::TrackTooShort { .. } => 4,
            Error::EmptyEmotionSet(_)
            | Error::DimensionMismatch { .. }
            | Error::MissingPairModel { .. } => 5,
            Error::OrderMismatch { .. }
            | Error::InsufficientVoicedOverlap { .. }
            | Error::ZeroVariance { .. } => 6,
            Error::DegenerateLabels(_) => 7,
            Error::InvalidPercentage { .. } | Error::TransitionSumViolation { .. } => 8,
            Error::BadCache { .. } | Error::Io { .. } | Error::Json(_) => 9,
        }
    }
}
