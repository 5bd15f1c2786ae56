//! Batch feature extraction over manifest entries with the on-disk cache,
//! fanned out across the worker pool. Results come back in manifest order
//! regardless of thread count.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use emomix_core::cache;
use emomix_core::error::{Error, Result};
use emomix_core::features::{extract_feature_vector_opts, FeatureVector, WindowKind};
use emomix_core::io::{atomic_write, fmt_g9};
use emomix_core::load_wav;
use emomix_core::manifest::ManifestEntry;

use crate::context::Ctx;

pub fn cache_dir(ctx: &Ctx) -> PathBuf {
    ctx.out.join("cache")
}

/// Extracts (or loads from cache) the feature vector of every entry.
pub fn extract_entries(ctx: &Ctx, entries: &[&ManifestEntry]) -> Result<Vec<FeatureVector>> {
    let dir = cache_dir(ctx);
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let frame = ctx.config.frame_spec(WindowKind::Hann);
    let pitch = ctx.config.f0;
    let pool = ctx.thread_pool()?;
    pool.install(|| {
        entries
            .par_iter()
            .map(|entry| {
                let bytes = std::fs::read(&entry.path).map_err(|source| Error::Io {
                    path: entry.path.display().to_string(),
                    source,
                })?;
                if let Some(hit) = cache::lookup(&dir, &bytes, &ctx.config.layout_version) {
                    return Ok(hit);
                }
                let audio = load_wav(&entry.path)?;
                let vector = extract_feature_vector_opts(&audio, &frame, &pitch)?;
                cache::store(&dir, &bytes, &vector)?;
                Ok(vector)
            })
            .collect()
    })
}

/// Writes the feature CSV: one row per utterance, path plus 384 columns.
pub fn write_feature_csv(
    path: &Path,
    entries: &[&ManifestEntry],
    vectors: &[FeatureVector],
) -> Result<()> {
    let mut out = String::from("path");
    for name in emomix_core::features::feature_names() {
        out.push(',');
        out.push_str(&name);
    }
    out.push('\n');
    for (entry, vector) in entries.iter().zip(vectors) {
        out.push_str(&entry.path.display().to_string());
        for v in &vector.values {
            out.push(',');
            out.push_str(&fmt_g9(*v));
        }
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}
