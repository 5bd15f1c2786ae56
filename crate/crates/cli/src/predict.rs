//! `predict`: attribute vectors for manifest utterances from the trained
//! pair models.

use std::path::Path;

use emomix_core::error::{Error, Result};
use emomix_core::io::{atomic_write, fmt_g9};
use emomix_core::manifest::{auto_split, load_manifest, Split};
use emomix_core::ranking::{predict_attribute_vector, RankingModel};

use crate::context::Ctx;
use crate::features_io::extract_entries;
use crate::runlog::RunLog;

/// Loads every `rank_*.json` in a directory.
pub fn load_models(dir: &Path) -> Result<Vec<RankingModel>> {
    let mut models = Vec::new();
    let read_dir = std::fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut paths: Vec<_> = read_dir
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .map(|n| n.starts_with("rank_") && n.ends_with(".json"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    for path in paths {
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        models.push(RankingModel::from_json(&text)?);
    }
    Ok(models)
}

pub fn run(
    ctx: &Ctx,
    manifest_path: &Path,
    models_dir: Option<&Path>,
    split: Option<Split>,
) -> Result<()> {
    let mut log = RunLog::new("predict", ctx);
    let manifest = log.stage("load_manifest", || {
        let mut m = load_manifest(manifest_path, &ctx.config.emotion_set)?;
        if m.entries.iter().any(|e| e.split.is_none()) {
            auto_split(&mut m, ctx.config.seed);
        }
        Ok(m)
    })?;
    let default_dir = ctx.models_dir();
    let models_dir = models_dir.unwrap_or(&default_dir);
    let models = log.stage("load_models", || load_models(models_dir))?;
    let expected = ctx.config.primary_pairs();

    let entries: Vec<_> = manifest
        .entries
        .iter()
        .filter(|e| split.is_none() || e.split == split)
        .collect();
    let vectors = log.stage("extract_features", || extract_entries(ctx, &entries))?;

    let attributes = log.stage("predict", || {
        entries
            .iter()
            .zip(&vectors)
            .map(|(_, v)| predict_attribute_vector(&models, &expected, &v.values))
            .collect::<Result<Vec<_>>>()
    })?;

    let keys: Vec<String> = attributes
        .first()
        .map(|a| a.entries.keys().cloned().collect())
        .unwrap_or_default();
    let mut csv = String::from("path");
    for key in &keys {
        csv.push(',');
        csv.push_str(key);
    }
    csv.push('\n');
    for (entry, attr) in entries.iter().zip(&attributes) {
        csv.push_str(&entry.path.display().to_string());
        for key in &keys {
            csv.push(',');
            csv.push_str(&fmt_g9(attr.entries[key]));
        }
        csv.push('\n');
    }
    let csv_path = ctx.out.join("attributes.csv");
    atomic_write(&csv_path, csv.as_bytes())?;
    log.output(&csv_path);
    log.summary("utterances", entries.len());
    log.summary("pairs", keys.len());
    log.write(&ctx.out)?;
    println!(
        "predicted {} attribute vectors -> {}",
        entries.len(),
        csv_path.display()
    );
    Ok(())
}
