//! `extract`: manifest in, feature CSV plus cache entries out.

use std::path::Path;

use emomix_core::error::Result;
use emomix_core::manifest::{auto_split, load_manifest};

use crate::context::Ctx;
use crate::features_io::{extract_entries, write_feature_csv};
use crate::runlog::RunLog;

pub fn run(ctx: &Ctx, manifest_path: &Path, csv_path: Option<&Path>) -> Result<()> {
    let mut log = RunLog::new("extract", ctx);
    let manifest = log.stage("load_manifest", || {
        let mut m = load_manifest(manifest_path, &ctx.config.emotion_set)?;
        if m.entries.iter().any(|e| e.split.is_none()) {
            auto_split(&mut m, ctx.config.seed);
        }
        Ok(m)
    })?;
    let entries: Vec<_> = manifest.entries.iter().collect();
    let vectors = log.stage("extract_features", || extract_entries(ctx, &entries))?;

    let default_csv = ctx.out.join("features.csv");
    let csv_path = csv_path.unwrap_or(&default_csv);
    log.stage("write_csv", || write_feature_csv(csv_path, &entries, &vectors))?;
    log.output(csv_path);
    log.summary("utterances", entries.len());
    log.write(&ctx.out)?;
    println!(
        "extracted {} utterances -> {}",
        entries.len(),
        csv_path.display()
    );
    Ok(())
}
