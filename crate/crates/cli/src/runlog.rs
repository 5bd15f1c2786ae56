//! Machine-readable run log: config hash, seed, per-stage wall times, and
//! the artifacts a command produced. Written once per command as
//! `run_log.json` in the output directory. Timings vary run to run, so the
//! log is diagnostics, not a reproducibility artifact.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use emomix_core::error::Result;
use emomix_core::io::atomic_write;

use crate::context::Ctx;

#[derive(Serialize)]
struct Stage {
    name: String,
    seconds: f64,
}

#[derive(Serialize)]
pub struct RunLog {
    command: String,
    config_hash: String,
    seed: u64,
    layout_version: String,
    stages: Vec<Stage>,
    outputs: Vec<String>,
    summary: BTreeMap<String, serde_json::Value>,
}

impl RunLog {
    pub fn new(command: &str, ctx: &Ctx) -> Self {
        RunLog {
            command: command.to_string(),
            config_hash: ctx.config.config_hash(),
            seed: ctx.config.seed,
            layout_version: ctx.config.layout_version.clone(),
            stages: Vec::new(),
            outputs: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    /// Runs a stage and records its wall time.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let value = f()?;
        self.stages.push(Stage {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        Ok(value)
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn summary(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(
            key.to_string(),
            serde_json::to_value(value).expect("summary value serializes"),
        );
    }

    pub fn write(&self, out_dir: &Path) -> Result<()> {
        let path = out_dir.join("run_log.json");
        let text = serde_json::to_string_pretty(self).expect("run log serializes");
        atomic_write(&path, text.as_bytes())
    }
}
