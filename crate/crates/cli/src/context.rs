//! Shared command context: resolved configuration, output directory, and
//! parallelism settings.

use std::path::{Path, PathBuf};

use emomix_core::config::PipelineConfig;
use emomix_core::error::{Error, Result};

pub struct Ctx {
    pub config: PipelineConfig,
    pub out: PathBuf,
    pub jobs: Option<usize>,
}

impl Ctx {
    pub fn new(
        config_path: Option<&Path>,
        seed: Option<u64>,
        jobs: Option<usize>,
        out: &Path,
    ) -> Result<Ctx> {
        let mut config = match config_path {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(seed) = seed {
            config.seed = seed;
        }
        config.validate()?;
        std::fs::create_dir_all(out).map_err(|source| Error::Io {
            path: out.display().to_string(),
            source,
        })?;
        Ok(Ctx {
            config,
            out: out.to_path_buf(),
            jobs,
        })
    }

    pub fn models_dir(&self) -> PathBuf {
        self.out.join("models")
    }

    /// Builds the worker pool honoring `--jobs` (0/None = rayon default).
    pub fn thread_pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.unwrap_or(0))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))
    }
}
