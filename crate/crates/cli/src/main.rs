//! emomix: relative emotion attributes for speech, end to end.
//!
//! Subcommands cover the full pipeline: feature extraction, pair-ranking
//! training and prediction, manual mixing vectors, distortion/correlation
//! evaluation, and the softmax probe. Every run writes a machine-readable
//! `run_log.json` into the output directory; errors print a single JSON
//! line on stderr and exit with a per-category code.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use emomix_core::error::{Error, Result};
use emomix_core::manifest::Split;

mod context;
mod evaluate;
mod extract;
mod features_io;
mod mixing;
mod plot;
mod predict;
mod probing;
mod report;
mod runlog;
mod train_rank;

use context::Ctx;

#[derive(Parser)]
#[command(name = "emomix", version, about = "Relative emotion attribute toolkit")]
struct Cli {
    /// Pipeline configuration JSON; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for extraction and evaluation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory for artifacts and the run log.
    #[arg(long, global = true, default_value = "emomix_out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract 384-dim feature vectors for a manifest into CSV + cache.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        /// Feature CSV path (default: <out>/features.csv).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Train one ranking model per emotion pair on the train split.
    TrainRank {
        #[arg(long)]
        manifest: PathBuf,
        /// Train all unordered pairs instead of primary-vs-reference only.
        #[arg(long)]
        all_pairs: bool,
    },
    /// Predict attribute vectors for manifest utterances.
    Predict {
        #[arg(long)]
        manifest: PathBuf,
        /// Directory of rank_*.json models (default: <out>/models).
        #[arg(long)]
        models: Option<PathBuf>,
        /// Restrict to one split: train, test, or eval.
        #[arg(long, value_parser = parse_split)]
        split: Option<Split>,
    },
    /// Build a manual attribute vector from mixing percentages.
    Mix {
        /// Primary emotion (default: configured primary).
        #[arg(long)]
        primary: Option<String>,
        /// Reference percentage, repeatable: --mix angry=90.
        #[arg(long = "mix", value_name = "EMOTION=PERCENT")]
        mixes: Vec<String>,
        /// Enforce the transition budget (percentages total 100).
        #[arg(long)]
        transition: bool,
        /// MixSpec as JSON instead of flags.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Output CSV (default: <out>/mix.csv).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Vectors for a grid of percentages of one reference emotion.
    Sweep {
        #[arg(long)]
        primary: Option<String>,
        #[arg(long = "mix", value_name = "EMOTION=PERCENT")]
        mixes: Vec<String>,
        #[arg(long)]
        transition: bool,
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Reference emotion to sweep.
        #[arg(long)]
        emotion: String,
        /// Percentages, comma separated: --steps 0,30,60,90.
        #[arg(long, value_delimiter = ',')]
        steps: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Mel-cepstral distortion between two manifests, row by row.
    EvalMcd {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        test: Option<PathBuf>,
        /// Extra series for the percentage plot: --series 30=manifest.csv.
        #[arg(long = "series", value_name = "PERCENT=MANIFEST")]
        series: Vec<String>,
        /// SVG line plot of mean score vs percentage (needs --series).
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Use the common literature constant (10/ln10)*sqrt(2*sum).
        #[arg(long)]
        common_variant: bool,
    },
    /// F0 Pearson correlation between two manifests, row by row.
    EvalPcc {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long = "series", value_name = "PERCENT=MANIFEST")]
        series: Vec<String>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Train the softmax probe on the train split.
    ProbeTrain {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Per-utterance class probabilities; optional feature-space sweep.
    ProbeEval {
        #[arg(long)]
        manifest: PathBuf,
        /// Probe JSON (default: <out>/models/probe.json).
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        sweep_from: Option<PathBuf>,
        #[arg(long)]
        sweep_to: Option<PathBuf>,
        /// Interpolation points for the sweep.
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Summarize the artifacts in the output directory.
    Report {
        #[arg(long)]
        json: bool,
    },
}

fn parse_split(text: &str) -> std::result::Result<Split, String> {
    match text {
        "train" => Ok(Split::Train),
        "test" => Ok(Split::Test),
        "eval" => Ok(Split::Eval),
        other => Err(format!("unknown split '{other}' (train/test/eval)")),
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let ctx = Ctx::new(cli.config.as_deref(), cli.seed, cli.jobs, &cli.out)?;
    match cli.command {
        Command::Extract { manifest, csv } => extract::run(&ctx, &manifest, csv.as_deref()),
        Command::TrainRank {
            manifest,
            all_pairs,
        } => train_rank::run(&ctx, &manifest, all_pairs),
        Command::Predict {
            manifest,
            models,
            split,
        } => predict::run(&ctx, &manifest, models.as_deref(), split),
        Command::Mix {
            primary,
            mixes,
            transition,
            spec,
            output,
        } => mixing::run_mix(
            &ctx,
            spec.as_deref(),
            primary.as_deref(),
            &mixes,
            transition,
            output.as_deref(),
        ),
        Command::Sweep {
            primary,
            mixes,
            transition,
            spec,
            emotion,
            steps,
            output,
        } => mixing::run_sweep(
            &ctx,
            spec.as_deref(),
            primary.as_deref(),
            &mixes,
            transition,
            &emotion,
            &steps,
            output.as_deref(),
        ),
        Command::EvalMcd {
            reference,
            test,
            series,
            svg,
            common_variant,
        } => evaluate::run(
            &ctx,
            evaluate::Metric::Mcd,
            &reference,
            test.as_deref(),
            &series,
            svg.as_deref(),
            common_variant,
        ),
        Command::EvalPcc {
            reference,
            test,
            series,
            svg,
        } => evaluate::run(
            &ctx,
            evaluate::Metric::Pcc,
            &reference,
            test.as_deref(),
            &series,
            svg.as_deref(),
            false,
        ),
        Command::ProbeTrain { manifest } => probing::run_train(&ctx, &manifest),
        Command::ProbeEval {
            manifest,
            model,
            sweep_from,
            sweep_to,
            steps,
            svg,
        } => probing::run_eval(
            &ctx,
            &manifest,
            model.as_deref(),
            sweep_from.as_deref(),
            sweep_to.as_deref(),
            steps,
            svg.as_deref(),
        ),
        Command::Report { json } => report::run(&ctx, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            report_error(&err);
            ExitCode::from(err.exit_code().clamp(1, 255) as u8)
        }
    }
}

/// One machine-parseable line on stderr per failure.
fn report_error(err: &Error) {
    let diagnostic = serde_json::json!({
        "error": err.code(),
        "message": err.to_string(),
    });
    eprintln!("{diagnostic}");
}
