//! `eval-mcd` and `eval-pcc`: objective similarity between a reference and
//! a test manifest, paired row by row. F0 correlation reuses the DTW path
//! computed on the mel-cepstra.

use std::path::Path;

use rayon::prelude::*;

use emomix_core::error::{Error, Result};
use emomix_core::features::{estimate_pitch, WindowKind};
use emomix_core::io::{atomic_write, fmt_g9};
use emomix_core::load_wav;
use emomix_core::manifest::{load_manifest, Manifest, ManifestEntry};
use emomix_core::metrics::{dtw_align, extract_mcep_with, f0_pcc, mcd_along_path, McdVariant};

use crate::context::Ctx;
use crate::plot::{LinePlot, Series};
use crate::runlog::RunLog;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mcd,
    Pcc,
}

impl Metric {
    fn name(self) -> &'static str {
        match self {
            Metric::Mcd => "mcd",
            Metric::Pcc => "pcc",
        }
    }

    fn y_label(self) -> &'static str {
        match self {
            Metric::Mcd => "MCD [dB]",
            Metric::Pcc => "F0 PCC",
        }
    }
}

fn score_pair(
    ctx: &Ctx,
    metric: Metric,
    variant: McdVariant,
    reference: &ManifestEntry,
    test: &ManifestEntry,
) -> Result<f64> {
    let frame = ctx.config.frame_spec(WindowKind::Hann);
    let ref_audio = load_wav(&reference.path)?;
    let test_audio = load_wav(&test.path)?;
    let ref_mcep = extract_mcep_with(&ref_audio, ctx.config.mcep_order, &frame)?;
    let test_mcep = extract_mcep_with(&test_audio, ctx.config.mcep_order, &frame)?;
    let path = dtw_align(&ref_mcep, &test_mcep)?;
    match metric {
        Metric::Mcd => Ok(mcd_along_path(&ref_mcep, &test_mcep, &path, variant)),
        Metric::Pcc => {
            let rect = ctx.config.frame_spec(WindowKind::Rectangular);
            let ref_f0 = estimate_pitch(&ref_audio, &rect, &ctx.config.f0)?;
            let test_f0 = estimate_pitch(&test_audio, &rect, &ctx.config.f0)?;
            let ref_contour = emomix_core::features::F0Contour {
                values: ref_f0.f0,
                frame_spec: rect,
            };
            let test_contour = emomix_core::features::F0Contour {
                values: test_f0.f0,
                frame_spec: rect,
            };
            f0_pcc(&ref_contour, &test_contour, &path)
        }
    }
}

fn paired<'a>(
    reference: &'a Manifest,
    test: &'a Manifest,
) -> Result<Vec<(&'a ManifestEntry, &'a ManifestEntry)>> {
    if reference.len() != test.len() {
        return Err(Error::InvalidConfig(format!(
            "reference manifest has {} entries but test has {}; pairing is by row",
            reference.len(),
            test.len()
        )));
    }
    Ok(reference.entries.iter().zip(test.entries.iter()).collect())
}

fn mean_std(scores: &[f64]) -> (f64, f64) {
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Parses a repeated `--series percent=manifest.csv` flag.
fn parse_series(flag: &str) -> Result<(f64, &str)> {
    let (percent, path) = flag.split_once('=').ok_or_else(|| {
        Error::InvalidConfig(format!(
            "--series expects percent=manifest path, got '{flag}'"
        ))
    })?;
    let percent: f64 = percent
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad series percent '{percent}'")))?;
    Ok((percent, path))
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    ctx: &Ctx,
    metric: Metric,
    reference_path: &Path,
    test_path: Option<&Path>,
    series_flags: &[String],
    svg_path: Option<&Path>,
    common_variant: bool,
) -> Result<()> {
    if test_path.is_none() && series_flags.is_empty() {
        return Err(Error::InvalidConfig(
            "need --test or at least one --series".into(),
        ));
    }
    let variant = if common_variant {
        McdVariant::SqrtTwoSum
    } else {
        McdVariant::Exact
    };
    let mut log = RunLog::new(&format!("eval-{}", metric.name()), ctx);
    let reference = log.stage("load_reference", || {
        load_manifest(reference_path, &ctx.config.emotion_set)
    })?;
    let pool = ctx.thread_pool()?;

    if let Some(test_path) = test_path {
        let test = log.stage("load_test", || {
            load_manifest(test_path, &ctx.config.emotion_set)
        })?;
        let pairs = paired(&reference, &test)?;
        let scores: Vec<f64> = log.stage("score_pairs", || {
            pool.install(|| {
                pairs
                    .par_iter()
                    .map(|(r, t)| score_pair(ctx, metric, variant, r, t))
                    .collect()
            })
        })?;

        let mut csv = String::from("reference,test,score\n");
        for ((r, t), score) in pairs.iter().zip(&scores) {
            csv.push_str(&format!(
                "{},{},{}\n",
                r.path.display(),
                t.path.display(),
                fmt_g9(*score)
            ));
        }
        let csv_path = ctx.out.join(format!("{}.csv", metric.name()));
        atomic_write(&csv_path, csv.as_bytes())?;
        log.output(&csv_path);

        let (mean, std) = mean_std(&scores);
        log.summary("mean", mean);
        log.summary("std", std);
        println!(
            "{} over {} pairs: mean {} +/- {} -> {}",
            metric.name(),
            scores.len(),
            fmt_g9(mean),
            fmt_g9(std),
            csv_path.display()
        );
    }

    if !series_flags.is_empty() {
        let mut points = Vec::new();
        let mut csv = String::from("percent,mean,std,pairs\n");
        for flag in series_flags {
            let (percent, path_text) = parse_series(flag)?;
            let series_manifest = load_manifest(Path::new(path_text), &ctx.config.emotion_set)?;
            let pairs = paired(&reference, &series_manifest)?;
            let scores: Vec<f64> = pool.install(|| {
                pairs
                    .par_iter()
                    .map(|(r, t)| score_pair(ctx, metric, variant, r, t))
                    .collect::<Result<_>>()
            })?;
            let (mean, std) = mean_std(&scores);
            csv.push_str(&format!(
                "{},{},{},{}\n",
                fmt_g9(percent),
                fmt_g9(mean),
                fmt_g9(std),
                scores.len()
            ));
            points.push((percent, mean));
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let series_path = ctx.out.join(format!("{}_series.csv", metric.name()));
        atomic_write(&series_path, csv.as_bytes())?;
        log.output(&series_path);

        if let Some(svg_path) = svg_path {
            let plot = LinePlot {
                title: format!("{} vs mixing percentage", metric.y_label()),
                x_label: "reference emotion percentage".into(),
                y_label: metric.y_label().into(),
                series: vec![Series {
                    name: metric.name().into(),
                    points,
                }],
            };
            atomic_write(svg_path, plot.render().as_bytes())?;
            log.output(svg_path);
            println!("series plot -> {}", svg_path.display());
        }
    } else if svg_path.is_some() {
        return Err(Error::InvalidConfig(
            "--svg requires --series points to plot".into(),
        ));
    }

    log.write(&ctx.out)?;
    Ok(())
}
