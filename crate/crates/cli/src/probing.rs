//! `probe-train` and `probe-eval`: the linear softmax probe over feature
//! vectors, plus probability curves along feature-space sweeps.

use std::path::Path;

use emomix_core::error::{Error, Result};
use emomix_core::features::WindowKind;
use emomix_core::io::{atomic_write, fmt_g9};
use emomix_core::load_wav;
use emomix_core::manifest::{auto_split, load_manifest, Split};
use emomix_core::probe::{accuracy, classify, probability_sweep, train_probe, ProbeModel};

use crate::context::Ctx;
use crate::features_io::extract_entries;
use crate::plot::{LinePlot, Series};
use crate::runlog::RunLog;

type LabeledRows = (Vec<(Vec<f64>, String)>, Vec<String>);

fn labeled_rows(ctx: &Ctx, manifest_path: &Path, split: Option<Split>) -> Result<LabeledRows> {
    let mut manifest = load_manifest(manifest_path, &ctx.config.emotion_set)?;
    if manifest.entries.iter().any(|e| e.split.is_none()) {
        auto_split(&mut manifest, ctx.config.seed);
    }
    let entries: Vec<_> = manifest
        .entries
        .iter()
        .filter(|e| split.is_none() || e.split == split)
        .collect();
    let vectors = extract_entries(ctx, &entries)?;
    let paths = entries
        .iter()
        .map(|e| e.path.display().to_string())
        .collect();
    Ok((
        entries
            .iter()
            .zip(vectors)
            .map(|(e, v)| (v.values, e.emotion.clone()))
            .collect(),
        paths,
    ))
}

pub fn run_train(ctx: &Ctx, manifest_path: &Path) -> Result<()> {
    let mut log = RunLog::new("probe-train", ctx);
    let (train_data, _) =
        log.stage("extract_train", || labeled_rows(ctx, manifest_path, Some(Split::Train)))?;
    let model = log.stage("train_probe", || {
        train_probe(&train_data, &ctx.config.probe_train_config())
    })?;

    let model_path = ctx.models_dir().join("probe.json");
    atomic_write(&model_path, model.to_json()?.as_bytes())?;
    log.output(&model_path);

    let train_acc = accuracy(&model, &train_data)?;
    log.summary("train_accuracy", train_acc);
    let mut line = format!("probe trained: train_accuracy={}", fmt_g9(train_acc));
    let (test_data, _) = labeled_rows(ctx, manifest_path, Some(Split::Test))?;
    if !test_data.is_empty() {
        let test_acc = accuracy(&model, &test_data)?;
        log.summary("test_accuracy", test_acc);
        line.push_str(&format!(" test_accuracy={}", fmt_g9(test_acc)));
    }
    println!("{line} -> {}", model_path.display());
    log.write(&ctx.out)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn run_eval(
    ctx: &Ctx,
    manifest_path: &Path,
    model_path: Option<&Path>,
    sweep_from: Option<&Path>,
    sweep_to: Option<&Path>,
    steps: usize,
    svg_path: Option<&Path>,
) -> Result<()> {
    let mut log = RunLog::new("probe-eval", ctx);
    let default_model = ctx.models_dir().join("probe.json");
    let model_path = model_path.unwrap_or(&default_model);
    let text = std::fs::read_to_string(model_path).map_err(|source| Error::Io {
        path: model_path.display().to_string(),
        source,
    })?;
    let model = ProbeModel::from_json(&text)?;

    let (data, paths) = log.stage("extract", || labeled_rows(ctx, manifest_path, None))?;
    let mut csv = String::from("path,emotion");
    for label in &model.emotion_labels {
        csv.push_str(&format!(",p_{label}"));
    }
    csv.push('\n');
    for ((row, emotion), path) in data.iter().zip(&paths) {
        let probs = classify(&model, row)?;
        csv.push_str(&format!("{path},{emotion}"));
        for p in probs {
            csv.push(',');
            csv.push_str(&fmt_g9(p));
        }
        csv.push('\n');
    }
    let csv_path = ctx.out.join("probe_probs.csv");
    atomic_write(&csv_path, csv.as_bytes())?;
    log.output(&csv_path);
    log.summary("utterances", data.len());
    println!(
        "probabilities for {} utterances -> {}",
        data.len(),
        csv_path.display()
    );

    match (sweep_from, sweep_to) {
        (Some(from), Some(to)) => {
            let frame = ctx.config.frame_spec(WindowKind::Hann);
            let start = emomix_core::features::extract_feature_vector_opts(
                &load_wav(from)?,
                &frame,
                &ctx.config.f0,
            )?;
            let end = emomix_core::features::extract_feature_vector_opts(
                &load_wav(to)?,
                &frame,
                &ctx.config.f0,
            )?;
            let rows = probability_sweep(&model, &start.values, &end.values, steps)?;

            let mut csv = String::from("step,t");
            for label in &model.emotion_labels {
                csv.push_str(&format!(",p_{label}"));
            }
            csv.push('\n');
            for (k, probs) in rows.iter().enumerate() {
                let t = k as f64 / (steps - 1) as f64;
                csv.push_str(&format!("{k},{}", fmt_g9(t)));
                for p in probs {
                    csv.push(',');
                    csv.push_str(&fmt_g9(*p));
                }
                csv.push('\n');
            }
            let sweep_path = ctx.out.join("probe_sweep.csv");
            atomic_write(&sweep_path, csv.as_bytes())?;
            log.output(&sweep_path);

            if let Some(svg_path) = svg_path {
                let series = model
                    .emotion_labels
                    .iter()
                    .enumerate()
                    .map(|(class, label)| Series {
                        name: label.clone(),
                        points: rows
                            .iter()
                            .enumerate()
                            .map(|(k, probs)| (k as f64, probs[class]))
                            .collect(),
                    })
                    .collect();
                let plot = LinePlot {
                    title: "class probability along feature sweep".into(),
                    x_label: "sweep step".into(),
                    y_label: "probability".into(),
                    series,
                };
                atomic_write(svg_path, plot.render().as_bytes())?;
                log.output(svg_path);
                println!("sweep plot -> {}", svg_path.display());
            }
        }
        (None, None) => {
            if svg_path.is_some() {
                return Err(Error::InvalidConfig(
                    "--svg needs --sweep-from/--sweep-to".into(),
                ));
            }
        }
        _ => {
            return Err(Error::InvalidConfig(
                "--sweep-from and --sweep-to must be given together".into(),
            ));
        }
    }

    log.write(&ctx.out)?;
    Ok(())
}
