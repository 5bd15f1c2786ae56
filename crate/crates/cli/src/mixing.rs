//! `mix` and `sweep`: manual attribute vectors from percentages.

use std::collections::BTreeMap;
use std::path::Path;

use emomix_core::error::{Error, Result};
use emomix_core::io::{atomic_write, fmt_g9};
use emomix_core::mixer::{build_manual_vector, sweep, MixMode, MixSpec};
use emomix_core::ranking::EmotionAttributeVector;

use crate::context::Ctx;
use crate::runlog::RunLog;

/// Parses repeated `--mix emotion=percent` flags.
pub fn parse_mix_flags(flags: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for flag in flags {
        let (emotion, value) = flag.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("--mix expects emotion=percent, got '{flag}'"))
        })?;
        let percent: f64 = value.parse().map_err(|_| Error::InvalidPercentage {
            emotion: emotion.to_string(),
            value: f64::NAN,
        })?;
        map.insert(emotion.to_lowercase(), percent);
    }
    Ok(map)
}

pub fn build_spec(
    ctx: &Ctx,
    spec_path: Option<&Path>,
    primary: Option<&str>,
    mixes: &[String],
    transition: bool,
) -> Result<MixSpec> {
    if let Some(path) = spec_path {
        if primary.is_some() || !mixes.is_empty() {
            return Err(Error::InvalidConfig(
                "--spec cannot be combined with --primary/--mix flags".into(),
            ));
        }
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let spec: MixSpec = serde_json::from_str(&text).map_err(|e| Error::ParseError {
            path: path.display().to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        return Ok(spec);
    }
    Ok(MixSpec::new(
        primary
            .map(str::to_lowercase)
            .unwrap_or_else(|| ctx.config.primary_emotion.clone()),
        parse_mix_flags(mixes)?,
        if transition {
            MixMode::Transition
        } else {
            MixMode::Mixing
        },
    ))
}

fn references_for(ctx: &Ctx, spec: &MixSpec) -> Result<Vec<String>> {
    if !ctx.config.emotion_set.contains(&spec.primary_emotion) {
        return Err(Error::UnknownEmotion {
            label: spec.primary_emotion.clone(),
            context: Some("primary emotion not in configured set".into()),
        });
    }
    Ok(ctx
        .config
        .emotion_set
        .iter()
        .filter(|e| **e != spec.primary_emotion)
        .cloned()
        .collect())
}

fn vector_csv(header_extra: Option<&str>, rows: &[(Option<f64>, &EmotionAttributeVector)]) -> String {
    let keys: Vec<&String> = rows
        .first()
        .map(|(_, v)| v.entries.keys().collect())
        .unwrap_or_default();
    let mut csv = String::new();
    if let Some(extra) = header_extra {
        csv.push_str(extra);
        if !keys.is_empty() {
            csv.push(',');
        }
    }
    csv.push_str(
        &keys
            .iter()
            .map(|k| k.as_str())
            .collect::<Vec<_>>()
            .join(","),
    );
    csv.push('\n');
    for (step, vector) in rows {
        if let Some(step) = step {
            csv.push_str(&fmt_g9(*step));
            if !keys.is_empty() {
                csv.push(',');
            }
        }
        let values: Vec<String> = keys.iter().map(|k| fmt_g9(vector.entries[*k])).collect();
        csv.push_str(&values.join(","));
        csv.push('\n');
    }
    csv
}

#[allow(clippy::too_many_arguments)]
pub fn run_mix(
    ctx: &Ctx,
    spec_path: Option<&Path>,
    primary: Option<&str>,
    mixes: &[String],
    transition: bool,
    output: Option<&Path>,
) -> Result<()> {
    let mut log = RunLog::new("mix", ctx);
    let spec = build_spec(ctx, spec_path, primary, mixes, transition)?;
    let references = references_for(ctx, &spec)?;
    let vector = build_manual_vector(&spec, &references)?;

    let csv = vector_csv(None, &[(None, &vector)]);
    let default_path = ctx.out.join("mix.csv");
    let csv_path = output.unwrap_or(&default_path);
    atomic_write(csv_path, csv.as_bytes())?;
    log.output(csv_path);
    log.summary("primary", &spec.primary_emotion);
    log.write(&ctx.out)?;
    for (key, value) in &vector.entries {
        println!("{key} = {}", fmt_g9(*value));
    }
    println!("wrote {}", csv_path.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn run_sweep(
    ctx: &Ctx,
    spec_path: Option<&Path>,
    primary: Option<&str>,
    mixes: &[String],
    transition: bool,
    emotion: &str,
    steps: &[f64],
    output: Option<&Path>,
) -> Result<()> {
    let mut log = RunLog::new("sweep", ctx);
    let spec = build_spec(ctx, spec_path, primary, mixes, transition)?;
    let references = references_for(ctx, &spec)?;
    let emotion = emotion.to_lowercase();
    let vectors = sweep(&spec, &references, &emotion, steps)?;

    let rows: Vec<(Option<f64>, &EmotionAttributeVector)> = steps
        .iter()
        .zip(&vectors)
        .map(|(s, v)| (Some(*s), v))
        .collect();
    let csv = vector_csv(Some("percent"), &rows);
    let default_path = ctx.out.join("sweep.csv");
    let csv_path = output.unwrap_or(&default_path);
    atomic_write(csv_path, csv.as_bytes())?;
    log.output(csv_path);
    log.summary("emotion", &emotion);
    log.summary("steps", steps.len());
    log.write(&ctx.out)?;
    println!(
        "swept {} over {} steps -> {}",
        emotion,
        steps.len(),
        csv_path.display()
    );
    Ok(())
}
