//! `report`: summary of the artifacts in an output directory.

use std::collections::BTreeMap;

use emomix_core::error::{Error, Result};
use emomix_core::ranking::RankingModel;

use crate::context::Ctx;
use crate::predict::load_models;

pub fn run(ctx: &Ctx, json: bool) -> Result<()> {
    let mut found_anything = false;
    let mut report = BTreeMap::<String, serde_json::Value>::new();

    let log_path = ctx.out.join("run_log.json");
    if log_path.is_file() {
        found_anything = true;
        let text = std::fs::read_to_string(&log_path).map_err(|source| Error::Io {
            path: log_path.display().to_string(),
            source,
        })?;
        report.insert("last_run".into(), serde_json::from_str(&text)?);
    }

    let models_dir = ctx.models_dir();
    if models_dir.is_dir() {
        let models: Vec<RankingModel> = load_models(&models_dir)?;
        if !models.is_empty() {
            found_anything = true;
            let summaries: Vec<serde_json::Value> = models
                .iter()
                .map(|m| {
                    serde_json::json!({
                        "pair": m.pair_key(),
                        "converged": m.converged,
                        "objective": m.objective,
                        "score_min": m.score_min,
                        "score_max": m.score_max,
                    })
                })
                .collect();
            report.insert("ranking_models".into(), serde_json::Value::from(summaries));
        }
        if models_dir.join("probe.json").is_file() {
            found_anything = true;
            report.insert("probe_model".into(), serde_json::Value::from(true));
        }
    }

    for name in [
        "features.csv",
        "attributes.csv",
        "rank_accuracy.csv",
        "mix.csv",
        "sweep.csv",
        "mcd.csv",
        "pcc.csv",
        "probe_probs.csv",
    ] {
        let path = ctx.out.join(name);
        if path.is_file() {
            found_anything = true;
            let lines = std::fs::read_to_string(&path)
                .map(|t| t.lines().count().saturating_sub(1))
                .unwrap_or(0);
            report.insert(
                format!("csv_{}", name.trim_end_matches(".csv")),
                serde_json::json!({"path": path.display().to_string(), "rows": lines}),
            );
        }
    }

    if !found_anything {
        return Err(Error::InvalidConfig(format!(
            "nothing to report in {}",
            ctx.out.display()
        )));
    }

    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for (key, value) in &report {
            match key.as_str() {
                "ranking_models" => {
                    println!("ranking models:");
                    if let Some(list) = value.as_array() {
                        for m in list {
                            println!(
                                "  {} converged={} objective={}",
                                m["pair"].as_str().unwrap_or("?"),
                                m["converged"],
                                m["objective"]
                            );
                        }
                    }
                }
                "last_run" => {
                    println!(
                        "last run: {} (config {})",
                        value["command"].as_str().unwrap_or("?"),
                        value["config_hash"].as_str().unwrap_or("?")
                    );
                }
                other => println!("{other}: {value}"),
            }
        }
    }
    Ok(())
}
