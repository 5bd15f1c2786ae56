//! `train-rank`: one ranking model per emotion pair, trained on the train
//! split, with held-out pairwise ordering accuracy reported on the test
//! split.

use std::path::Path;

use emomix_core::error::{Error, Result};
use emomix_core::features::FeatureVector;
use emomix_core::io::{atomic_write, fmt_g9};
use emomix_core::manifest::{auto_split, load_manifest, Manifest, Split};
use emomix_core::ranking::{
    build_problem_with, rank_score, solve, RankingModel,
};

use crate::context::Ctx;
use crate::features_io::extract_entries;
use crate::runlog::RunLog;

pub fn run(ctx: &Ctx, manifest_path: &Path, all_pairs: bool) -> Result<()> {
    let mut log = RunLog::new("train-rank", ctx);
    let manifest = log.stage("load_manifest", || {
        let mut m = load_manifest(manifest_path, &ctx.config.emotion_set)?;
        if m.entries.iter().any(|e| e.split.is_none()) {
            auto_split(&mut m, ctx.config.seed);
        }
        Ok(m)
    })?;

    let entries: Vec<_> = manifest.entries.iter().collect();
    let vectors = log.stage("extract_features", || extract_entries(ctx, &entries))?;

    let pairs = if all_pairs {
        ctx.config.all_pairs()
    } else {
        ctx.config.primary_pairs()
    };

    let models_dir = ctx.models_dir();
    let mut accuracy_rows = Vec::new();
    let mut trained = Vec::new();
    for (emotion_a, emotion_b) in &pairs {
        let model = log.stage(&format!("train_{emotion_a}_vs_{emotion_b}"), || {
            let rows_a = rows_for(&manifest, &vectors, emotion_a, Split::Train);
            let rows_b = rows_for(&manifest, &vectors, emotion_b, Split::Train);
            if rows_a.is_empty() {
                return Err(Error::EmptyEmotionSet(format!(
                    "no '{emotion_a}' samples in the train split"
                )));
            }
            if rows_b.is_empty() {
                return Err(Error::EmptyEmotionSet(format!(
                    "no '{emotion_b}' samples in the train split"
                )));
            }
            let problem = build_problem_with(
                &rows_a,
                &rows_b,
                ctx.config.c_tradeoff,
                &ctx.config.pair_sampling(),
            )?;
            let solution = solve(&problem, &ctx.config.solver);
            Ok(RankingModel::from_solution(
                &problem, &solution, emotion_a, emotion_b,
            ))
        })?;

        let model_path = models_dir.join(format!("rank_{}.json", model.pair_key()));
        atomic_write(&model_path, model.to_json()?.as_bytes())?;
        log.output(&model_path);

        let accuracy = pairwise_test_accuracy(&manifest, &vectors, &model)?;
        let (acc_text, acc_json) = match accuracy {
            Some((acc, n)) => (format!("{} over {n} pairs", fmt_g9(acc)), Some(acc)),
            None => ("n/a (empty test split)".to_string(), None),
        };
        println!(
            "trained {}: converged={} objective={} test_accuracy={}",
            model.pair_key(),
            model.converged,
            fmt_g9(model.objective),
            acc_text
        );
        accuracy_rows.push((model.pair_key(), accuracy, model.converged, model.objective));
        log.summary(
            &format!("accuracy_{}", model.pair_key()),
            acc_json,
        );
        trained.push(model);
    }

    let mut csv = String::from("pair,test_accuracy,test_pairs,converged,objective\n");
    for (key, accuracy, converged, objective) in &accuracy_rows {
        let (acc, n) = match accuracy {
            Some((a, n)) => (fmt_g9(*a), n.to_string()),
            None => (String::new(), "0".to_string()),
        };
        csv.push_str(&format!(
            "{key},{acc},{n},{converged},{}\n",
            fmt_g9(*objective)
        ));
    }
    let accuracy_path = ctx.out.join("rank_accuracy.csv");
    atomic_write(&accuracy_path, csv.as_bytes())?;
    log.output(&accuracy_path);
    log.summary("models", trained.len());
    log.write(&ctx.out)?;
    Ok(())
}

fn rows_for(
    manifest: &Manifest,
    vectors: &[FeatureVector],
    emotion: &str,
    split: Split,
) -> Vec<Vec<f64>> {
    manifest
        .entries
        .iter()
        .zip(vectors)
        .filter(|(e, _)| e.emotion == emotion && e.split == Some(split))
        .map(|(_, v)| v.values.clone())
        .collect()
}

/// Fraction of held-out cross pairs ranked in the right order; None when
/// either side has no test samples.
fn pairwise_test_accuracy(
    manifest: &Manifest,
    vectors: &[FeatureVector],
    model: &RankingModel,
) -> Result<Option<(f64, usize)>> {
    let rows_a = rows_for(manifest, vectors, &model.emotion_pair.0, Split::Test);
    let rows_b = rows_for(manifest, vectors, &model.emotion_pair.1, Split::Test);
    if rows_a.is_empty() || rows_b.is_empty() {
        return Ok(None);
    }
    let scores_a: Vec<f64> = rows_a
        .iter()
        .map(|r| rank_score(model, r))
        .collect::<Result<_>>()?;
    let scores_b: Vec<f64> = rows_b
        .iter()
        .map(|r| rank_score(model, r))
        .collect::<Result<_>>()?;
    let mut correct = 0usize;
    for sa in &scores_a {
        for sb in &scores_b {
            if sa > sb {
                correct += 1;
            }
        }
    }
    let total = scores_a.len() * scores_b.len();
    Ok(Some((correct as f64 / total as f64, total)))
}
