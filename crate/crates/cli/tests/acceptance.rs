//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! 1. Ranking solver objective matches a brute-force quadratic oracle on
//!    tiny 2-D problems within 1e-6, under 1 s per instance.
//! 2. Held-out pairwise ordering accuracy: 100% on separable Gaussian
//!    clusters (d=10, N=200, margin >= 4 sigma), >= 90% on overlapping
//!    clusters, under 5 s.
//! 3. Analytic gradients (ranking objective, probe cross-entropy) match
//!    central finite differences within 1e-5 relative error at 10 points.
//! 4. Metric identities: MCD(x,x) = 0 exactly, PCC(x,x) = 1 and affine
//!    invariance within 1e-12, MCD matches a scalar reimplementation
//!    within 1e-9, DTW cost matches exhaustive enumeration on <= 6 frames.
//! 5. Feature determinism and invariants: bitwise-identical vectors
//!    regardless of --jobs, sine F0 within +/-3 Hz, MFCC gain invariance
//!    within 1e-6, frame-count formula over 1000 random lengths.
//! 6. Mixer contract: the 0/30/60/90 grid maps to 1.0/0.7/0.4/0.1 strictly
//!    decreasing; transition mode rejects over-budget percentages.
//! 7. Probe: >= 99% training accuracy on the separable 4-cluster fixture,
//!    10 000 fuzzed softmax outputs sum to 1 within 1e-9, centroid sweep
//!    monotone in the target class.
//! 8. End-to-end determinism: two identically seeded pipeline runs produce
//!    byte-identical artifacts.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use emomix_core::features::{
    extract_feature_vector, mfcc, num_frames, FrameSpec, WindowKind,
};
use emomix_core::metrics::{
    dtw_align, f0_pcc, mcd, path_cost, AlignmentPath, McepSequence, MCD_CONST,
};
use emomix_core::mixer::{build_manual_vector, sweep, MixMode, MixSpec};
use emomix_core::probe::{
    classify, cross_entropy_gradient, cross_entropy_loss, probability_sweep, train_probe,
    TrainConfig,
};
use emomix_core::ranking::{
    build_problem, build_problem_with, objective_gradient, objective_value, rank_score, solve,
    PairSampling, RankingModel, RankingProblem, SolverOptions,
};
use emomix_core::AudioBuffer;

use common::{assert_success, build_dataset, dir_snapshot, emomix};

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn unit_cluster(rng: &mut ChaCha8Rng, center: &[f64], n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| center.iter().map(|c| c + gaussian(rng)).collect())
        .collect()
}

fn sine_audio(freq: f64, secs: f64, amp: f64) -> AudioBuffer {
    let n = (secs * 16_000.0) as usize;
    AudioBuffer::new(
        (0..n)
            .map(|t| amp * (std::f64::consts::TAU * freq * t as f64 / 16_000.0).sin())
            .collect(),
        16_000,
    )
    .unwrap()
}

// ---------------------------------------------------------------------
// Criterion 1
// ---------------------------------------------------------------------

/// Independent quadratic oracle: the objective is piecewise quadratic in
/// w, so enumerate every subset of ordered pairs as the active set, solve
/// the unconstrained quadratic by Gaussian elimination, and take the best
/// true objective over all candidate minimizers.
fn oracle_min_objective(problem: &RankingProblem) -> f64 {
    let d = problem.data[0].len();
    let n_ord = problem.ordered_pairs.len();
    assert!(n_ord <= 12);
    let c = problem.c_tradeoff;
    let diff = |&(i, j): &(usize, usize)| -> Vec<f64> {
        (0..d)
            .map(|k| problem.data[i][k] - problem.data[j][k])
            .collect()
    };
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n_ord) {
        let mut a = vec![vec![0.0; d]; d];
        let mut b = vec![0.0; d];
        for (k, row) in a.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        {
            let mut add = |dv: &[f64], rhs: bool| {
                for r in 0..d {
                    for col in 0..d {
                        a[r][col] += 2.0 * c * dv[r] * dv[col];
                    }
                    if rhs {
                        b[r] += 2.0 * c * dv[r];
                    }
                }
            };
            for (idx, pair) in problem.ordered_pairs.iter().enumerate() {
                if mask & (1 << idx) != 0 {
                    add(&diff(pair), true);
                }
            }
            for pair in &problem.similar_pairs {
                add(&diff(pair), false);
            }
        }
        if let Some(w) = gauss_solve(a, b) {
            best = best.min(objective_value(problem, &w));
        }
    }
    best
}

#[allow(clippy::needless_range_loop)] // elimination reads one row while writing another
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut w = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * w[k];
        }
        w[row] = acc / a[row][row];
    }
    Some(w)
}

#[test]
fn acceptance_1_solver_matches_quadratic_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let splits: [(usize, usize); 6] = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 2), (4, 1)];
    let mut checked = 0;
    for trial in 0..36 {
        let (na, nb) = splits[trial % splits.len()];
        let c = [0.05, 0.1, 1.0][trial % 3];
        let a: Vec<Vec<f64>> = (0..na)
            .map(|_| vec![gaussian(&mut rng) + 1.2, gaussian(&mut rng)])
            .collect();
        let b: Vec<Vec<f64>> = (0..nb)
            .map(|_| vec![gaussian(&mut rng) - 1.2, gaussian(&mut rng)])
            .collect();
        let start = Instant::now();
        let problem = build_problem(&a, &b, c).unwrap();
        let solution = solve(&problem, &SolverOptions::default());
        assert!(
            start.elapsed().as_secs_f64() < 1.0,
            "instance took {:?}",
            start.elapsed()
        );
        let oracle = oracle_min_objective(&problem);
        assert!(
            (solution.objective - oracle).abs() <= 1e-6,
            "trial {trial} ({na}+{nb}, C={c}): solver {} vs oracle {}",
            solution.objective,
            oracle
        );
        checked += 1;
    }
    println!("[PASS] acceptance 1: solver objective within 1e-6 of quadratic oracle on {checked} tiny problems, <1s each");
}

// ---------------------------------------------------------------------
// Criterion 2
// ---------------------------------------------------------------------

/// Held-out pairwise ordering accuracy on two-cluster data.
fn heldout_accuracy(center_gap: f64, seed: u64) -> (f64, f64) {
    let d = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut center_a = vec![0.0; d];
    let mut center_b = vec![0.0; d];
    center_a[0] = center_gap / 2.0;
    center_b[0] = -center_gap / 2.0;
    let a = unit_cluster(&mut rng, &center_a, 100);
    let b = unit_cluster(&mut rng, &center_b, 100);

    // Empirical margin along the center axis, in sigma units.
    let min_a = a.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min);
    let max_b = b.iter().map(|r| r[0]).fold(f64::NEG_INFINITY, f64::max);
    let margin = min_a - max_b;

    let problem = build_problem_with(
        &a[..50],
        &b[..50],
        0.1,
        &PairSampling {
            cap_factor: 4,
            seed: 0,
        },
    )
    .unwrap();
    let solution = solve(&problem, &SolverOptions::default());
    let model = RankingModel::from_solution(&problem, &solution, "a", "b");
    let mut correct = 0usize;
    let mut total = 0usize;
    for xa in &a[50..] {
        for xb in &b[50..] {
            if rank_score(&model, xa).unwrap() > rank_score(&model, xb).unwrap() {
                correct += 1;
            }
            total += 1;
        }
    }
    (correct as f64 / total as f64, margin)
}

#[test]
fn acceptance_2_heldout_ranking_accuracy() {
    let start = Instant::now();
    let (acc_separable, margin) = heldout_accuracy(12.0, 202);
    assert!(
        margin >= 4.0,
        "separable fixture must have >= 4 sigma margin, got {margin}"
    );
    assert_eq!(
        acc_separable, 1.0,
        "separable clusters must rank 100% of held-out pairs"
    );
    let (acc_overlap, _) = heldout_accuracy(3.0, 203);
    assert!(
        acc_overlap >= 0.90,
        "overlapping clusters ranked {acc_overlap}, need >= 0.90"
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "criterion took {elapsed}s");
    println!(
        "[PASS] acceptance 2: held-out ordering accuracy 100% at margin {margin:.2} sigma, \
         {acc_overlap:.3} on overlapping clusters, {elapsed:.2}s"
    );
}

// ---------------------------------------------------------------------
// Criterion 3
// ---------------------------------------------------------------------

#[test]
fn acceptance_3_gradient_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let a = unit_cluster(&mut rng, &[1.0, -0.5, 0.25, 2.0], 5);
    let b = unit_cluster(&mut rng, &[-1.0, 0.5, -0.25, -2.0], 5);
    let problem = build_problem(&a, &b, 0.3).unwrap();
    let h = 1e-6;
    for point in 0..10 {
        let w: Vec<f64> = (0..4).map(|_| gaussian(&mut rng)).collect();
        let analytic = objective_gradient(&problem, &w);
        let mut fd = vec![0.0; 4];
        for (k, slot) in fd.iter_mut().enumerate() {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[k] += h;
            wm[k] -= h;
            *slot = (objective_value(&problem, &wp) - objective_value(&problem, &wm)) / (2.0 * h);
        }
        let rel = rel_error(&analytic, &fd);
        assert!(rel < 1e-5, "ranking gradient point {point}: rel err {rel}");
    }

    let data: Vec<Vec<f64>> = (0..12)
        .map(|_| (0..3).map(|_| gaussian(&mut rng)).collect())
        .collect();
    let labels: Vec<usize> = (0..12).map(|i| i % 3).collect();
    for point in 0..10 {
        let w: Vec<f64> = (0..9).map(|_| gaussian(&mut rng)).collect();
        let bias: Vec<f64> = (0..3).map(|_| gaussian(&mut rng)).collect();
        let (gw, gb) = cross_entropy_gradient(&data, &labels, 3, &w, &bias, 0.01);
        let mut fd = Vec::with_capacity(12);
        for k in 0..9 {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[k] += h;
            wm[k] -= h;
            fd.push(
                (cross_entropy_loss(&data, &labels, 3, &wp, &bias, 0.01)
                    - cross_entropy_loss(&data, &labels, 3, &wm, &bias, 0.01))
                    / (2.0 * h),
            );
        }
        for k in 0..3 {
            let mut bp = bias.clone();
            let mut bm = bias.clone();
            bp[k] += h;
            bm[k] -= h;
            fd.push(
                (cross_entropy_loss(&data, &labels, 3, &w, &bp, 0.01)
                    - cross_entropy_loss(&data, &labels, 3, &w, &bm, 0.01))
                    / (2.0 * h),
            );
        }
        let analytic: Vec<f64> = gw.iter().chain(gb.iter()).cloned().collect();
        let rel = rel_error(&analytic, &fd);
        assert!(rel < 1e-5, "probe gradient point {point}: rel err {rel}");
    }
    println!("[PASS] acceptance 3: ranking and probe gradients match finite differences (rel err < 1e-5, 10 points each)");
}

fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let den: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    num / den.max(1e-12)
}

// ---------------------------------------------------------------------
// Criterion 4
// ---------------------------------------------------------------------

fn random_mcep(rng: &mut ChaCha8Rng, frames: usize, order: usize) -> McepSequence {
    McepSequence::new(
        (0..frames)
            .map(|_| (0..order).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect(),
        order,
    )
    .unwrap()
}

/// Minimum path cost over every monotone path, by recursion.
fn exhaustive_min_cost(a: &McepSequence, b: &McepSequence, i: usize, j: usize) -> f64 {
    let d: f64 = a.frames[i]
        .iter()
        .zip(&b.frames[j])
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    if i + 1 == a.len() && j + 1 == b.len() {
        return d;
    }
    let mut best = f64::INFINITY;
    if i + 1 < a.len() && j + 1 < b.len() {
        best = best.min(exhaustive_min_cost(a, b, i + 1, j + 1));
    }
    if i + 1 < a.len() {
        best = best.min(exhaustive_min_cost(a, b, i + 1, j));
    }
    if j + 1 < b.len() {
        best = best.min(exhaustive_min_cost(a, b, i, j + 1));
    }
    d + best
}

#[test]
fn acceptance_4_metric_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);

    // MCD(x, x) = 0 exactly.
    let x = random_mcep(&mut rng, 14, 24);
    assert_eq!(mcd(&x, &x.clone()).unwrap(), 0.0);

    // PCC(x, x) = 1 within 1e-12; affine invariance within 1e-12.
    let contour = emomix_core::features::F0Contour {
        values: (0..30).map(|_| rng.gen_range(80.0..300.0)).collect(),
        frame_spec: FrameSpec::pipeline_default(WindowKind::Rectangular),
    };
    let diag = AlignmentPath::diagonal(30);
    let self_pcc = f0_pcc(&contour, &contour.clone(), &diag).unwrap();
    assert!((self_pcc - 1.0).abs() <= 1e-12);
    let affine = emomix_core::features::F0Contour {
        values: contour.values.iter().map(|v| 1.7 * v + 11.0).collect(),
        frame_spec: contour.frame_spec,
    };
    let affine_pcc = f0_pcc(&contour, &affine, &diag).unwrap();
    assert!((affine_pcc - 1.0).abs() <= 1e-12);

    // Hand-sized MCD against a straight scalar reimplementation on the
    // diagonal alignment of equal-length sequences.
    let y = random_mcep(&mut rng, 14, 24);
    let got = mcd(&x, &y).unwrap();
    let path = dtw_align(&x, &y).unwrap();
    let mut oracle = 0.0;
    for &(i, j) in &path.pairs {
        let mut sum_sq = 0.0;
        for m in 0..24 {
            let d = x.frames[i][m] - y.frames[j][m];
            sum_sq += d * d;
        }
        oracle += 10.0 * 2.0_f64.sqrt() / 10.0_f64.ln() * (1.0 / 24.0) * sum_sq.sqrt();
    }
    oracle /= path.pairs.len() as f64;
    assert!((got - oracle).abs() <= 1e-9, "{got} vs {oracle}");
    assert!((MCD_CONST - 10.0 * 2.0_f64.sqrt() / 10.0_f64.ln()).abs() < 1e-12);

    // DTW equals exhaustive enumeration on every size up to 6x6.
    for ta in 1..=6 {
        for tb in 1..=6 {
            let a = random_mcep(&mut rng, ta, 2);
            let b = random_mcep(&mut rng, tb, 2);
            let path = dtw_align(&a, &b).unwrap();
            let got = path_cost(&a, &b, &path);
            let oracle = exhaustive_min_cost(&a, &b, 0, 0);
            assert!(
                (got - oracle).abs() < 1e-12,
                "{ta}x{tb}: {got} vs {oracle}"
            );
        }
    }
    println!("[PASS] acceptance 4: MCD/PCC identities, scalar MCD oracle (1e-9), DTW vs exhaustive enumeration");
}

// ---------------------------------------------------------------------
// Criterion 5
// ---------------------------------------------------------------------

#[test]
fn acceptance_5_feature_determinism_and_invariants() {
    // Bitwise-identical extraction through the CLI regardless of --jobs.
    let dir = tempfile::tempdir().unwrap();
    let manifest = build_dataset(dir.path(), 3);
    let manifest = manifest.to_str().unwrap();
    let out_one = dir.path().join("jobs1");
    let out_four = dir.path().join("jobs4");
    for (out, jobs) in [(&out_one, "1"), (&out_four, "4")] {
        assert_success(&emomix(&[
            "--out",
            out.to_str().unwrap(),
            "--jobs",
            jobs,
            "extract",
            "--manifest",
            manifest,
        ]));
    }
    let csv_one = std::fs::read(out_one.join("features.csv")).unwrap();
    let csv_four = std::fs::read(out_four.join("features.csv")).unwrap();
    assert_eq!(csv_one, csv_four, "features.csv differs across --jobs");
    assert_eq!(
        dir_snapshot(&out_one.join("cache"), &[]),
        dir_snapshot(&out_four.join("cache"), &[]),
        "cache entries differ across --jobs"
    );

    // Library-level bitwise determinism.
    let audio = sine_audio(173.0, 0.6, 0.5);
    let v1 = extract_feature_vector(&audio).unwrap();
    let v2 = extract_feature_vector(&audio).unwrap();
    for (a, b) in v1.values.iter().zip(&v2.values) {
        assert_eq!(a.to_bits(), b.to_bits());
    }

    // Pure 220 Hz sine: mean F0 functional within +/-3 Hz.
    let sine = sine_audio(220.0, 1.0, 0.6);
    let vector = extract_feature_vector(&sine).unwrap();
    let names = emomix_core::features::feature_names();
    let f0_mean = vector.values[names.iter().position(|n| n == "f0_mean").unwrap()];
    assert!((f0_mean - 220.0).abs() <= 3.0, "f0_mean {f0_mean}");

    // MFCC gain invariance within 1e-6.
    let frame: Vec<f64> = (0..800)
        .map(|t| 0.4 * (std::f64::consts::TAU * 440.0 * t as f64 / 16_000.0).sin())
        .collect();
    let doubled: Vec<f64> = frame.iter().map(|s| s * 2.0).collect();
    for (a, b) in mfcc(&frame, 16_000, 12, 26)
        .iter()
        .zip(mfcc(&doubled, 16_000, 12, 26).iter())
    {
        assert!((a - b).abs() < 1e-6);
    }

    // Frame-count formula over 1000 random lengths.
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..1000 {
        let frame = rng.gen_range(1..2000usize);
        let hop = rng.gen_range(1..=frame);
        let n = rng.gen_range(frame..60_000);
        assert_eq!(num_frames(n, frame, hop), Some((n - frame) / hop + 1));
    }
    println!("[PASS] acceptance 5: bitwise determinism across --jobs, sine F0 within 3 Hz, MFCC gain invariance, frame formula x1000");
}

// ---------------------------------------------------------------------
// Criterion 6
// ---------------------------------------------------------------------

#[test]
fn acceptance_6_mixer_contract() {
    let references: Vec<String> = ["angry", "happy", "sad", "neutral"]
        .map(String::from)
        .to_vec();
    let base = MixSpec::new("surprise", BTreeMap::new(), MixMode::Mixing);
    let grid = sweep(&base, &references, "angry", &[0.0, 30.0, 60.0, 90.0]).unwrap();
    let targets: Vec<f64> = grid
        .iter()
        .map(|v| v.entries["surprise_vs_angry"])
        .collect();
    let expected = [1.0, 0.7, 0.4, 0.1];
    for (got, want) in targets.iter().zip(expected) {
        assert!((got - want).abs() < 1e-12, "{targets:?}");
    }
    for pair in targets.windows(2) {
        assert!(pair[1] < pair[0], "grid not strictly decreasing");
    }

    let over_budget = MixSpec::new(
        "surprise",
        [("happy".to_string(), 40.0), ("sad".to_string(), 70.0)]
            .into_iter()
            .collect(),
        MixMode::Transition,
    );
    let err = build_manual_vector(&over_budget, &references).unwrap_err();
    assert_eq!(err.code(), "transition_sum_violation");

    let exact_budget = MixSpec::new(
        "surprise",
        [("happy".to_string(), 40.0), ("sad".to_string(), 60.0)]
            .into_iter()
            .collect(),
        MixMode::Transition,
    );
    assert!(build_manual_vector(&exact_budget, &references).is_ok());
    println!("[PASS] acceptance 6: sweep grid 1.0/0.7/0.4/0.1 strictly decreasing; transition budget enforced");
}

// ---------------------------------------------------------------------
// Criterion 7
// ---------------------------------------------------------------------

#[test]
fn acceptance_7_probe_behavior() {
    // Four clusters, centers 8 apart on distinct axes (pairwise distance
    // 8*sqrt(2) sigma >= 6 sigma), 50 samples each.
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let labels = ["neutral", "angry", "happy", "sad"];
    let mut data = Vec::new();
    for (class, label) in labels.iter().enumerate() {
        for _ in 0..50 {
            let mut row: Vec<f64> = (0..8).map(|_| gaussian(&mut rng)).collect();
            row[class] += 8.0;
            data.push((row, label.to_string()));
        }
    }
    let model = train_probe(&data, &TrainConfig::default()).unwrap();
    let accuracy = emomix_core::probe::accuracy(&model, &data).unwrap();
    assert!(accuracy >= 0.99, "training accuracy {accuracy}");

    // 10 000 fuzzed inputs stay on the probability simplex.
    for _ in 0..10_000 {
        let x: Vec<f64> = (0..8).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let probs = classify(&model, &x).unwrap();
        let sum: f64 = probs.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-9, "sum {sum}");
        assert!(probs.iter().all(|&p| p >= 0.0));
    }

    // Centroid-to-centroid sweep: target-class probability never drops.
    let centroid = |target: &str| -> Vec<f64> {
        let rows: Vec<&Vec<f64>> = data
            .iter()
            .filter(|(_, l)| l == target)
            .map(|(r, _)| r)
            .collect();
        (0..8)
            .map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / rows.len() as f64)
            .collect()
    };
    let rows = probability_sweep(&model, &centroid("neutral"), &centroid("sad"), 11).unwrap();
    let target = model
        .emotion_labels
        .iter()
        .position(|l| l == "sad")
        .unwrap();
    for pair in rows.windows(2) {
        assert!(
            pair[1][target] >= pair[0][target] - 1e-9,
            "sweep dipped: {} -> {}",
            pair[0][target],
            pair[1][target]
        );
    }
    assert!(rows[10][target] > 0.9);
    println!("[PASS] acceptance 7: probe accuracy {accuracy:.3}, 10k softmax simplex checks, monotone centroid sweep");
}

// ---------------------------------------------------------------------
// Criterion 8
// ---------------------------------------------------------------------

#[test]
fn acceptance_8_end_to_end_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let manifest = build_dataset(dir.path(), 6);
    let manifest = manifest.to_str().unwrap();

    let run = |out: &std::path::Path| {
        let out = out.to_str().unwrap();
        assert_success(&emomix(&[
            "--out", out, "--seed", "42", "extract", "--manifest", manifest,
        ]));
        assert_success(&emomix(&[
            "--out", out, "--seed", "42", "train-rank", "--manifest", manifest,
        ]));
        assert_success(&emomix(&[
            "--out", out, "--seed", "42", "predict", "--manifest", manifest,
        ]));
        assert_success(&emomix(&[
            "--out", out, "--seed", "42", "probe-train", "--manifest", manifest,
        ]));
        assert_success(&emomix(&[
            "--out", out, "--seed", "42", "mix", "--primary", "surprise", "--mix", "angry=90",
        ]));
        assert_success(&emomix(&[
            "--out", out, "--seed", "42", "sweep", "--primary", "surprise", "--emotion",
            "angry", "--steps", "0,30,60,90",
        ]));
    };
    let out_a = dir.path().join("run_a");
    let out_b = dir.path().join("run_b");
    run(&out_a);
    run(&out_b);

    // Everything except the timing log must be byte-identical.
    let snap_a = dir_snapshot(&out_a, &["run_log.json"]);
    let snap_b = dir_snapshot(&out_b, &["run_log.json"]);
    assert!(!snap_a.is_empty());
    assert_eq!(
        snap_a.len(),
        snap_b.len(),
        "different artifact sets between runs"
    );
    for ((name_a, bytes_a), (name_b, bytes_b)) in snap_a.iter().zip(&snap_b) {
        assert_eq!(name_a, name_b);
        assert_eq!(
            bytes_a, bytes_b,
            "artifact {name_a} differs between identically seeded runs"
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "[PASS] acceptance 8: {} artifacts byte-identical across two seeded runs ({elapsed:.1}s)",
        snap_a.len()
    );
}
