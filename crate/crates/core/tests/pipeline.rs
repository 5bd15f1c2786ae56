//! Library-level pipeline test: synthesize two acoustic styles, learn a
//! ranking function between them, and check that predicted attributes and
//! similarity metrics behave sensibly end to end.

use emomix_core::features::{extract_feature_vector, FrameSpec, WindowKind};
use emomix_core::metrics::{dtw_align, extract_mcep, f0_pcc, mcd};
use emomix_core::ranking::{
    build_problem, predict_attribute_vector, solve, RankingModel, SolverOptions,
};
use emomix_core::AudioBuffer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Harmonic tone with noise; `style` controls register and roughness.
fn synth(style: &str, seed: u64) -> AudioBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (f0, noise, amp): (f64, f64, f64) = match style {
        "low" => (120.0 * (1.0 + 0.04 * rng.gen_range(-1.0..1.0)), 0.01, 0.4),
        _ => (300.0 * (1.0 + 0.04 * rng.gen_range(-1.0..1.0)), 0.1, 0.8),
    };
    let n = 9_600; // 0.6 s
    let mut samples: Vec<f64> = (0..n)
        .map(|t| {
            let time = t as f64 / 16_000.0;
            let mut v = 0.0;
            for h in 1..=4 {
                v += (2.0 * std::f64::consts::PI * f0 * h as f64 * time).sin() / h as f64;
            }
            v + noise * rng.gen_range(-1.0..1.0)
        })
        .collect();
    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    for s in &mut samples {
        *s *= amp / peak;
    }
    AudioBuffer::new(samples, 16_000).unwrap()
}

#[test]
fn rank_and_predict_separates_synthetic_styles() {
    let highs: Vec<_> = (0..6).map(|i| synth("high", i)).collect();
    let lows: Vec<_> = (0..6).map(|i| synth("low", 100 + i)).collect();
    let feat = |audio: &AudioBuffer| extract_feature_vector(audio).unwrap().values;
    let rows_a: Vec<Vec<f64>> = highs.iter().map(feat).collect();
    let rows_b: Vec<Vec<f64>> = lows.iter().map(feat).collect();

    let problem = build_problem(&rows_a[..4], &rows_b[..4], 0.1).unwrap();
    let solution = solve(&problem, &SolverOptions::default());
    assert!(solution.converged);
    let model = RankingModel::from_solution(&problem, &solution, "surprise", "sad");

    let pairs = vec![("surprise".to_string(), "sad".to_string())];
    // Held-out "surprise" style scores near the top of the band, "sad"
    // style near the bottom.
    for row in &rows_a[4..] {
        let v = predict_attribute_vector(std::slice::from_ref(&model), &pairs, row).unwrap();
        assert!(v.entries["surprise_vs_sad"] > 0.6, "{:?}", v.entries);
    }
    for row in &rows_b[4..] {
        let v = predict_attribute_vector(std::slice::from_ref(&model), &pairs, row).unwrap();
        assert!(v.entries["surprise_vs_sad"] < 0.4, "{:?}", v.entries);
    }
}

#[test]
fn metrics_prefer_same_style() {
    let a1 = synth("high", 1);
    let a2 = synth("high", 2);
    let b = synth("low", 3);
    let m_a1 = extract_mcep(&a1, 24).unwrap();
    let m_a2 = extract_mcep(&a2, 24).unwrap();
    let m_b = extract_mcep(&b, 24).unwrap();
    let same = mcd(&m_a1, &m_a2).unwrap();
    let cross = mcd(&m_a1, &m_b).unwrap();
    assert!(
        same < cross,
        "same-style distortion {same} should undercut cross-style {cross}"
    );

    // Identical audio: zero distortion, perfect F0 correlation.
    assert_eq!(mcd(&m_a1, &m_a1.clone()).unwrap(), 0.0);
    let rect = FrameSpec::pipeline_default(WindowKind::Rectangular);
    let contour = emomix_core::features::estimate_f0(&a1, &rect, 60.0, 400.0).unwrap();
    let path = dtw_align(&m_a1, &m_a1.clone()).unwrap();
    let pcc = f0_pcc(&contour, &contour.clone(), &path);
    // A nearly constant F0 contour may legitimately report zero variance.
    if let Ok(value) = pcc {
        assert!((value - 1.0).abs() < 1e-9);
    }
}
