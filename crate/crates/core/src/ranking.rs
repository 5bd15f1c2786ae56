//! Pairwise ranking functions between emotion sets.
//!
//! Given two sets of feature vectors A and B, the learner fits a linear
//! scoring function f(x) = w'x such that every member of A outranks every
//! member of B by a margin, while members of the same set score as equally
//! as possible. Both requirements enter a single unconstrained objective
//! with squared slacks:
//!
//! ```text
//! J(w) = 1/2 ||w||^2 + C ( sum_ordered max(0, 1 - w'(x_i - x_j))^2
//!                        + sum_similar (w'(x_i - x_j))^2 )
//! ```
//!
//! J is convex and once-differentiable, so it is minimized by a damped
//! Newton method with a generalized Hessian; no quadratic-programming
//! machinery is involved. Scores over the training rows fix a [min, max]
//! band that maps raw scores of unseen utterances into a [0, 1] attribute,
//! where 0 means "scores like set B" and 1 "scores like set A".
//!
//! The module is dimension-generic; the speech pipeline instantiates it
//! with 384-dimensional feature vectors.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Current on-disk model format.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Scale entries below this are treated as degenerate and replaced by 1.
const SCALE_EPS: f64 = 1e-12;

/// Per-dimension shift and scale fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardization {
    /// Fits zero-mean, unit-scale parameters; constant dimensions get
    /// scale 1 so they pass through unchanged.
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let n = rows.len().max(1) as f64;
        let dim = rows.first().map_or(0, Vec::len);
        let mut mean = vec![0.0; dim];
        for row in rows {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut scale = vec![0.0; dim];
        for row in rows {
            for (s, (v, m)) in scale.iter_mut().zip(row.iter().zip(&mean)) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut scale {
            *s = (*s / n).sqrt();
            if *s < SCALE_EPS {
                *s = 1.0;
            }
        }
        Standardization { mean, scale }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Controls within-set pair subsampling during problem construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PairSampling {
    /// Within-set pairs are capped at this multiple of the ordered-pair count.
    pub cap_factor: usize,
    pub seed: u64,
}

impl Default for PairSampling {
    fn default() -> Self {
        PairSampling {
            cap_factor: 4,
            seed: 0,
        }
    }
}

/// A ready-to-solve ranking problem over standardized rows.
#[derive(Debug, Clone)]
pub struct RankingProblem {
    /// Standardized rows: set A first, then set B.
    pub data: Vec<Vec<f64>>,
    /// (i, j) pairs where row i must outrank row j; the full A x B product.
    pub ordered_pairs: Vec<(usize, usize)>,
    /// Within-set (i, j) pairs whose scores should match.
    pub similar_pairs: Vec<(usize, usize)>,
    pub c_tradeoff: f64,
    pub standardization: Standardization,
    /// Rows 0..len_a belong to set A.
    pub len_a: usize,
}

/// Builds a problem with default pair sampling.
pub fn build_problem(
    features_a: &[Vec<f64>],
    features_b: &[Vec<f64>],
    c: f64,
) -> Result<RankingProblem> {
    build_problem_with(features_a, features_b, c, &PairSampling::default())
}

/// Builds a problem: standardizes A followed by B, takes the full ordered
/// cross product, and subsamples within-set pairs to the configured cap.
pub fn build_problem_with(
    features_a: &[Vec<f64>],
    features_b: &[Vec<f64>],
    c: f64,
    sampling: &PairSampling,
) -> Result<RankingProblem> {
    if features_a.is_empty() {
        return Err(Error::EmptyEmotionSet("set A has no samples".into()));
    }
    if features_b.is_empty() {
        return Err(Error::EmptyEmotionSet("set B has no samples".into()));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "trade-off C must be positive, got {c}"
        )));
    }
    let dim = features_a[0].len();
    for row in features_a.iter().chain(features_b) {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
    }

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(features_a.len() + features_b.len());
    rows.extend(features_a.iter().cloned());
    rows.extend(features_b.iter().cloned());
    let standardization = Standardization::fit(&rows);
    let data: Vec<Vec<f64>> = rows.iter().map(|r| standardization.apply(r)).collect();

    let len_a = features_a.len();
    let len_b = features_b.len();
    let mut ordered_pairs = Vec::with_capacity(len_a * len_b);
    for i in 0..len_a {
        for j in 0..len_b {
            ordered_pairs.push((i, len_a + j));
        }
    }

    let mut candidates = Vec::new();
    for i in 0..len_a {
        for j in i + 1..len_a {
            candidates.push((i, j));
        }
    }
    for i in 0..len_b {
        for j in i + 1..len_b {
            candidates.push((len_a + i, len_a + j));
        }
    }
    let cap = sampling.cap_factor.saturating_mul(ordered_pairs.len());
    let similar_pairs = if candidates.len() > cap {
        let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
        let mut sampled: Vec<(usize, usize)> = candidates
            .choose_multiple(&mut rng, cap)
            .cloned()
            .collect();
        sampled.sort_unstable();
        sampled
    } else {
        candidates
    };

    Ok(RankingProblem {
        data,
        ordered_pairs,
        similar_pairs,
        c_tradeoff: c,
        standardization,
        len_a,
    })
}

/// Solver knobs; defaults follow the pipeline configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grad_tol: 1e-8,
            max_iters: 500,
        }
    }
}

/// Outcome of one solve: the weight vector plus convergence diagnostics.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub weights: Vec<f64>,
    pub converged: bool,
    pub objective: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// Objective value at the start of every iteration; non-increasing.
    pub objective_history: Vec<f64>,
}

/// Objective value at `w` given precomputed row scores.
fn objective_from_scores(problem: &RankingProblem, w: &DVector<f64>, scores: &DVector<f64>) -> f64 {
    let c = problem.c_tradeoff;
    let mut loss = 0.0;
    for &(i, j) in &problem.ordered_pairs {
        let margin = 1.0 - (scores[i] - scores[j]);
        if margin > 0.0 {
            loss += margin * margin;
        }
    }
    for &(i, j) in &problem.similar_pairs {
        let diff = scores[i] - scores[j];
        loss += diff * diff;
    }
    0.5 * w.dot(w) + c * loss
}

/// Analytic gradient of the objective at `w`.
pub fn objective_gradient(problem: &RankingProblem, w: &[f64]) -> Vec<f64> {
    let (x, wv) = problem_matrices(problem, w);
    let scores = &x * &wv;
    let grad = gradient_from_scores(problem, &x, &wv, &scores);
    grad.iter().cloned().collect()
}

/// Objective value at an arbitrary `w`; shared by tests and diagnostics.
pub fn objective_value(problem: &RankingProblem, w: &[f64]) -> f64 {
    let (x, wv) = problem_matrices(problem, w);
    let scores = &x * &wv;
    objective_from_scores(problem, &wv, &scores)
}

fn problem_matrices(problem: &RankingProblem, w: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
    let n = problem.data.len();
    let d = problem.data.first().map_or(0, Vec::len);
    let x = DMatrix::from_row_iterator(n, d, problem.data.iter().flatten().cloned());
    (x, DVector::from_column_slice(w))
}

fn gradient_from_scores(
    problem: &RankingProblem,
    x: &DMatrix<f64>,
    w: &DVector<f64>,
    scores: &DVector<f64>,
) -> DVector<f64> {
    let c = problem.c_tradeoff;
    let mut beta = DVector::zeros(problem.data.len());
    for &(i, j) in &problem.ordered_pairs {
        let violation = scores[i] - scores[j] - 1.0;
        if violation < 0.0 {
            beta[i] += violation;
            beta[j] -= violation;
        }
    }
    for &(i, j) in &problem.similar_pairs {
        let diff = scores[i] - scores[j];
        beta[i] += diff;
        beta[j] -= diff;
    }
    w + 2.0 * c * (x.transpose() * beta)
}

/// Minimizes the ranking objective by damped Newton iterations.
///
/// The generalized Hessian is `I + 2C X' L X` where L is the graph
/// Laplacian of the currently active ordered pairs plus all similar pairs,
/// so each iteration costs two thin matrix products regardless of how many
/// pairs exist. Backtracking keeps the objective non-increasing. When the
/// gradient norm has not reached `grad_tol` after `max_iters` iterations
/// the best iterate is returned with `converged = false`.
pub fn solve(problem: &RankingProblem, options: &SolverOptions) -> SolveResult {
    let n = problem.data.len();
    let d = problem.data.first().map_or(0, Vec::len);
    let x = DMatrix::from_row_iterator(n, d, problem.data.iter().flatten().cloned());
    let c = problem.c_tradeoff;

    let mut w: DVector<f64> = DVector::zeros(d);
    let mut scores: DVector<f64> = DVector::zeros(n);
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..options.max_iters {
        let obj = objective_from_scores(problem, &w, &scores);
        history.push(obj);
        let grad = gradient_from_scores(problem, &x, &w, &scores);
        if grad.norm() < options.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;

        // Laplacian over active ordered pairs and all similar pairs.
        let mut lap = DMatrix::zeros(n, n);
        for &(i, j) in &problem.ordered_pairs {
            if scores[i] - scores[j] < 1.0 {
                lap[(i, i)] += 1.0;
                lap[(j, j)] += 1.0;
                lap[(i, j)] -= 1.0;
                lap[(j, i)] -= 1.0;
            }
        }
        for &(i, j) in &problem.similar_pairs {
            lap[(i, i)] += 1.0;
            lap[(j, j)] += 1.0;
            lap[(i, j)] -= 1.0;
            lap[(j, i)] -= 1.0;
        }
        let mut hessian = x.transpose() * (&lap * &x) * (2.0 * c);
        for k in 0..d {
            hessian[(k, k)] += 1.0;
        }

        let step = match nalgebra::Cholesky::new(hessian) {
            Some(chol) => -chol.solve(&grad),
            // H >= I, so this only trips on numerical breakdown.
            None => -&grad,
        };
        let dir_deriv = grad.dot(&step);
        let step_scores = &x * &step;

        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand_w = &w + t * &step;
            let cand_scores = &scores + t * &step_scores;
            let cand_obj = objective_from_scores(problem, &cand_w, &cand_scores);
            if cand_obj <= obj + 1e-4 * t * dir_deriv {
                w = cand_w;
                scores = cand_scores;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // Numerically flat; the current iterate is as good as it gets.
            break;
        }
    }

    let objective = objective_from_scores(problem, &w, &scores);
    let gradient_norm = gradient_from_scores(problem, &x, &w, &scores).norm();
    if gradient_norm < options.grad_tol {
        converged = true;
    }
    SolveResult {
        weights: w.iter().cloned().collect(),
        converged,
        objective,
        gradient_norm,
        iterations,
        objective_history: history,
    }
}

/// A trained ranking function for one emotion pair, self-contained with
/// its standardization and training-score bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingModel {
    pub format_version: u32,
    /// (higher-ranked label, lower-ranked label).
    pub emotion_pair: (String, String),
    pub weights: Vec<f64>,
    pub standardization: Standardization,
    pub score_min: f64,
    pub score_max: f64,
    pub c: f64,
    pub converged: bool,
    pub objective: f64,
}

impl RankingModel {
    /// Assembles a model from a solved problem, fixing the normalization
    /// band to the score range of the training rows.
    pub fn from_solution(
        problem: &RankingProblem,
        solution: &SolveResult,
        emotion_a: impl Into<String>,
        emotion_b: impl Into<String>,
    ) -> Self {
        let w = DVector::from_column_slice(&solution.weights);
        let mut score_min = f64::INFINITY;
        let mut score_max = f64::NEG_INFINITY;
        for row in &problem.data {
            let s = DVector::from_column_slice(row).dot(&w);
            score_min = score_min.min(s);
            score_max = score_max.max(s);
        }
        RankingModel {
            format_version: MODEL_FORMAT_VERSION,
            emotion_pair: (emotion_a.into(), emotion_b.into()),
            weights: solution.weights.clone(),
            standardization: problem.standardization.clone(),
            score_min,
            score_max,
            c: problem.c_tradeoff,
            converged: solution.converged,
            objective: solution.objective,
        }
    }

    pub fn pair_key(&self) -> String {
        pair_key(&self.emotion_pair.0, &self.emotion_pair.1)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: RankingModel = serde_json::from_str(text)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidConfig(format!(
                "ranking model format {} unsupported (expected {})",
                model.format_version, MODEL_FORMAT_VERSION
            )));
        }
        model.validate()?;
        Ok(model)
    }

    /// Structural invariants a loaded model must satisfy.
    pub fn validate(&self) -> Result<()> {
        let key = self.pair_key();
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "model {key}: non-finite weight"
            )));
        }
        if self.standardization.mean.len() != self.weights.len()
            || self.standardization.scale.len() != self.weights.len()
        {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: self.standardization.mean.len(),
            });
        }
        if self
            .standardization
            .scale
            .iter()
            .any(|s| !s.is_finite() || *s <= 0.0)
        {
            return Err(Error::InvalidConfig(format!(
                "model {key}: standardization scale must be positive"
            )));
        }
        if !(self.score_min.is_finite() && self.score_max.is_finite())
            || self.score_min > self.score_max
        {
            return Err(Error::InvalidConfig(format!(
                "model {key}: bad score band [{}, {}]",
                self.score_min, self.score_max
            )));
        }
        Ok(())
    }
}

/// Key used for attribute-vector entries and CSV columns.
pub fn pair_key(emotion_a: &str, emotion_b: &str) -> String {
    format!("{emotion_a}_vs_{emotion_b}")
}

/// Raw ranking score of an unstandardized vector.
pub fn rank_score(model: &RankingModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.weights.len() {
        return Err(Error::DimensionMismatch {
            expected: model.weights.len(),
            got: x.len(),
        });
    }
    let z = model.standardization.apply(x);
    Ok(z.iter().zip(&model.weights).map(|(a, b)| a * b).sum())
}

/// Maps a raw score into [0, 1] against the model's training band.
/// Degenerate bands (min == max) map everything to 0.5.
pub fn normalize_attribute(model: &RankingModel, raw_score: f64) -> f64 {
    let span = model.score_max - model.score_min;
    if span <= SCALE_EPS {
        return 0.5;
    }
    ((raw_score - model.score_min) / span).clamp(0.0, 1.0)
}

/// Where an attribute vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeSource {
    Predicted,
    Manual,
}

/// Normalized attribute values keyed by emotion pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionAttributeVector {
    pub entries: BTreeMap<String, f64>,
    pub source: AttributeSource,
}

impl EmotionAttributeVector {
    pub fn new(entries: BTreeMap<String, f64>, source: AttributeSource) -> Result<Self> {
        for (key, &v) in &entries {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "attribute '{key}' = {v} outside [0, 1]"
                )));
            }
        }
        Ok(EmotionAttributeVector { entries, source })
    }
}

/// Scores `x` with one model per expected pair and normalizes each score.
pub fn predict_attribute_vector(
    models: &[RankingModel],
    expected_pairs: &[(String, String)],
    x: &[f64],
) -> Result<EmotionAttributeVector> {
    let mut entries = BTreeMap::new();
    for pair in expected_pairs {
        let model = models
            .iter()
            .find(|m| &m.emotion_pair == pair)
            .ok_or_else(|| Error::MissingPairModel {
                pair: pair_key(&pair.0, &pair.1),
            })?;
        let raw = rank_score(model, x)?;
        entries.insert(model.pair_key(), normalize_attribute(model, raw));
    }
    EmotionAttributeVector::new(entries, AttributeSource::Predicted)
}
