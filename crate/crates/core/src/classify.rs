//! Multinomial logistic regression over address vectors.
//!
//! The objective is the mean cross-entropy plus an L2 penalty on the
//! non-bias weights scaled like scikit-learn's `C = 1 / l2`:
//!
//! `L(W) = (1/N) Σ_i -ln p(y_i | x_i) + (l2 / 2N) ‖W‖²`
//!
//! minimized by full-batch gradient descent from zero weights. Per-example
//! gradient contributions are summed in fixed-size chunks and the chunk sums
//! are reduced in order, so results do not depend on the thread count.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, ARTIFACT_VERSION};

const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub lr: f64,
    pub l2: f64,
    pub iters: usize,
    /// Stop early once every gradient component is below this magnitude.
    pub tol: f64,
    /// Centre and scale features by training-set statistics.
    pub standardize: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 0.1,
            l2: 1.0,
            iters: 5000,
            tol: 1e-5,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub classes: Vec<String>,
    pub dim: usize,
    /// Row-major K × (dim + 1); the last column of each row is the bias.
    pub weights: Vec<f64>,
    pub l2: f64,
    pub iters: usize,
    pub final_loss: f64,
    /// Per-feature (mean, scale) applied before the affine map.
    pub feature_mean: Vec<f64>,
    pub feature_scale: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// Aligned with `ClassifierModel::classes`.
    pub probs: Vec<f64>,
    pub predicted: usize,
}

impl Prediction {
    pub fn max_prob(&self) -> f64 {
        self.probs[self.predicted]
    }
}

fn softmax_in_place(scores: &mut [f64]) {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        z += *s;
    }
    for s in scores.iter_mut() {
        *s /= z;
    }
}

/// Softmax of raw class scores; ties in argmax go to the lowest index.
pub fn softmax(scores: &[f64]) -> Prediction {
    let mut probs = scores.to_vec();
    softmax_in_place(&mut probs);
    let predicted = argmax(&probs);
    Prediction { probs, predicted }
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Dot product with four independent accumulators so the loop vectorizes;
/// the summation order is fixed, so results stay deterministic.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for i in 0..4 {
            acc[i] += x[i] * y[i];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn scores_into(weights: &[f64], x: &[f64], k: usize, out: &mut Vec<f64>) {
    let stride = x.len() + 1;
    out.clear();
    for c in 0..k {
        let row = &weights[c * stride..(c + 1) * stride];
        out.push(dot(&row[..x.len()], x) + row[x.len()]);
    }
}

/// Regularized objective and its gradient at `weights` (layout as in
/// [`ClassifierModel::weights`]) over `features` with class indices `labels`.
pub fn loss_and_gradient(weights: &[f64], features: &[Vec<f64>], labels: &[usize], k: usize, l2: f64) -> (f64, Vec<f64>) {
    let n = features.len();
    let dim = features.first().map_or(0, Vec::len);
    let stride = dim + 1;
    assert_eq!(weights.len(), k * stride, "weight shape");
    let partials: Vec<(f64, Vec<f64>)> = features
        .par_chunks(CHUNK)
        .zip(labels.par_chunks(CHUNK))
        .map(|(xs, ys)| {
            let mut loss = 0.0;
            let mut grad = vec![0.0; weights.len()];
            let mut p = Vec::with_capacity(k);
            for (x, &y) in xs.iter().zip(ys) {
                scores_into(weights, x, k, &mut p);
                let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + p.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
                loss += lse - p[y];
                for c in 0..k {
                    let g = (p[c] - lse).exp() - f64::from(u8::from(c == y));
                    let row = &mut grad[c * stride..(c + 1) * stride];
                    for (r, v) in row[..dim].iter_mut().zip(x) {
                        *r += g * v;
                    }
                    row[dim] += g;
                }
            }
            (loss, grad)
        })
        .collect();

    let mut loss = 0.0;
    let mut grad = vec![0.0; weights.len()];
    for (l, g) in partials {
        loss += l;
        for (a, b) in grad.iter_mut().zip(g) {
            *a += b;
        }
    }
    let nf = n as f64;
    let mut penalty = 0.0;
    for c in 0..k {
        for j in 0..dim {
            let w = weights[c * stride + j];
            penalty += w * w;
            grad[c * stride + j] += l2 * w;
        }
    }
    for g in grad.iter_mut() {
        *g /= nf;
    }
    (loss / nf + l2 * penalty / (2.0 * nf), grad)
}

pub fn train_softmax(features: &[Vec<f64>], labels: &[String], cfg: &TrainConfig) -> Result<ClassifierModel> {
    train_softmax_with_classes(features, labels, None, cfg)
}

/// As [`train_softmax`], with an explicit class list; every listed class must
/// have at least one example.
pub fn train_softmax_with_classes(
    features: &[Vec<f64>],
    labels: &[String],
    classes: Option<&[String]>,
    cfg: &TrainConfig,
) -> Result<ClassifierModel> {
    if !(cfg.lr.is_finite() && cfg.lr > 0.0) || !(cfg.l2.is_finite() && cfg.l2 >= 0.0) {
        return Err(Error::Config("lr must be positive and l2 non-negative".into()));
    }
    if features.len() != labels.len() {
        return Err(Error::Input(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let classes: Vec<String> = match classes {
        Some(c) => c.to_vec(),
        None => {
            let set: std::collections::BTreeSet<&String> = labels.iter().collect();
            set.into_iter().cloned().collect()
        }
    };
    if classes.len() < 2 {
        return Err(Error::Training("need at least two classes".into()));
    }
    let index: BTreeMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut seen = vec![false; classes.len()];
    let mut y = Vec::with_capacity(labels.len());
    for l in labels {
        let &i = index
            .get(l.as_str())
            .ok_or_else(|| Error::Training(format!("label {l:?} is not a known class")))?;
        seen[i] = true;
        y.push(i);
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Training(format!("class {:?} has no training examples", classes[i])));
    }
    let dim = features[0].len();
    if features.iter().any(|f| f.len() != dim) {
        return Err(Error::Input("feature rows differ in dimension".into()));
    }

    let (mean, scale) = if cfg.standardize {
        feature_stats(features, dim)
    } else {
        (vec![0.0; dim], vec![1.0; dim])
    };
    let xs: Vec<Vec<f64>> = features.iter().map(|f| standardize(f, &mean, &scale)).collect();

    let k = classes.len();
    let mut w = vec![0.0; k * (dim + 1)];
    let mut loss = loss_and_gradient(&w, &xs, &y, k, cfg.l2).0;
    let mut iters = 0;
    while iters < cfg.iters {
        let (l, g) = loss_and_gradient(&w, &xs, &y, k, cfg.l2);
        loss = l;
        if g.iter().all(|v| v.abs() < cfg.tol) {
            break;
        }
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi -= cfg.lr * gi;
        }
        iters += 1;
        if iters == cfg.iters {
            loss = loss_and_gradient(&w, &xs, &y, k, cfg.l2).0;
        }
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Training("weights diverged; lower lr".into()));
    }
    Ok(ClassifierModel {
        classes,
        dim,
        weights: w,
        l2: cfg.l2,
        iters,
        final_loss: loss,
        feature_mean: mean,
        feature_scale: scale,
    })
}

fn feature_stats(features: &[Vec<f64>], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let n = features.len() as f64;
    let mut mean = vec![0.0; dim];
    for f in features {
        for (m, v) in mean.iter_mut().zip(f) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dim];
    for f in features {
        for ((s, v), m) in var.iter_mut().zip(f).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let scale = var
        .into_iter()
        .map(|s| {
            let sd = (s / n).sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    (mean, scale)
}

fn standardize(x: &[f64], mean: &[f64], scale: &[f64]) -> Vec<f64> {
    x.iter().zip(mean).zip(scale).map(|((v, m), s)| (v - m) / s).collect()
}

impl ClassifierModel {
    pub fn k(&self) -> usize {
        self.classes.len()
    }

    /// Uniform model (all-zero weights) over `classes`.
    pub fn zeros(classes: Vec<String>, dim: usize) -> Self {
        ClassifierModel {
            weights: vec![0.0; classes.len() * (dim + 1)],
            classes,
            dim,
            l2: 0.0,
            iters: 0,
            final_loss: f64::NAN,
            feature_mean: vec![0.0; dim],
            feature_scale: vec![1.0; dim],
        }
    }

    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::Input(format!(
                "vector has dimension {}, model expects {}",
                x.len(),
                self.dim
            )));
        }
        let z = standardize(x, &self.feature_mean, &self.feature_scale);
        let mut out = Vec::with_capacity(self.k());
        scores_into(&self.weights, &z, self.k(), &mut out);
        Ok(out)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        Ok(softmax(&self.scores(x)?))
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        v["version"] = ARTIFACT_VERSION.into();
        if !self.final_loss.is_finite() {
            v["final_loss"] = serde_json::Value::Null;
        }
        Ok(serde_json::to_string(&v)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut v: serde_json::Value = serde_json::from_str(text)?;
        if let Some(o) = v.as_object_mut() {
            o.remove("version");
            if o.get("final_loss").is_some_and(|l| l.is_null()) {
                o.insert("final_loss".into(), serde_json::json!(0.0));
            }
        }
        let m: ClassifierModel = serde_json::from_value(v)?;
        if m.weights.len() != m.k() * (m.dim + 1) || m.k() < 2 {
            return Err(Error::Input("classifier weight matrix has the wrong shape".into()));
        }
        Ok(m)
    }
}

pub const HIST_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    /// `None` when the class was never predicted.
    pub precision: Option<f64>,
    /// `None` when the class has no test examples.
    pub recall: Option<f64>,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub classes: Vec<String>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    /// Counts of max-probability values in bins of width 0.05 over [0, 1];
    /// a value of exactly 1.0 falls in the last bin.
    pub max_prob_histogram: Vec<usize>,
    pub n: usize,
    pub per_class: BTreeMap<String, ClassMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub id: String,
    pub truth: String,
    pub predicted: String,
    pub max_prob: f64,
}

pub fn hist_bin(p: f64) -> usize {
    ((p * HIST_BINS as f64).floor() as usize).min(HIST_BINS - 1)
}

/// Score predictions against truth. Labels not among `classes` count as
/// errors but do not appear in the confusion matrix.
pub fn evaluate_predictions(classes: &[String], truth: &[String], preds: &[Prediction]) -> Result<EvalReport> {
    if truth.is_empty() {
        return Err(Error::Input("empty test set".into()));
    }
    let k = classes.len();
    let mut confusion = vec![vec![0usize; k]; k];
    let mut hist = vec![0usize; HIST_BINS];
    let mut correct = 0;
    for (t, p) in truth.iter().zip(preds) {
        hist[hist_bin(p.max_prob())] += 1;
        if let Some(ti) = classes.iter().position(|c| c == t) {
            confusion[ti][p.predicted] += 1;
            correct += usize::from(ti == p.predicted);
        }
    }
    let per_class = classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let tp = confusion[i][i] as f64;
            let support: usize = confusion[i].iter().sum();
            let predicted: usize = confusion.iter().map(|r| r[i]).sum();
            (
                c.clone(),
                ClassMetrics {
                    precision: (predicted > 0).then(|| tp / predicted as f64),
                    recall: (support > 0).then(|| tp / support as f64),
                    support,
                },
            )
        })
        .collect();
    Ok(EvalReport {
        accuracy: correct as f64 / truth.len() as f64,
        classes: classes.to_vec(),
        confusion,
        max_prob_histogram: hist,
        n: truth.len(),
        per_class,
    })
}

/// Predict every row and score. Returns the report and per-example rows.
pub fn evaluate(
    model: &ClassifierModel,
    ids: &[String],
    features: &[Vec<f64>],
    truth: &[String],
) -> Result<(EvalReport, Vec<PredictionRow>)> {
    let preds = features.iter().map(|f| model.predict(f)).collect::<Result<Vec<_>>>()?;
    let report = evaluate_predictions(&model.classes, truth, &preds)?;
    let rows = ids
        .iter()
        .zip(truth)
        .zip(&preds)
        .map(|((id, t), p)| PredictionRow {
            id: id.clone(),
            truth: t.clone(),
            predicted: model.classes[p.predicted].clone(),
            max_prob: p.max_prob(),
        })
        .collect();
    Ok((report, rows))
}

pub fn write_predictions_csv(path: impl AsRef<Path>, rows: &[PredictionRow]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let io = |e: csv::Error| Error::Input(format!("{}: {e}", path.display()));
    w.write_record(["id", "true_label", "predicted_label", "max_prob"]).map_err(io)?;
    for r in rows {
        w.write_record([&r.id, &r.truth, &r.predicted, &format!("{}", r.max_prob)])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{self, Draw};

    fn gaussian(rng: &mut crate::rng::Rng) -> f64 {
        // Box-Muller
        let u1 = rng.unit().max(1e-300);
        let u2 = rng.unit();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    fn two_clusters(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<String>) {
        let mut rng = rng::stream(seed, "test", 0);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..n {
            let (c, label) = if i % 2 == 0 { (-4.0, "left") } else { (4.0, "right") };
            xs.push(vec![c + gaussian(&mut rng) * 0.5, gaussian(&mut rng) * 0.5]);
            ys.push(label.to_string());
        }
        (xs, ys)
    }

    #[test]
    fn separable_clusters_are_learned() {
        let (xs, ys) = two_clusters(100, 1);
        let m = train_softmax(&xs, &ys, &TrainConfig { iters: 500, ..TrainConfig::default() }).unwrap();
        let (r, _) = evaluate(&m, &ys, &xs, &ys).unwrap();
        assert_eq!(r.accuracy, 1.0);
        let p = m.predict(&[3.5, 0.2]).unwrap();
        assert_eq!(m.classes[p.predicted], "right");
        assert!(p.max_prob() > 0.9);
    }

    #[test]
    fn zero_iterations_are_uniform() {
        let (xs, ys) = two_clusters(10, 2);
        let m = train_softmax(&xs, &ys, &TrainConfig { iters: 0, ..TrainConfig::default() }).unwrap();
        let p = m.predict(&[1.0, 2.0]).unwrap();
        assert_eq!(p.probs, vec![0.5, 0.5]);
        assert_eq!(p.predicted, 0);
    }

    #[test]
    fn missing_class_is_named() {
        let xs = vec![vec![0.0], vec![1.0]];
        let ys = vec!["a".to_string(), "b".to_string()];
        let classes = ["a", "b", "c"].map(String::from);
        let e = train_softmax_with_classes(&xs, &ys, Some(&classes), &TrainConfig::default()).unwrap_err();
        assert!(e.to_string().contains("\"c\""), "{e}");
    }

    #[test]
    fn shift_invariance() {
        let a = softmax(&[1.0, 2.0, 0.5]);
        let b = softmax(&[101.0, 102.0, 100.5]);
        assert_eq!(a.predicted, b.predicted);
        for (x, y) in a.probs.iter().zip(&b.probs) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!((a.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let m = ClassifierModel::zeros(vec!["a".into(), "b".into()], 3);
        assert!(matches!(m.predict(&[1.0]), Err(Error::Input(_))));
    }

    #[test]
    fn loss_is_monotone_for_small_lr() {
        let (xs, ys) = two_clusters(40, 3);
        let y: Vec<usize> = ys.iter().map(|l| usize::from(l == "right")).collect();
        let mut w = vec![0.0; 2 * 3];
        let mut prev = f64::INFINITY;
        for _ in 0..200 {
            let (l, g) = loss_and_gradient(&w, &xs, &y, 2, 1.0);
            assert!(l <= prev + 1e-12);
            prev = l;
            for (wi, gi) in w.iter_mut().zip(&g) {
                *wi -= 0.01 * gi;
            }
        }
    }

    #[test]
    fn report_counts() {
        let classes = ["a", "b"].map(String::from).to_vec();
        let truth = ["a", "a", "b", "a"].map(String::from).to_vec();
        let preds: Vec<Prediction> = [0usize, 0, 0, 0]
            .iter()
            .map(|&i| Prediction {
                probs: if i == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] },
                predicted: i,
            })
            .collect();
        let r = evaluate_predictions(&classes, &truth, &preds).unwrap();
        assert_eq!(r.accuracy, 0.75);
        assert_eq!(r.confusion, vec![vec![3, 0], vec![1, 0]]);
        assert_eq!(r.per_class["b"].precision, None);
        assert_eq!(r.per_class["b"].recall, Some(0.0));
        assert_eq!(r.max_prob_histogram[HIST_BINS - 1], 4);
    }
}
