//! Skip-gram word vectors and weighted per-address averages.
//!
//! Training is skip-gram with negative sampling (SGNS) in the word2vec
//! style: uniform input init in ±0.5/dim, zero output init, a randomly
//! shrunk window per centre word, negatives drawn from the unigram
//! distribution raised to 0.75, and a learning rate decaying linearly to
//! `lr * 1e-4` over all epochs.
//!
//! With `workers > 1` each epoch is trained on disjoint shards by independent
//! copies of the model which are then averaged. The result is still a pure
//! function of the seed, but it depends on the worker count, so it will not
//! match the single-worker model bit for bit.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::TokenStatsTable;
use crate::rng::{self, Draw, Rng};
use crate::{Error, Result, ARTIFACT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkipGramConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr: f64,
    pub min_count: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            lr: 0.025,
            min_count: 2,
            seed: 0,
            workers: 1,
        }
    }
}

impl SkipGramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.window == 0 || self.epochs == 0 || self.workers == 0 {
            return Err(Error::Config(
                "dim, window, epochs and workers must be positive".into(),
            ));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::Config(format!("lr {} must be positive", self.lr)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub dim: usize,
    pub min_count: u64,
    /// Descending corpus count, ties lexicographic.
    pub vocab: Vec<String>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl EmbeddingModel {
    pub fn from_parts(dim: usize, min_count: u64, vocab: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if vocab.len() != vectors.len() {
            return Err(Error::Input("vocab and vectors differ in length".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::Input(format!(
                "vector of length {} (expected {dim}) or with non-finite values",
                v.len()
            )));
        }
        let index = vocab.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(EmbeddingModel {
            dim,
            min_count,
            vocab,
            vectors,
            index,
        })
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| self.vectors[i].as_slice())
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        Some(cosine(self.vector(a)?, self.vector(b)?))
    }

    pub fn to_json(&self) -> Result<String> {
        let vectors: serde_json::Map<String, serde_json::Value> = self
            .vocab
            .iter()
            .zip(&self.vectors)
            .map(|(t, v)| (t.clone(), serde_json::json!(v)))
            .collect();
        let v = serde_json::json!({
            "dim": self.dim,
            "min_count": self.min_count,
            "vectors": vectors,
            "version": ARTIFACT_VERSION,
            "vocab": self.vocab,
        });
        Ok(serde_json::to_string(&v)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct File {
            dim: usize,
            min_count: u64,
            vectors: HashMap<String, Vec<f64>>,
            vocab: Vec<String>,
            #[allow(dead_code)]
            version: u32,
        }
        let mut f: File = serde_json::from_str(text)?;
        let vectors = f
            .vocab
            .iter()
            .map(|t| {
                f.vectors
                    .remove(t)
                    .ok_or_else(|| Error::Input(format!("no vector for vocab token {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(f.dim, f.min_count, f.vocab, vectors)
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gradients of [`sgns_loss`] with respect to each participating vector.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SgnsGrad {
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

/// Negative-sampling loss for one (centre, context, negatives) sample:
///
/// `-ln σ(u_o·v) - Σ_k ln σ(-u_k·v)`
///
/// with `v` the centre's input vector, `u_o` the context's output vector and
/// `u_k` the negatives' output vectors. Gradients are written to `grad`.
pub fn sgns_loss(center: &[f64], context: &[f64], negatives: &[&[f64]], grad: &mut SgnsGrad) -> f64 {
    let d = center.len();
    grad.center.clear();
    grad.center.resize(d, 0.0);
    grad.negatives.resize_with(negatives.len(), Vec::new);

    let s = sigmoid(dot(context, center));
    let mut loss = -s.max(f64::MIN_POSITIVE).ln();
    let g = s - 1.0;
    grad.context.clear();
    grad.context.extend(center.iter().map(|x| g * x));
    for (gc, u) in grad.center.iter_mut().zip(context) {
        *gc += g * u;
    }
    for (k, u) in negatives.iter().enumerate() {
        let s = sigmoid(dot(u, center));
        loss -= (1.0 - s).max(f64::MIN_POSITIVE).ln();
        let gk = &mut grad.negatives[k];
        gk.clear();
        gk.extend(center.iter().map(|x| s * x));
        for (gc, ui) in grad.center.iter_mut().zip(u.iter()) {
            *gc += s * ui;
        }
    }
    loss
}

struct Params {
    input: Vec<Vec<f64>>,
    output: Vec<Vec<f64>>,
}

struct NegativeTable {
    cumulative: Vec<f64>,
}

impl NegativeTable {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NegativeTable { cumulative }
    }

    fn sample(&self, rng: &mut Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocab");
        let u = rng.unit() * total;
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1)
    }
}

/// Train one pass over `docs` (token ids), updating `p` in place.
#[allow(clippy::too_many_arguments)]
fn train_pass(
    p: &mut Params,
    docs: &[Vec<usize>],
    table: &NegativeTable,
    cfg: &SkipGramConfig,
    rng: &mut Rng,
    done: &mut u64,
    first: u64,
    total: u64,
) {
    let mut grad = SgnsGrad::default();
    let mut negs: Vec<usize> = Vec::with_capacity(cfg.negatives);
    let floor = cfg.lr * 1e-4;
    for doc in docs {
        for (i, &center) in doc.iter().enumerate() {
            let progress = (first + *done) as f64 / total as f64;
            let lr = (cfg.lr * (1.0 - progress)).max(floor);
            *done += 1;
            let reach = 1 + rng.index(cfg.window);
            let lo = i.saturating_sub(reach);
            let hi = (i + reach).min(doc.len() - 1);
            for (j, &ctx) in doc.iter().enumerate().take(hi + 1).skip(lo) {
                if j == i {
                    continue;
                }
                negs.clear();
                for _ in 0..cfg.negatives {
                    let n = table.sample(rng);
                    if n != ctx {
                        negs.push(n);
                    }
                }
                {
                    let neg_vecs: Vec<&[f64]> = negs.iter().map(|&n| p.output[n].as_slice()).collect();
                    sgns_loss(&p.input[center], &p.output[ctx], &neg_vecs, &mut grad);
                }
                for (u, g) in p.output[ctx].iter_mut().zip(&grad.context) {
                    *u -= lr * g;
                }
                for (k, &n) in negs.iter().enumerate() {
                    for (u, g) in p.output[n].iter_mut().zip(&grad.negatives[k]) {
                        *u -= lr * g;
                    }
                }
                for (v, g) in p.input[center].iter_mut().zip(&grad.center) {
                    *v -= lr * g;
                }
            }
        }
    }
}

/// Train skip-gram vectors over tokenized addresses.
pub fn train_skipgram<D: AsRef<[String]>>(corpus: &[D], cfg: &SkipGramConfig) -> Result<EmbeddingModel> {
    cfg.validate()?;
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for d in corpus {
        for t in d.as_ref() {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let mut vocab: Vec<(&str, u64)> = counts.into_iter().filter(|&(_, c)| c >= cfg.min_count).collect();
    if vocab.is_empty() {
        return Err(Error::Training(format!(
            "no token occurs at least {} times",
            cfg.min_count
        )));
    }
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let index: HashMap<&str, usize> = vocab.iter().enumerate().map(|(i, (t, _))| (*t, i)).collect();
    let docs: Vec<Vec<usize>> = corpus
        .iter()
        .map(|d| d.as_ref().iter().filter_map(|t| index.get(t.as_str()).copied()).collect::<Vec<_>>())
        .filter(|d| d.len() >= 2)
        .collect();
    let table = NegativeTable::new(&vocab.iter().map(|v| v.1).collect::<Vec<_>>());

    let dim = cfg.dim;
    let mut init = rng::stream(cfg.seed, "skipgram-init", 0);
    let mut p = Params {
        input: (0..vocab.len())
            .map(|_| (0..dim).map(|_| (init.unit() - 0.5) / dim as f64).collect())
            .collect(),
        output: vec![vec![0.0; dim]; vocab.len()],
    };
    let per_epoch: u64 = docs.iter().map(|d| d.len() as u64).sum();
    let total = (per_epoch * cfg.epochs as u64).max(1);

    if cfg.workers == 1 {
        let mut rng = rng::stream(cfg.seed, "skipgram", 0);
        let mut done = 0;
        for _ in 0..cfg.epochs {
            train_pass(&mut p, &docs, &table, cfg, &mut rng, &mut done, 0, total);
        }
    } else {
        let shard = docs.len().div_ceil(cfg.workers).max(1);
        for epoch in 0..cfg.epochs {
            let first = per_epoch * epoch as u64;
            let copies: Vec<Params> = docs
                .par_chunks(shard)
                .enumerate()
                .map(|(w, chunk)| {
                    let mut local = Params {
                        input: p.input.clone(),
                        output: p.output.clone(),
                    };
                    let mut rng = rng::stream(cfg.seed, "skipgram", (epoch * cfg.workers + w) as u64);
                    // every shard sees the same schedule position as a single pass would at its offset
                    let mut done = 0;
                    let offset = first + (w * shard) as u64;
                    train_pass(&mut local, chunk, &table, cfg, &mut rng, &mut done, offset, total);
                    local
                })
                .collect();
            let n = copies.len() as f64;
            for (which, target) in [(0, &mut p.input), (1, &mut p.output)] {
                for (i, row) in target.iter_mut().enumerate() {
                    for (k, x) in row.iter_mut().enumerate() {
                        *x = copies
                            .iter()
                            .map(|c| if which == 0 { c.input[i][k] } else { c.output[i][k] })
                            .sum::<f64>()
                            / n;
                    }
                }
            }
        }
    }

    EmbeddingModel::from_parts(
        dim,
        cfg.min_count,
        vocab.iter().map(|(t, _)| t.to_string()).collect(),
        p.input,
    )
}

/// Inverse document frequencies, `idf(t) = ln(N / df(t))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    pub idf: BTreeMap<String, f64>,
    pub total_docs: u64,
}

pub fn compute_tfidf(stats: &TokenStatsTable) -> Result<TfIdfModel> {
    let n = stats.total_docs();
    if n == 0 {
        return Err(Error::Input("token statistics cover no documents".into()));
    }
    let idf = stats
        .doc_freqs()
        .map(|(t, df)| (t.to_string(), (n as f64 / df as f64).ln()))
        .collect();
    Ok(TfIdfModel { idf, total_docs: n })
}

impl TfIdfModel {
    pub fn idf(&self, token: &str) -> Option<f64> {
        self.idf.get(token).copied()
    }

    pub fn max_idf(&self) -> f64 {
        (self.total_docs as f64).ln()
    }

    /// Tokens seen in a single document carry no usable signal.
    pub fn is_singleton(&self, token: &str) -> bool {
        self.idf(token).is_some_and(|w| w >= self.max_idf() - 1e-12)
    }

    pub fn to_json(&self) -> Result<String> {
        let v = serde_json::json!({
            "idf": self.idf,
            "total_docs": self.total_docs,
            "version": ARTIFACT_VERSION,
        });
        Ok(serde_json::to_string(&v)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct File {
            idf: BTreeMap<String, f64>,
            total_docs: u64,
        }
        let f: File = serde_json::from_str(text)?;
        Ok(TfIdfModel {
            idf: f.idf,
            total_docs: f.total_docs,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weighting<'a> {
    /// Plain mean of in-vocabulary token vectors.
    Uniform,
    TfIdf(&'a TfIdfModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AddressVector {
    pub values: Vec<f64>,
    /// Fraction of the address's tokens that contributed a positive weight.
    pub coverage: f64,
}

/// Weighted average of token vectors.
///
/// With TF-IDF weighting, token `t` gets weight `tf(t) * idf(t)`; singleton
/// tokens and tokens unknown to either model are skipped. Weights are
/// renormalized over contributors. Contributions are summed over distinct
/// tokens in sorted order, so the result does not depend on token order.
pub fn address_vector<S: AsRef<str>>(tokens: &[S], emb: &EmbeddingModel, weighting: Weighting<'_>) -> AddressVector {
    let mut tf: BTreeMap<&str, usize> = BTreeMap::new();
    for t in tokens {
        *tf.entry(t.as_ref()).or_insert(0) += 1;
    }
    let mut weighted: Vec<(&[f64], f64, usize)> = Vec::new();
    for (t, n) in tf {
        let Some(v) = emb.vector(t) else { continue };
        let w = match weighting {
            Weighting::Uniform => n as f64,
            Weighting::TfIdf(m) => match m.idf(t) {
                Some(_) if m.is_singleton(t) => continue,
                Some(idf) => n as f64 * idf,
                None => continue,
            },
        };
        if w > 0.0 {
            weighted.push((v, w, n));
        }
    }
    let total: f64 = weighted.iter().map(|x| x.1).sum();
    let mut values = vec![0.0; emb.dim];
    if weighted.is_empty() || total <= 0.0 {
        return AddressVector { values, coverage: 0.0 };
    }
    for (v, w, _) in &weighted {
        let w = w / total;
        for (o, x) in values.iter_mut().zip(v.iter()) {
            *o += w * x;
        }
    }
    let used: usize = weighted.iter().map(|x| x.2).sum();
    AddressVector {
        values,
        coverage: used as f64 / tokens.len() as f64,
    }
}
