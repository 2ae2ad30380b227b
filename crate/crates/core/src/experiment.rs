//! End-to-end comparison of address-vector variants on a synthetic corpus.
//!
//! One run generates a labelled corpus, holds out a test split, and trains
//! three classifiers that differ only in how address vectors are built:
//!
//! * `plain`: basic cleaning, unweighted mean of token vectors;
//! * `tfidf_basic`: basic cleaning, TF-IDF weighted mean;
//! * `tfidf_full`: full preprocessing (tables built from the training split),
//!   TF-IDF weighted mean.
//!
//! Embeddings, IDF and preprocessing tables see only the training split.

use serde::{Deserialize, Serialize};

use crate::classify::{evaluate, train_softmax_with_classes, ClassifierModel, EvalReport, TrainConfig};
use crate::corpus::{split_holdout, TokenStatsTable};
use crate::embed::{address_vector, compute_tfidf, train_skipgram, EmbeddingModel, SkipGramConfig, TfIdfModel, Weighting};
use crate::preprocess::{basic_clean, preprocess_address, Mode, PreprocessArtifacts, PreprocessConfig};
use crate::synthgen::{generate_corpus, SynthConfig, SynthRecord};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub synth: SynthConfig,
    pub holdout: f64,
    pub preprocess: PreprocessConfig,
    pub skipgram: SkipGramConfig,
    pub classifier: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            synth: SynthConfig::default(),
            holdout: 0.2,
            preprocess: PreprocessConfig::default(),
            skipgram: SkipGramConfig::default(),
            classifier: TrainConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Same configuration with every seed replaced by `seed`.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut c = self.clone();
        c.synth.seed = seed;
        c.skipgram.seed = seed;
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub seed: u64,
    pub plain: f64,
    pub tfidf_basic: f64,
    pub tfidf_full: f64,
}

impl ExperimentResult {
    /// plain < tfidf_basic < tfidf_full.
    pub fn trend_holds(&self) -> bool {
        self.plain < self.tfidf_basic && self.tfidf_basic < self.tfidf_full
    }
}

/// A trained address-vector classifier and the models it depends on.
pub struct Trained {
    pub embedding: EmbeddingModel,
    pub tfidf: TfIdfModel,
    pub classifier: ClassifierModel,
}

fn fit_and_score(
    train: &[(Vec<String>, String)],
    test: &[(Vec<String>, String)],
    classes: &[String],
    weighted: bool,
    cfg: &ExperimentConfig,
) -> Result<(Trained, EvalReport)> {
    let docs: Vec<&[String]> = train.iter().map(|(t, _)| t.as_slice()).collect();
    let embedding = train_skipgram(&docs, &cfg.skipgram)?;
    let tfidf = compute_tfidf(&TokenStatsTable::from_documents(&docs))?;
    let weighting = if weighted { Weighting::TfIdf(&tfidf) } else { Weighting::Uniform };
    let vectors = |rows: &[(Vec<String>, String)]| -> Vec<Vec<f64>> {
        rows.iter().map(|(t, _)| address_vector(t, &embedding, weighting).values).collect()
    };
    let labels = |rows: &[(Vec<String>, String)]| -> Vec<String> { rows.iter().map(|(_, l)| l.clone()).collect() };
    let classifier = train_softmax_with_classes(&vectors(train), &labels(train), Some(classes), &cfg.classifier)?;
    let ids: Vec<String> = (0..test.len()).map(|i| i.to_string()).collect();
    let (report, _) = evaluate(&classifier, &ids, &vectors(test), &labels(test))?;
    Ok((
        Trained {
            embedding,
            tfidf,
            classifier,
        },
        report,
    ))
}

fn tokenize(records: &[SynthRecord], f: impl Fn(&str) -> Vec<String>) -> Vec<(Vec<String>, String)> {
    records
        .iter()
        .map(|s| (f(&s.record.raw_text), s.record.label.clone().unwrap_or_default()))
        .collect()
}

/// Preprocessing tables built from the basic-cleaned training split.
pub fn build_artifacts(train: &[SynthRecord], config: &PreprocessConfig) -> PreprocessArtifacts {
    let docs: Vec<Vec<String>> = train.iter().map(|s| basic_clean(&s.record.raw_text).tokens).collect();
    PreprocessArtifacts::build(&TokenStatsTable::from_documents(&docs), config.clone())
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let corpus = generate_corpus(&cfg.synth)?;
    let (train, test) = split_holdout(&corpus, cfg.holdout, cfg.synth.seed)?;
    let mut classes: Vec<String> = corpus.iter().filter_map(|s| s.record.label.clone()).collect();
    classes.sort();
    classes.dedup();

    let basic = |t: &str| basic_clean(t).tokens;
    let (train_b, test_b) = (tokenize(&train, basic), tokenize(&test, basic));
    let (_, plain) = fit_and_score(&train_b, &test_b, &classes, false, cfg)?;
    let (_, tfidf_basic) = fit_and_score(&train_b, &test_b, &classes, true, cfg)?;

    let artifacts = build_artifacts(&train, &cfg.preprocess);
    let full = |t: &str| preprocess_address(t, &artifacts, Mode::Full).tokens;
    let (_, tfidf_full) = fit_and_score(&tokenize(&train, full), &tokenize(&test, full), &classes, true, cfg)?;

    Ok(ExperimentResult {
        seed: cfg.synth.seed,
        plain: plain.accuracy,
        tfidf_basic: tfidf_basic.accuracy,
        tfidf_full: tfidf_full.accuracy,
    })
}
