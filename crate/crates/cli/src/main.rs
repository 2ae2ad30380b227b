//! `addrnorm`: file-in, file-out driver for the address workflow.
//!
//! Every subcommand prints a one-line JSON summary on stdout and writes a
//! `<output>.manifest.json` next to its output. Exit status is 0 on success,
//! 1 for bad input data, 2 for bad flags or configuration.

mod files;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use addrnorm_core::addrlm::{flag_address, train_ngram, FlagContext, FlagStatus, LmConfig, NgramLM, DEFAULT_TAU_CONF};
use addrnorm_core::classify::{evaluate, train_softmax, write_predictions_csv, ClassifierModel, TrainConfig};
use addrnorm_core::corpus::{build_token_stats, load_corpus, split_holdout, write_jsonl as write_corpus, Format, TokenStatsTable};
use addrnorm_core::embed::{address_vector, compute_tfidf, train_skipgram, EmbeddingModel, SkipGramConfig, TfIdfModel, Weighting};
use addrnorm_core::preprocess::{preprocess_address, Mode, PreprocessArtifacts, PreprocessConfig};
use addrnorm_core::synthgen::{generate_corpus, recovery_report, SynthConfig, SynthRecord, Truth};
use addrnorm_core::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use files::{load_config, read_jsonl, read_text, write_jsonl, write_text, RunManifest, TokenRow};

#[derive(Parser)]
#[command(name = "addrnorm", version, about = "Normalize and classify noisy shipping addresses")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// JSON file overriding the command's default parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Holdout {
    /// Hold out this fraction of rows (seeded by --seed). Training commands
    /// use the remaining rows, `eval` uses the held-out rows.
    #[arg(long)]
    holdout: Option<f64>,
}

#[derive(Args)]
struct VectorModels {
    #[arg(long)]
    embedding: PathBuf,
    /// IDF weights; without it address vectors are plain token means.
    #[arg(long)]
    tfidf: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled synthetic corpus with injected errors.
    Synth {
        #[arg(long)]
        output: PathBuf,
        /// Also write the ground-truth sidecar JSONL here.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        addresses: Option<usize>,
        #[arg(long)]
        subregions: Option<usize>,
    },
    /// Count tokens, document frequencies and bigrams over basic-cleaned text.
    Stats {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        holdout: Holdout,
    },
    /// Build split/merge/bigram/spell tables from token statistics.
    BuildArtifacts {
        #[command(flatten)]
        common: Common,
    },
    /// Clean a corpus into token rows.
    Preprocess {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "full")]
        mode: String,
        #[arg(long)]
        artifacts: Option<PathBuf>,
    },
    /// Train skip-gram vectors on token rows.
    TrainEmbed {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        holdout: Holdout,
    },
    /// Inverse document frequencies from token rows (.jsonl) or a stats file.
    Tfidf {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        holdout: Holdout,
    },
    /// Train the sub-region classifier.
    TrainClf {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        holdout: Holdout,
        #[command(flatten)]
        vectors: VectorModels,
    },
    /// Score a classifier on labelled token rows.
    Eval {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        holdout: Holdout,
        #[command(flatten)]
        vectors: VectorModels,
        #[arg(long)]
        model: PathBuf,
        /// Per-row CSV of (id, true label, predicted label, max probability).
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Predict sub-regions for token rows.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        vectors: VectorModels,
        #[arg(long)]
        model: PathBuf,
    },
    /// Train the n-gram language model and calibrate its threshold.
    LmTrain {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        holdout: Holdout,
    },
    /// Perplexity of each token row.
    LmScore {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lm: PathBuf,
    },
    /// Flag junk or ambiguous raw addresses.
    Flag {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        vectors: VectorModels,
        #[arg(long, default_value = "full")]
        mode: String,
        #[arg(long)]
        artifacts: Option<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        lm: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TAU_CONF)]
        tau_conf: f64,
        /// Defaults to the threshold calibrated at training time.
        #[arg(long)]
        tau_ppl: Option<f64>,
    },
    /// Per-category share of injected errors the tables undo.
    RecoveryReport {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        artifacts: PathBuf,
    },
}

fn select<T: Clone>(rows: Vec<T>, holdout: &Holdout, seed: u64, test_side: bool) -> Result<Vec<T>> {
    match holdout.holdout {
        None => Ok(rows),
        Some(f) => {
            let (train, test) = split_holdout(&rows, f, seed)?;
            Ok(if test_side { test } else { train })
        }
    }
}

fn load_artifacts(mode: Mode, path: Option<&Path>, m: &mut RunManifest) -> Result<PreprocessArtifacts> {
    match (mode, path) {
        (Mode::Basic, _) => Ok(PreprocessArtifacts::default()),
        (Mode::Full, None) => Err(Error::Config("--mode full requires --artifacts".into())),
        (Mode::Full, Some(p)) => {
            m.input("artifacts", p)?;
            PreprocessArtifacts::from_json(&read_text(p)?)
        }
    }
}

struct Vectors {
    embedding: EmbeddingModel,
    tfidf: Option<TfIdfModel>,
}

impl Vectors {
    fn load(v: &VectorModels, m: &mut RunManifest) -> Result<Self> {
        m.input("embedding", &v.embedding)?;
        let embedding = EmbeddingModel::from_json(&read_text(&v.embedding)?)?;
        let tfidf = match &v.tfidf {
            Some(p) => {
                m.input("tfidf", p)?;
                Some(TfIdfModel::from_json(&read_text(p)?)?)
            }
            None => None,
        };
        m.config("weighting", if tfidf.is_some() { "tfidf" } else { "uniform" })?;
        Ok(Vectors { embedding, tfidf })
    }

    fn weighting(&self) -> Weighting<'_> {
        self.tfidf.as_ref().map_or(Weighting::Uniform, Weighting::TfIdf)
    }

    fn of(&self, rows: &[TokenRow]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|r| address_vector(&r.tokens, &self.embedding, self.weighting()).values)
            .collect()
    }
}

fn labels(rows: &[TokenRow]) -> Result<Vec<String>> {
    rows.iter()
        .map(|r| {
            r.label
                .clone()
                .ok_or_else(|| Error::Input(format!("row {:?} has no label", r.id)))
        })
        .collect()
}

fn token_docs(rows: &[TokenRow]) -> Vec<&[String]> {
    rows.iter().map(|r| r.tokens.as_slice()).collect()
}

fn run(cli: Cli) -> Result<serde_json::Value> {
    match cli.command {
        Command::Synth {
            output,
            truth,
            config,
            seed,
            addresses,
            subregions,
        } => {
            let mut cfg: SynthConfig = load_config(config.as_deref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = addresses {
                cfg.n_addresses = n;
            }
            if let Some(n) = subregions {
                cfg.n_subregions = n;
            }
            let corpus = generate_corpus(&cfg)?;
            let records: Vec<_> = corpus.iter().map(|s| s.record.clone()).collect();
            write_corpus(&output, &records)?;
            let mut m = RunManifest::new("synth", cfg.seed);
            m.config("synth", &cfg)?;
            if let Some(t) = &truth {
                write_jsonl(t, corpus.iter().map(SynthRecord::truth))?;
                m.write_for(t)?;
            }
            m.write_for(&output)?;
            Ok(json!({
                "command": "synth",
                "corruptions": corpus.iter().map(|s| s.corruptions.len()).sum::<usize>(),
                "output": output,
                "records": corpus.len(),
            }))
        }
        Command::Stats { common, holdout } => {
            let mut m = RunManifest::new("stats", common.seed);
            m.input("input", &common.input)?;
            m.config("holdout", holdout.holdout)?;
            let records = load_corpus(&common.input, Format::from_path(&common.input))?;
            let records = select(records, &holdout, common.seed, false)?;
            let stats = build_token_stats(&records)?;
            write_text(&common.output, &stats.to_json()?)?;
            m.write_for(&common.output)?;
            Ok(json!({
                "command": "stats",
                "docs": stats.total_docs(),
                "output": common.output,
                "tokens": stats.total_tokens(),
                "vocab": stats.vocab_size(),
            }))
        }
        Command::BuildArtifacts { common } => {
            let cfg: PreprocessConfig = load_config(common.config.as_deref())?;
            let mut m = RunManifest::new("build-artifacts", common.seed);
            m.input("input", &common.input)?;
            m.config("preprocess", &cfg)?;
            let stats = TokenStatsTable::from_json(&read_text(&common.input)?)?;
            let a = PreprocessArtifacts::build(&stats, cfg);
            write_text(&common.output, &a.to_json()?)?;
            m.write_for(&common.output)?;
            Ok(json!({
                "bigram": a.bigram.len(),
                "command": "build-artifacts",
                "leaders": a.leaders.len(),
                "merge": a.merge.len(),
                "output": common.output,
                "split": a.split.len(),
            }))
        }
        Command::Preprocess { common, mode, artifacts } => {
            let mode: Mode = mode.parse()?;
            let mut m = RunManifest::new("preprocess", common.seed);
            m.input("input", &common.input)?;
            m.config("mode", mode)?;
            let a = load_artifacts(mode, artifacts.as_deref(), &mut m)?;
            let records = load_corpus(&common.input, Format::from_path(&common.input))?;
            let rows: Vec<TokenRow> = records
                .iter()
                .map(|r| {
                    let clean = preprocess_address(&r.raw_text, &a, mode);
                    TokenRow {
                        id: r.id.clone(),
                        label: r.label.clone(),
                        pincode: clean.pincode.clone().or_else(|| r.pincode.clone()),
                        tokens: clean.tokens,
                    }
                })
                .collect();
            write_jsonl(&common.output, &rows)?;
            m.write_for(&common.output)?;
            Ok(json!({
                "command": "preprocess",
                "mode": mode.to_string(),
                "output": common.output,
                "records": rows.len(),
            }))
        }
        Command::TrainEmbed { common, holdout } => {
            let mut cfg: SkipGramConfig = load_config(common.config.as_deref())?;
            cfg.seed = common.seed;
            let mut m = RunManifest::new("train-embed", common.seed);
            m.input("input", &common.input)?;
            m.config("holdout", holdout.holdout)?;
            m.config("skipgram", &cfg)?;
            let rows: Vec<TokenRow> = select(read_jsonl(&common.input)?, &holdout, common.seed, false)?;
            let emb = train_skipgram(&token_docs(&rows), &cfg)?;
            write_text(&common.output, &emb.to_json()?)?;
            m.write_for(&common.output)?;
            Ok(json!({
                "command": "train-embed",
                "dim": emb.dim,
                "output": common.output,
                "vocab": emb.len(),
            }))
        }
        Command::Tfidf { common, holdout } => {
            let mut m = RunManifest::new("tfidf", common.seed);
            m.input("input", &common.input)?;
            m.config("holdout", holdout.holdout)?;
            let stats = if common.input.extension().is_some_and(|e| e == "jsonl") {
                let rows: Vec<TokenRow> = select(read_jsonl(&common.input)?, &holdout, common.seed, false)?;
                TokenStatsTable::from_documents(&token_docs(&rows))
            } else {
                TokenStatsTable::from_json(&read_text(&common.input)?)?
            };
            let t = compute_tfidf(&stats)?;
            write_text(&common.output, &t.to_json()?)?;
            m.write_for(&common.output)?;
            Ok(json!({
                "command": "tfidf",
                "output": common.output,
                "terms": t.idf.len(),
                "total_docs": t.total_docs,
            }))
        }
        Command::TrainClf { common, holdout, vectors } => {
            let cfg: TrainConfig = load_config(common.config.as_deref())?;
            let mut m = RunManifest::new("train-clf", common.seed);
            m.input("input", &common.input)?;
            m.config("holdout", holdout.holdout)?;
            m.config("classifier", &cfg)?;
            let v = Vectors::load(&vectors, &mut m)?;
            let rows: Vec<TokenRow> = select(read_jsonl(&common.input)?, &holdout, common.seed, false)?;
            let model = train_softmax(&v.of(&rows), &labels(&rows)?, &cfg)?;
            write_text(&common.output, &model.to_json()?)?;
            m.write_for(&common.output)?;
            Ok(json!({
                "classes": model.k(),
                "command": "train-clf",
                "final_loss": model.final_loss,
                "iters": model.iters,
                "output": common.output,
            }))
        }
        Command::Eval {
            common,
            holdout,
            vectors,
            model,
            predictions,
        } => {
            let mut m = RunManifest::new("eval", common.seed);
            m.input("input", &common.input)?;
            m.input("model", &model)?;
            m.config("holdout", holdout.holdout)?;
            let v = Vectors::load(&vectors, &mut m)?;
            let clf = ClassifierModel::from_json(&read_text(&model)?)?;
            let rows: Vec<TokenRow> = select(read_jsonl(&common.input)?, &holdout, common.seed, true)?;
            let ids: Vec<String> = rows.iter().map(|r| r.id.clone()).collect();
            let (report, preds) = evaluate(&clf, &ids, &v.of(&rows), &labels(&rows)?)?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            write_text(&common.output, &text)?;
            m.write_for(&common.output)?;
            if let Some(p) = &predictions {
                write_predictions_csv(p, &preds)?;
                m.write_for(p)?;
            }
            Ok(json!({
                "accuracy": report.accuracy,
                "command": "eval",
                "n": report.n,
                "output": common.output,
            }))
        }
        Command::Classify { common, vectors, model } => {
            let mut m = RunManifest::new("classify", common.seed);
            m.input("input", &common.input)?;
            m.input("model", &model)?;
            let v = Vectors::load(&vectors, &mut m)?;
            let clf = ClassifierModel::from_json(&read_text(&model)?)?;
            let rows: Vec<TokenRow> = read_jsonl(&common.input)?;
            let mut out = Vec::with_capacity(rows.len());
            for (r, x) in rows.iter().zip(v.of(&rows)) {
                let p = clf.predict(&x)?;
                out.push(json!({
                    "id": r.id,
                    "max_prob": p.max_prob(),
                    "predicted": clf.classes[p.predicted],
                }));
            }
            write_jsonl(&common.output, &out)?;
            m.write_for(&common.output)?;
            Ok(json!({"command": "classify", "output": common.output, "records": out.len()}))
        }
        Command::LmTrain { common, holdout } => {
            let cfg: LmConfig = load_config(common.config.as_deref())?;
            let mut m = RunManifest::new("lm-train", common.seed);
            m.input("input", &common.input)?;
            m.config("holdout", holdout.holdout)?;
            m.config("lm", &cfg)?;
            let rows: Vec<TokenRow> = select(read_jsonl(&common.input)?, &holdout, common.seed, false)?;
            let lm = train_ngram(&token_docs(&rows), cfg)?;
            write_text(&common.output, &lm.to_json()?)?;
            m.write_for(&common.output)?;
            Ok(json!({
                "command": "lm-train",
                "output": common.output,
                "tau_ppl": lm.tau_ppl,
                "vocab_size": lm.vocab_size(),
            }))
        }
        Command::LmScore { common, lm } => {
            let mut m = RunManifest::new("lm-score", common.seed);
            m.input("input", &common.input)?;
            m.input("lm", &lm)?;
            let model = NgramLM::from_json(&read_text(&lm)?)?;
            let rows: Vec<TokenRow> = read_jsonl(&common.input)?;
            let mut out = Vec::with_capacity(rows.len());
            let mut ppls = Vec::new();
            for r in &rows {
                // empty rows have no defined perplexity
                let p = model.perplexity(&r.tokens).ok();
                ppls.extend(p);
                out.push(json!({"id": r.id, "perplexity": p}));
            }
            write_jsonl(&common.output, &out)?;
            m.write_for(&common.output)?;
            let mean = if ppls.is_empty() {
                None
            } else {
                Some(ppls.iter().sum::<f64>() / ppls.len() as f64)
            };
            Ok(json!({
                "command": "lm-score",
                "mean_perplexity": mean,
                "output": common.output,
                "records": out.len(),
            }))
        }
        Command::Flag {
            common,
            vectors,
            mode,
            artifacts,
            model,
            lm,
            tau_conf,
            tau_ppl,
        } => {
            let mode: Mode = mode.parse()?;
            if !(0.0..=1.0).contains(&tau_conf) {
                return Err(Error::Config(format!("--tau-conf {tau_conf} is outside [0, 1]")));
            }
            let mut m = RunManifest::new("flag", common.seed);
            m.input("input", &common.input)?;
            m.input("model", &model)?;
            m.input("lm", &lm)?;
            m.config("mode", mode)?;
            let a = load_artifacts(mode, artifacts.as_deref(), &mut m)?;
            let v = Vectors::load(&vectors, &mut m)?;
            let clf = ClassifierModel::from_json(&read_text(&model)?)?;
            let lm = NgramLM::from_json(&read_text(&lm)?)?;
            let tau_ppl = tau_ppl.unwrap_or(lm.tau_ppl);
            m.config("tau_conf", tau_conf)?;
            m.config("tau_ppl", tau_ppl)?;
            let ctx = FlagContext {
                artifacts: &a,
                mode,
                embedding: &v.embedding,
                weighting: v.weighting(),
                classifier: &clf,
                lm: &lm,
                tau_conf,
                tau_ppl,
            };
            let records = load_corpus(&common.input, Format::from_path(&common.input))?;
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            let mut out = Vec::with_capacity(records.len());
            for r in &records {
                let f = flag_address(r, &ctx)?;
                let status = match f.status {
                    FlagStatus::Ok => "ok",
                    FlagStatus::LowConfidence => "low_confidence",
                    FlagStatus::HighPerplexity => "high_perplexity",
                };
                *counts.entry(status).or_default() += 1;
                out.push(json!({
                    "id": r.id,
                    "max_prob": f.max_prob,
                    "perplexity": f.perplexity,
                    "status": status,
                }));
            }
            write_jsonl(&common.output, &out)?;
            m.write_for(&common.output)?;
            Ok(json!({"command": "flag", "output": common.output, "status_counts": counts}))
        }
        Command::RecoveryReport {
            common,
            truth,
            artifacts,
        } => {
            let mut m = RunManifest::new("recovery-report", common.seed);
            m.input("input", &common.input)?;
            m.input("truth", &truth)?;
            m.input("artifacts", &artifacts)?;
            let a = PreprocessArtifacts::from_json(&read_text(&artifacts)?)?;
            let records = load_corpus(&common.input, Format::from_path(&common.input))?;
            let truths: Vec<Truth> = read_jsonl(&truth)?;
            if truths.len() != records.len() {
                return Err(Error::Input(format!(
                    "{} records but {} truth lines",
                    records.len(),
                    truths.len()
                )));
            }
            let synth = records
                .into_iter()
                .zip(truths)
                .map(|(r, t)| SynthRecord::from_truth(r, t))
                .collect::<Result<Vec<_>>>()?;
            let report = recovery_report(&synth, &a).to_json();
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            write_text(&common.output, &text)?;
            m.write_for(&common.output)?;
            Ok(json!({
                "categories": report["categories"],
                "command": "recovery-report",
                "correctable_misspellings": report["correctable_misspellings"],
                "output": common.output,
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
