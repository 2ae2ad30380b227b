//! Additive-k smoothed n-gram model for spotting junk addresses.
//!
//! Sentences are wrapped as `<s>^(n-1) w_1 … w_N </s>`; training tokens
//! seen fewer than `unk_min_count` times become `<unk>`, as does any unknown
//! token at scoring time. The predictable vocabulary `V` is the known tokens
//! plus `<unk>` and (when enabled) `</s>`, and
//!
//! `P(w | h) = (c(h, w) + k) / (c(h) + k |V|)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::classify::ClassifierModel;
use crate::corpus::AddressRecord;
use crate::embed::{address_vector, EmbeddingModel, Weighting};
use crate::preprocess::{preprocess_address, Mode, PreprocessArtifacts};
use crate::{Error, Result, ARTIFACT_VERSION};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LmConfig {
    pub order: usize,
    pub k: f64,
    /// Predict an end-of-sentence symbol after the last token.
    pub use_eos: bool,
    /// Training tokens with fewer occurrences are mapped to `<unk>`.
    pub unk_min_count: u64,
    /// Quantile of training perplexities used as the junk threshold.
    pub ppl_quantile: f64,
    /// Score each training address with its own counts removed when
    /// calibrating the threshold. In-sample perplexities are optimistic and
    /// put the threshold below most unseen in-domain addresses.
    pub leave_one_out: bool,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig {
            order: 2,
            k: 0.1,
            use_eos: true,
            unk_min_count: 2,
            ppl_quantile: 0.95,
            leave_one_out: true,
        }
    }
}

impl LmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::Config("order must be at least 1".into()));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::Config(format!("smoothing k {} must be positive", self.k)));
        }
        if !(0.0..=1.0).contains(&self.ppl_quantile) {
            return Err(Error::Config("ppl_quantile must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramLM {
    pub config: LmConfig,
    /// Known tokens (excluding the reserved symbols).
    pub vocab: BTreeSet<String>,
    /// History (space-joined, empty for unigrams) → next symbol → count.
    counts: HashMap<String, HashMap<String, u64>>,
    history_totals: HashMap<String, u64>,
    /// Perplexity threshold calibrated on the training corpus.
    pub tau_ppl: f64,
}

impl NgramLM {
    /// |V|: known tokens, `<unk>`, and `</s>` when enabled.
    pub fn vocab_size(&self) -> usize {
        self.vocab.len() + 1 + usize::from(self.config.use_eos)
    }

    /// Symbols that carry probability mass for any history.
    pub fn predictable(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.vocab.iter().map(String::as_str).collect();
        out.push(UNK);
        if self.config.use_eos {
            out.push(EOS);
        }
        out
    }

    /// Untrained model: every symbol has probability 1/|V|.
    pub fn uniform<I: IntoIterator<Item = S>, S: Into<String>>(tokens: I, config: LmConfig) -> Self {
        NgramLM {
            config,
            vocab: tokens.into_iter().map(Into::into).collect(),
            counts: HashMap::new(),
            history_totals: HashMap::new(),
            tau_ppl: f64::INFINITY,
        }
    }

    fn map_token<'a>(&self, t: &'a str) -> &'a str {
        if self.vocab.contains(t) {
            t
        } else {
            UNK
        }
    }

    /// Smoothed `P(w | history)`; `history` holds the previous `order - 1`
    /// symbols (already mapped).
    pub fn prob(&self, history: &[&str], w: &str) -> f64 {
        let h = history.join(" ");
        let c_hw = self.counts.get(&h).and_then(|m| m.get(w)).copied().unwrap_or(0);
        let c_h = self.history_totals.get(&h).copied().unwrap_or(0);
        let k = self.config.k;
        (c_hw as f64 + k) / (c_h as f64 + k * self.vocab_size() as f64)
    }

    fn events<'a>(&self, tokens: &'a [String], map: impl Fn(&'a str) -> &'a str) -> Vec<(Vec<&'a str>, &'a str)> {
        let n = self.config.order;
        let mut seq: Vec<&str> = vec![BOS; n - 1];
        seq.extend(tokens.iter().map(|t| map(t.as_str())));
        if self.config.use_eos {
            seq.push(EOS);
        }
        (n - 1..seq.len()).map(|i| (seq[i + 1 - n..i].to_vec(), seq[i])).collect()
    }

    /// Sum of `ln P` over the sentence and the number of predicted symbols.
    pub fn log_prob(&self, tokens: &[String]) -> (f64, usize) {
        let ev = self.events(tokens, |t| self.map_token(t));
        let lp = ev.iter().map(|(h, w)| self.prob(h, w).ln()).sum();
        (lp, ev.len())
    }

    /// Perplexity of a training address under the counts of every other
    /// address. The vocabulary is left as trained.
    fn held_out_perplexity(&self, tokens: &[String]) -> f64 {
        let ev = self.events(tokens, |t| self.map_token(t));
        let mut own: HashMap<(String, &str), u64> = HashMap::new();
        let mut own_h: HashMap<String, u64> = HashMap::new();
        for (h, w) in &ev {
            let h = h.join(" ");
            *own_h.entry(h.clone()).or_insert(0) += 1;
            *own.entry((h, w)).or_insert(0) += 1;
        }
        let k = self.config.k;
        let v = self.vocab_size() as f64;
        let mut lp = 0.0;
        for (h, w) in &ev {
            let h = h.join(" ");
            let c_hw = self.counts.get(&h).and_then(|m| m.get(*w)).copied().unwrap_or(0) - own[&(h.clone(), *w)];
            let c_h = self.history_totals.get(&h).copied().unwrap_or(0) - own_h[&h];
            lp += ((c_hw as f64 + k) / (c_h as f64 + k * v)).ln();
        }
        (-lp / ev.len() as f64).exp()
    }

    /// `P(w_1 … w_N)^(-1/N)`, computed in log space.
    pub fn perplexity(&self, tokens: &[String]) -> Result<f64> {
        if tokens.is_empty() {
            return Err(Error::Input("cannot score an empty address".into()));
        }
        let (lp, n) = self.log_prob(tokens);
        Ok((-lp / n as f64).exp())
    }

    pub fn to_json(&self) -> Result<String> {
        let counts: BTreeMap<&String, BTreeMap<&String, u64>> = self
            .counts
            .iter()
            .map(|(h, m)| (h, m.iter().map(|(w, c)| (w, *c)).collect()))
            .collect();
        let v = serde_json::json!({
            "config": self.config,
            "counts": counts,
            "tau_ppl": if self.tau_ppl.is_finite() { serde_json::json!(self.tau_ppl) } else { serde_json::Value::Null },
            "version": ARTIFACT_VERSION,
            "vocab": self.vocab,
        });
        Ok(serde_json::to_string(&v)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct File {
            config: LmConfig,
            counts: HashMap<String, HashMap<String, u64>>,
            tau_ppl: Option<f64>,
            vocab: BTreeSet<String>,
        }
        let f: File = serde_json::from_str(text)?;
        f.config.validate()?;
        let history_totals = f.counts.iter().map(|(h, m)| (h.clone(), m.values().sum())).collect();
        Ok(NgramLM {
            config: f.config,
            vocab: f.vocab,
            counts: f.counts,
            history_totals,
            tau_ppl: f.tau_ppl.unwrap_or(f64::INFINITY),
        })
    }
}

/// Linear-interpolated quantile of unsorted values.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Count n-grams over tokenized addresses and calibrate `tau_ppl`.
pub fn train_ngram<D: AsRef<[String]>>(corpus: &[D], config: LmConfig) -> Result<NgramLM> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::Input("empty training corpus".into()));
    }
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for d in corpus {
        for t in d.as_ref() {
            *freq.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let vocab: BTreeSet<String> = freq
        .iter()
        .filter(|&(_, &c)| c >= config.unk_min_count)
        .map(|(t, _)| t.to_string())
        .collect();
    let mut lm = NgramLM::uniform(vocab, config);
    for d in corpus {
        let d = d.as_ref();
        for (h, w) in lm.events(d, |t| if lm.vocab.contains(t) { t } else { UNK }) {
            let h = h.join(" ");
            *lm.history_totals.entry(h.clone()).or_insert(0) += 1;
            *lm.counts.entry(h).or_default().entry(w.to_string()).or_insert(0) += 1;
        }
    }
    let ppl: Vec<f64> = corpus
        .iter()
        .filter(|d| !d.as_ref().is_empty())
        .map(|d| {
            if lm.config.leave_one_out {
                Ok(lm.held_out_perplexity(d.as_ref()))
            } else {
                lm.perplexity(d.as_ref())
            }
        })
        .collect::<Result<_>>()?;
    if !ppl.is_empty() {
        lm.tau_ppl = quantile(&ppl, lm.config.ppl_quantile);
    }
    Ok(lm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagStatus {
    Ok,
    LowConfidence,
    HighPerplexity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AddressFlag {
    pub status: FlagStatus,
    pub max_prob: f64,
    pub perplexity: f64,
}

/// Threshold rule; high perplexity wins over low confidence.
pub fn flag_status(max_prob: f64, perplexity: f64, tau_conf: f64, tau_ppl: f64) -> FlagStatus {
    if perplexity > tau_ppl {
        FlagStatus::HighPerplexity
    } else if max_prob < tau_conf {
        FlagStatus::LowConfidence
    } else {
        FlagStatus::Ok
    }
}

/// Everything needed to score a raw address.
pub struct FlagContext<'a> {
    pub artifacts: &'a PreprocessArtifacts,
    pub mode: Mode,
    pub embedding: &'a EmbeddingModel,
    pub weighting: Weighting<'a>,
    pub classifier: &'a ClassifierModel,
    pub lm: &'a NgramLM,
    pub tau_conf: f64,
    pub tau_ppl: f64,
}

pub const DEFAULT_TAU_CONF: f64 = 0.2;

/// Preprocess, classify and score one record. Addresses that clean to
/// nothing are treated as maximally perplexing.
pub fn flag_address(record: &AddressRecord, ctx: &FlagContext<'_>) -> Result<AddressFlag> {
    let clean = preprocess_address(&record.raw_text, ctx.artifacts, ctx.mode);
    let v = address_vector(&clean.tokens, ctx.embedding, ctx.weighting);
    let max_prob = ctx.classifier.predict(&v.values)?.max_prob();
    let perplexity = if clean.is_empty() {
        f64::INFINITY
    } else {
        ctx.lm.perplexity(&clean.tokens)?
    };
    Ok(AddressFlag {
        status: flag_status(max_prob, perplexity, ctx.tau_conf, ctx.tau_ppl),
        max_prob,
        perplexity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn distributions_sum_to_one() {
        let corpus = vec![toks("a b c"), toks("a b"), toks("b c c"), toks("d")];
        let lm = train_ngram(&corpus, LmConfig::default()).unwrap();
        let mut histories: Vec<Vec<&str>> = vec![vec![BOS], vec!["a"], vec!["zzz"], vec![UNK]];
        histories.push(vec!["c"]);
        for h in histories {
            let s: f64 = lm.predictable().iter().map(|w| lm.prob(&h, w)).sum();
            assert!((s - 1.0).abs() < 1e-9, "{h:?}: {s}");
            assert!(lm.predictable().iter().all(|w| lm.prob(&h, w) > 0.0));
        }
        // "d" is a singleton
        assert!(!lm.vocab.contains("d"));
    }

    #[test]
    fn order_zero_is_config_error() {
        let cfg = LmConfig { order: 0, ..LmConfig::default() };
        assert!(train_ngram(&[toks("a")], cfg).unwrap_err().is_config());
    }

    #[test]
    fn empty_address_is_input_error() {
        let lm = NgramLM::uniform(["a"], LmConfig::default());
        assert!(matches!(lm.perplexity(&[]), Err(Error::Input(_))));
    }

    #[test]
    fn flag_precedence() {
        assert_eq!(flag_status(0.1, 50.0, 0.2, 10.0), FlagStatus::HighPerplexity);
        assert_eq!(flag_status(0.2 - 1e-9, 10.0, 0.2, 10.0), FlagStatus::LowConfidence);
        assert_eq!(flag_status(0.9, 5.0, 0.2, 10.0), FlagStatus::Ok);
    }

    #[test]
    fn json_round_trip() {
        let corpus = vec![toks("a b c"), toks("a b"), toks("b c c")];
        let lm = train_ngram(&corpus, LmConfig::default()).unwrap();
        let back = NgramLM::from_json(&lm.to_json().unwrap()).unwrap();
        assert_eq!(lm, back);
        assert_eq!(lm.to_json().unwrap(), back.to_json().unwrap());
    }

    #[test]
    fn unigram_is_order_invariant_bigram_is_not() {
        let corpus = vec![toks("a b c"), toks("a b c"), toks("c a b")];
        let uni = train_ngram(&corpus, LmConfig { order: 1, ..LmConfig::default() }).unwrap();
        let bi = train_ngram(&corpus, LmConfig::default()).unwrap();
        let (x, y) = (toks("a b c"), toks("c b a"));
        assert!((uni.perplexity(&x).unwrap() - uni.perplexity(&y).unwrap()).abs() < 1e-12);
        assert!(bi.perplexity(&x).unwrap() < bi.perplexity(&y).unwrap());
    }
}
