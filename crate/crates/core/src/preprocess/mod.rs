//! Address cleaning: basic normalization plus four corpus-driven repairs.
//!
//! Full-mode stage order is fixed: basic cleaning, probabilistic splitting,
//! spell correction, bigram separation, probabilistic merging. The pincode is
//! pulled out during basic cleaning and re-appended after the last stage.
//!
//! [`PreprocessArtifacts::build`] also prunes table entries whose outputs
//! would be rewritten again by some stage, so that the full pipeline's output
//! is always a fixed point of the pipeline.

mod clean;
mod tables;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::corpus::TokenStatsTable;
use crate::{Error, Result};

pub use clean::{basic_clean, CleanAddress};
pub use tables::{
    build_bigram_variants, build_merge_table, build_spell_leaders, build_split_table,
    is_spell_variant, BigramTable, LeaderTable, MergeTable, SplitTable,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    /// Spell/bigram variants must be strictly closer than this.
    pub edit_threshold: usize,
    /// Minimum length of a spell-correction or bigram-separation candidate.
    pub min_token_len: usize,
    /// Tokens seen this many times or more are never split.
    pub split_dominance: u64,
    /// Minimum count for a bigram to act as a bigram leader.
    pub min_bigram_count: u64,
    /// Re-split split outputs until nothing splits further.
    pub recursive_split: bool,
    /// Only merge a pair when the joined form is also more common than the
    /// spaced form. Without it, any pair whose compound was ever seen (for
    /// instance as a space-deletion typo) merges into that typo.
    pub merge_majority: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            edit_threshold: 3,
            min_token_len: 7,
            split_dominance: 100,
            min_bigram_count: 2,
            recursive_split: false,
            merge_majority: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Basic,
    #[default]
    Full,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Basic => "basic",
            Mode::Full => "full",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Mode::Basic),
            "full" => Ok(Mode::Full),
            other => Err(Error::Config(format!("unknown mode {other:?} (expected basic|full)"))),
        }
    }
}

const MAX_SPLIT_DEPTH: usize = 8;

/// The four lookup tables plus the configuration that built them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PreprocessArtifacts {
    pub version: u32,
    pub config: PreprocessConfig,
    pub split: SplitTable,
    pub merge: MergeTable,
    pub bigram: BigramTable,
    pub leaders: LeaderTable,
}

impl PreprocessArtifacts {
    /// Build every table from corpus statistics, then prune unstable entries.
    pub fn build(stats: &TokenStatsTable, config: PreprocessConfig) -> Self {
        let split = build_split_table(stats, &config);
        let merge = build_merge_table(stats, &config, &split);
        let leaders = build_spell_leaders(stats, &config, &split);
        let bigram = build_bigram_variants(stats, &config, &split, &merge, &leaders);
        let mut artifacts = PreprocessArtifacts {
            version: crate::ARTIFACT_VERSION,
            config,
            split,
            merge,
            bigram,
            leaders,
        };
        artifacts.prune_unstable();
        artifacts
    }

    fn spell(&self, token: &str) -> Option<&str> {
        self.leaders.get(token).map(String::as_str)
    }

    /// A token no stage would rewrite on its own.
    fn is_stable(&self, token: &str) -> bool {
        !self.split.contains_key(token)
            && self.spell(token).is_none_or(|l| l == token)
            && !self.bigram.contains_key(token)
            && !(token.len() >= 6 && token.bytes().all(|b| b.is_ascii_digit()))
    }

    fn prune_unstable(&mut self) {
        loop {
            let mut doomed_split = Vec::new();
            if !self.config.recursive_split {
                for (w, (a, b)) in &self.split {
                    let bad = |t: &str| {
                        self.split.contains_key(t)
                            || (t.len() >= 6 && t.bytes().all(|c| c.is_ascii_digit()))
                    };
                    if bad(a) || bad(b) {
                        doomed_split.push(w.clone());
                    }
                }
            }
            let doomed_bigram: Vec<String> = self
                .bigram
                .iter()
                .filter(|(_, (x, y))| !self.is_stable(x) || !self.is_stable(y))
                .map(|(t, _)| t.clone())
                .collect();
            let doomed_merge: Vec<(String, String)> = self
                .merge
                .iter()
                .filter(|(_, _, ab)| !self.is_stable(ab))
                .map(|(a, b, _)| (a.to_string(), b.to_string()))
                .collect();
            if doomed_split.is_empty() && doomed_bigram.is_empty() && doomed_merge.is_empty() {
                break;
            }
            for w in doomed_split {
                self.split.remove(&w);
            }
            for t in doomed_bigram {
                self.bigram.remove(&t);
            }
            for (a, b) in doomed_merge {
                self.merge.remove(&a, &b);
            }
        }
    }

    fn push_split(&self, token: &str, out: &mut Vec<String>, depth: usize) {
        match self.split.get(token) {
            Some((a, b)) if depth < MAX_SPLIT_DEPTH => {
                if self.config.recursive_split {
                    self.push_split(a, out, depth + 1);
                    self.push_split(b, out, depth + 1);
                } else {
                    out.push(a.clone());
                    out.push(b.clone());
                }
            }
            _ => out.push(token.to_string()),
        }
    }

    /// Apply the four table stages to an already basic-cleaned token body.
    pub fn apply(&self, body: &[String]) -> Vec<String> {
        let mut split = Vec::with_capacity(body.len() + 2);
        for t in body {
            self.push_split(t, &mut split, 0);
        }

        let spelled = split
            .into_iter()
            .map(|t| match self.spell(&t) {
                Some(leader) => leader.to_string(),
                None => t,
            });

        let mut separated = Vec::new();
        for t in spelled {
            match self.bigram.get(&t) {
                Some((x, y)) => {
                    separated.push(x.clone());
                    separated.push(y.clone());
                }
                None => separated.push(t),
            }
        }

        merge_to_fixpoint(&self.merge, separated)
    }

    pub fn to_json(&self) -> Result<String> {
        let merge: BTreeMap<String, &str> = self
            .merge
            .iter()
            .map(|(a, b, ab)| (format!("{a} {b}"), ab))
            .collect();
        // serde_json's Value map is ordered, which sorts every key
        let doc = json!({
            "version": self.version,
            "config": serde_json::to_value(&self.config)?,
            "split": self.split,
            "merge": merge,
            "bigram": self.bigram,
            "leaders": self.leaders,
        });
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            version: u32,
            config: PreprocessConfig,
            split: SplitTable,
            merge: BTreeMap<String, String>,
            bigram: BigramTable,
            leaders: LeaderTable,
        }
        let doc: Doc = serde_json::from_value(serde_json::from_str::<Value>(text)?)?;
        let mut merge = MergeTable::default();
        for (k, ab) in doc.merge {
            let (a, b) = k
                .split_once(' ')
                .ok_or_else(|| Error::Input(format!("merge key {k:?} is not \"a b\"")))?;
            merge.insert(a.to_string(), b.to_string(), ab);
        }
        Ok(PreprocessArtifacts {
            version: doc.version,
            config: doc.config,
            split: doc.split,
            merge,
            bigram: doc.bigram,
            leaders: doc.leaders,
        })
    }
}

/// Merge adjacent pairs until no pair in the sequence is a merge key.
fn merge_to_fixpoint(merge: &MergeTable, mut tokens: Vec<String>) -> Vec<String> {
    if merge.is_empty() {
        return tokens;
    }
    loop {
        let mut out: Vec<String> = Vec::with_capacity(tokens.len());
        let mut changed = false;
        for t in tokens {
            if let Some(prev) = out.last() {
                if let Some(compound) = merge.get(prev, &t) {
                    let compound = compound.to_string();
                    *out.last_mut().expect("non-empty") = compound;
                    changed = true;
                    continue;
                }
            }
            out.push(t);
        }
        tokens = out;
        if !changed {
            return tokens;
        }
    }
}

/// Clean one raw address. `Basic` mode ignores `artifacts`.
pub fn preprocess_address(raw: &str, artifacts: &PreprocessArtifacts, mode: Mode) -> CleanAddress {
    let clean = basic_clean(raw);
    match mode {
        Mode::Basic => clean,
        Mode::Full => {
            let body = artifacts.apply(clean.body());
            CleanAddress::from_body(body, clean.pincode)
        }
    }
}
