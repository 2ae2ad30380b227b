use std::collections::BTreeMap;

use addrnorm_core::corpus::TokenStatsTable;
use addrnorm_core::preprocess::{build_split_table, preprocess_address, Mode, PreprocessArtifacts, PreprocessConfig};
use addrnorm_core::rng::{self, Draw};
use proptest::prelude::*;

/// Small-alphabet corpus so that compounds of frequent tokens actually occur.
fn random_docs(seed: u64, n_docs: usize) -> Vec<Vec<String>> {
    let stems = ["ab", "ba", "abc", "cab", "bca", "aab", "abab", "cc", "bcab", "abcab"];
    let mut r = rng::stream(seed, "preprocess-test", 0);
    (0..n_docs)
        .map(|_| {
            let len = 1 + r.index(6);
            (0..len)
                .map(|_| {
                    let a = *r.pick(&stems);
                    if r.chance(0.15) {
                        format!("{a}{}", r.pick(&stems))
                    } else {
                        a.to_string()
                    }
                })
                .collect()
        })
        .collect()
}

/// Literal reading of the split rule: try every cut, keep admissible ones,
/// take the largest product with the earliest cut on ties.
fn split_oracle(stats: &TokenStatsTable, dominance: u64) -> BTreeMap<String, (String, String)> {
    let total = stats.total_tokens() as f64;
    let mut out = BTreeMap::new();
    for (w, cw) in stats.terms() {
        if cw >= dominance {
            continue;
        }
        let chars: Vec<char> = w.chars().collect();
        let mut best: Option<(f64, String, String)> = None;
        for cut in 1..chars.len() {
            let a: String = chars[..cut].iter().collect();
            let b: String = chars[cut..].iter().collect();
            let p = stats.term_count(&a) as f64 * stats.term_count(&b) as f64;
            if p / total > cw as f64 && best.as_ref().is_none_or(|(bp, _, _)| p > *bp) {
                best = Some((p, a, b));
            }
        }
        if let Some((_, a, b)) = best {
            out.insert(w.to_string(), (a, b));
        }
    }
    out
}

#[test]
fn split_table_matches_oracle() {
    for seed in 0..20 {
        let docs = random_docs(seed, 150);
        let stats = TokenStatsTable::from_documents(&docs);
        assert!(stats.total_tokens() <= 1000);
        for dominance in [3, 100] {
            let cfg = PreprocessConfig { split_dominance: dominance, ..PreprocessConfig::default() };
            let got: BTreeMap<_, _> = build_split_table(&stats, &cfg).into_iter().collect();
            assert_eq!(got, split_oracle(&stats, dominance), "seed {seed}, dominance {dominance}");
        }
    }
}

#[test]
fn leaders_map_to_themselves() {
    for seed in 0..10 {
        let docs: Vec<Vec<String>> = random_docs(seed, 400)
            .into_iter()
            .map(|d| d.into_iter().map(|t| format!("{t}{t}")).collect())
            .collect();
        let stats = TokenStatsTable::from_documents(&docs);
        let cfg = PreprocessConfig { min_token_len: 4, ..PreprocessConfig::default() };
        let a = PreprocessArtifacts::build(&stats, cfg);
        for (v, l) in &a.leaders {
            assert_eq!(a.leaders.get(l), Some(l), "{v} -> {l}, but {l} is not a leader");
        }
    }
}

fn corpus_text() -> impl Strategy<Value = Vec<String>> {
    let word = prop::sample::select(vec![
        "lay", "out", "layout", "sector", "noida", "sectornoida", "sectarnoida", "apartments", "appartments",
        "meenakshi", "classic", "meenakshiclassic", "road", "12", "560101",
    ]);
    prop::collection::vec(prop::collection::vec(word, 1..8).prop_map(|w| w.join(" ")), 1..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_pipeline_is_idempotent(corpus in corpus_text(), probe in corpus_text()) {
        let docs: Vec<Vec<String>> = corpus.iter().map(|t| preprocess_address(t, &PreprocessArtifacts::default(), Mode::Basic).tokens).collect();
        let a = PreprocessArtifacts::build(&TokenStatsTable::from_documents(&docs), PreprocessConfig {
            split_dominance: 5,
            ..PreprocessConfig::default()
        });
        for x in corpus.iter().chain(&probe) {
            let once = preprocess_address(x, &a, Mode::Full);
            prop_assert_eq!(preprocess_address(&once.text(), &a, Mode::Full), once);
        }
    }

    #[test]
    fn stats_are_additive(left in corpus_text(), right in corpus_text()) {
        let docs = |c: &[String]| -> Vec<Vec<String>> { c.iter().map(|t| t.split(' ').map(String::from).collect()).collect() };
        let mut merged = TokenStatsTable::from_documents(&docs(&left));
        merged.merge(TokenStatsTable::from_documents(&docs(&right)));
        let both: Vec<String> = left.iter().chain(&right).cloned().collect();
        prop_assert_eq!(merged, TokenStatsTable::from_documents(&docs(&both)));
    }
}
