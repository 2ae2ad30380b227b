//! Offline builders for the four substitution tables.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::corpus::TokenStatsTable;
use crate::textmetrics::{levenshtein, metaphone, PhoneticKey};

use super::PreprocessConfig;

pub type SplitTable = BTreeMap<String, (String, String)>;
pub type BigramTable = BTreeMap<String, (String, String)>;
pub type LeaderTable = BTreeMap<String, String>;

/// `(left, right) -> compound`, nested so lookups borrow.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeTable(BTreeMap<String, BTreeMap<String, String>>);

impl MergeTable {
    pub fn get(&self, left: &str, right: &str) -> Option<&str> {
        self.0.get(left)?.get(right).map(String::as_str)
    }

    pub fn contains(&self, left: &str, right: &str) -> bool {
        self.get(left, right).is_some()
    }

    pub fn insert(&mut self, left: String, right: String, compound: String) {
        self.0.entry(left).or_default().insert(right, compound);
    }

    pub fn remove(&mut self, left: &str, right: &str) {
        if let Some(inner) = self.0.get_mut(left) {
            inner.remove(right);
            if inner.is_empty() {
                self.0.remove(left);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.0.iter().flat_map(|(l, inner)| {
            inner
                .iter()
                .map(move |(r, c)| (l.as_str(), r.as_str(), c.as_str()))
        })
    }
}

fn digits(token: &str) -> impl Iterator<Item = u8> + '_ {
    token.bytes().filter(u8::is_ascii_digit)
}

/// Tokens whose digit content differs are never treated as spelling variants
/// of one another; Metaphone ignores digits entirely.
pub(crate) fn same_digits(a: &str, b: &str) -> bool {
    digits(a).eq(digits(b))
}

/// The three-clause spell-variant predicate: `variant` is rarer than
/// `leader`, within `edit_threshold` edits (exclusive), and sounds the same.
pub fn is_spell_variant(
    variant: &str,
    leader: &str,
    stats: &TokenStatsTable,
    edit_threshold: usize,
) -> bool {
    stats.term_count(variant) < stats.term_count(leader)
        && levenshtein(variant, leader) < edit_threshold
        && metaphone(variant) == metaphone(leader)
}

/// Best two-way cut for every splittable token.
///
/// A cut `w -> (a, b)` is admissible when
/// `count(a) * count(b) / total_tokens > count(w)`, i.e. the pair is more
/// likely under independent unigrams than the compound. The admissible cut
/// with the largest `count(a) * count(b)` wins; ties go to the earliest cut.
/// Tokens counted `split_dominance` times or more are never split.
pub fn build_split_table(stats: &TokenStatsTable, config: &PreprocessConfig) -> SplitTable {
    let total = stats.total_tokens() as u128;
    let mut table = SplitTable::new();
    for (w, cw) in stats.terms() {
        if cw >= config.split_dominance || w.len() < 2 {
            continue;
        }
        let mut best: Option<(u128, usize)> = None;
        for cut in 1..w.len() {
            let (a, b) = w.split_at(cut);
            let score = stats.term_count(a) as u128 * stats.term_count(b) as u128;
            if score > cw as u128 * total && best.is_none_or(|(s, _)| score > s) {
                best = Some((score, cut));
            }
        }
        if let Some((_, cut)) = best {
            let (a, b) = w.split_at(cut);
            table.insert(w.to_string(), (a.to_string(), b.to_string()));
        }
    }
    table
}

/// Adjacent pairs whose compound is more likely than the pair:
/// `count(ab) > count(a) * count(b) / total_tokens`. Pairs produced by the
/// split table are excluded so the two tables never undo each other.
pub fn build_merge_table(stats: &TokenStatsTable, config: &PreprocessConfig, split: &SplitTable) -> MergeTable {
    let total = stats.total_tokens() as u128;
    let split_images: HashSet<(&str, &str)> = split
        .values()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    let mut table = MergeTable::default();
    for (a, b, spaced) in stats.bigrams() {
        if split_images.contains(&(a, b)) {
            continue;
        }
        let compound = format!("{a}{b}");
        let c_ab = stats.term_count(&compound) as u128;
        if c_ab == 0 || (config.merge_majority && c_ab <= spaced as u128) {
            continue;
        }
        if c_ab * total > stats.term_count(a) as u128 * stats.term_count(b) as u128 {
            table.insert(a.to_string(), b.to_string(), compound);
        }
    }
    table
}

/// Candidates in clustering order: descending count, then lexicographic.
fn by_count_desc<'a>(stats: &'a TokenStatsTable, keep: impl Fn(&str) -> bool) -> Vec<(&'a str, u64)> {
    let mut tokens: Vec<(&str, u64)> = stats.terms().filter(|(t, _)| keep(t)).collect();
    tokens.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    tokens
}

/// Single-pass leader clustering of long tokens.
///
/// Tokens are visited from most to least frequent. Each joins the first
/// existing leader for which it satisfies [`is_spell_variant`] (and has the
/// same digits); otherwise it founds a new cluster. Only clusters with at
/// least one variant are recorded, each with a self-mapping leader entry.
pub fn build_spell_leaders(
    stats: &TokenStatsTable,
    config: &PreprocessConfig,
    split: &SplitTable,
) -> LeaderTable {
    let candidates = by_count_desc(stats, |t| t.len() >= config.min_token_len && !split.contains_key(t));

    // leaders grouped by phonetic key, in creation order
    let mut buckets: HashMap<PhoneticKey, Vec<(&str, u64)>> = HashMap::new();
    let mut table = LeaderTable::new();
    for (token, count) in candidates {
        let bucket = buckets.entry(metaphone(token)).or_default();
        let leader = bucket.iter().find(|&&(leader, leader_count)| {
            count < leader_count
                && same_digits(token, leader)
                && levenshtein(token, leader) < config.edit_threshold
        });
        match leader {
            Some(&(leader, _)) => {
                table.insert(token.to_string(), leader.to_string());
                table.insert(leader.to_string(), leader.to_string());
            }
            None => bucket.push((token, count)),
        }
    }
    table
}

/// Leader clustering of run-together tokens against frequent bigrams.
///
/// Leader bigrams (count at least `min_bigram_count`, not merge keys) are
/// treated as single whitespace-free tokens and ordered by descending count.
/// A long token that is neither split nor a spelling variant is assigned to
/// the first leader bigram that is more frequent than it, within
/// `edit_threshold` edits of its concatenation, with the same Metaphone key.
pub fn build_bigram_variants(
    stats: &TokenStatsTable,
    config: &PreprocessConfig,
    split: &SplitTable,
    merge: &MergeTable,
    leaders: &LeaderTable,
) -> BigramTable {
    let is_variant = |t: &str| leaders.get(t).is_some_and(|l| l != t);

    let mut pairs: Vec<(&str, &str, u64)> = stats
        .bigrams()
        .filter(|&(a, b, n)| {
            n >= config.min_bigram_count
                && !merge.contains(a, b)
                && !split.contains_key(a)
                && !split.contains_key(b)
                && !is_variant(a)
                && !is_variant(b)
        })
        .collect();
    pairs.sort_unstable_by(|x, y| y.2.cmp(&x.2).then_with(|| (x.0, x.1).cmp(&(y.0, y.1))));

    let mut buckets: HashMap<PhoneticKey, Vec<(String, &str, &str, u64)>> = HashMap::new();
    for (a, b, n) in pairs {
        let joined = format!("{a}{b}");
        buckets
            .entry(metaphone(&joined))
            .or_default()
            .push((joined, a, b, n));
    }

    let mut table = BigramTable::new();
    for (token, count) in by_count_desc(stats, |t| {
        t.len() >= config.min_token_len && !split.contains_key(t) && !is_variant(t)
    }) {
        let Some(bucket) = buckets.get(&metaphone(token)) else {
            continue;
        };
        let hit = bucket.iter().find(|(joined, _, _, n)| {
            count < *n
                && joined != token
                && same_digits(token, joined)
                && levenshtein(token, joined) < config.edit_threshold
        });
        if let Some((_, a, b, _)) = hit {
            table.insert(token.to_string(), (a.to_string(), b.to_string()));
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats_from(counts: &[(&str, u64)]) -> TokenStatsTable {
        // one document per occurrence keeps doc_freq <= term_count
        let mut docs: Vec<Vec<String>> = Vec::new();
        for &(t, n) in counts {
            for _ in 0..n {
                docs.push(vec![t.to_string()]);
            }
        }
        TokenStatsTable::from_documents(&docs)
    }

    /// Pads the corpus with a filler token up to `total` tokens.
    fn stats_with_total(counts: &[(&str, u64)], total: u64) -> TokenStatsTable {
        let used: u64 = counts.iter().map(|c| c.1).sum();
        let mut all = counts.to_vec();
        all.push(("filler", total - used));
        stats_from(&all)
    }

    #[test]
    fn split_hsrlayout() {
        let stats = stats_with_total(&[("hsr", 50), ("layout", 80), ("hsrlayout", 3)], 1000);
        let table = build_split_table(&stats, &PreprocessConfig::default());
        assert_eq!(table.get("hsrlayout"), Some(&("hsr".into(), "layout".into())));
    }

    #[test]
    fn split_needs_strict_gain() {
        // 50 * 80 / 1000 = 4, equal to the compound count: not admitted
        let stats = stats_with_total(&[("hsr", 50), ("layout", 80), ("hsrlayout", 4)], 1000);
        let table = build_split_table(&stats, &PreprocessConfig::default());
        assert!(!table.contains_key("hsrlayout"));
    }

    #[test]
    fn no_split_without_support() {
        let stats = stats_with_total(&[("apartment", 40), ("apart", 2), ("ment", 1)], 1000);
        let table = build_split_table(&stats, &PreprocessConfig::default());
        assert!(!table.contains_key("apartment"));
    }

    #[test]
    fn dominant_tokens_never_split() {
        let stats = stats_with_total(&[("hsr", 500), ("layout", 400), ("hsrlayout", 100)], 2000);
        let table = build_split_table(&stats, &PreprocessConfig::default());
        assert!(!table.contains_key("hsrlayout"));
    }

    #[test]
    fn merge_lay_out() {
        let mut docs: Vec<Vec<String>> = vec![vec!["lay".into(), "out".into()]];
        docs.push(vec!["lay".into()]);
        for _ in 0..4 {
            docs.push(vec!["out".into()]);
        }
        for _ in 0..400 {
            docs.push(vec!["layout".into()]);
        }
        let used = 2 + 5 + 400;
        for _ in 0..(1000 - used) {
            docs.push(vec!["filler".into()]);
        }
        let stats = TokenStatsTable::from_documents(&docs);
        assert_eq!(stats.total_tokens(), 1000);
        let split = build_split_table(&stats, &PreprocessConfig::default());
        let merge = build_merge_table(&stats, &PreprocessConfig::default(), &split);
        assert_eq!(merge.get("lay", "out"), Some("layout"));
        assert_eq!(merge.get("out", "lay"), None);
    }

    #[test]
    fn leaders_follow_frequency() {
        let stats = stats_from(&[("apartments", 5000), ("appartments", 40), ("apartmants", 3)]);
        let leaders = build_spell_leaders(&stats, &PreprocessConfig::default(), &SplitTable::new());
        assert_eq!(leaders["appartments"], "apartments");
        assert_eq!(leaders["apartmants"], "apartments");
        assert_eq!(leaders["apartments"], "apartments");
    }

    #[test]
    fn phonetic_and_edit_conditions_both_required() {
        let stats = stats_from(&[
            ("bommasandra", 300),
            ("dommasandra", 200),
            ("mathikere", 150),
            ("mathkur", 100),
        ]);
        let leaders = build_spell_leaders(&stats, &PreprocessConfig::default(), &SplitTable::new());
        assert!(leaders.get("dommasandra").is_none_or(|l| l == "dommasandra"));
        assert!(leaders.get("mathkur").is_none_or(|l| l == "mathkur"));
    }

    #[test]
    fn short_tokens_not_spell_candidates() {
        let stats = stats_from(&[("nagara", 100), ("nagar", 5)]);
        let leaders = build_spell_leaders(&stats, &PreprocessConfig::default(), &SplitTable::new());
        assert!(leaders.is_empty());
    }

    #[test]
    fn equal_counts_found_separate_clusters() {
        let stats = stats_from(&[("koramangala", 10), ("koramangela", 10)]);
        let leaders = build_spell_leaders(&stats, &PreprocessConfig::default(), &SplitTable::new());
        assert!(leaders.is_empty());
    }

    #[test]
    fn digits_must_agree() {
        let stats = stats_from(&[("sector12", 100), ("sector13", 3)]);
        let leaders = build_spell_leaders(&stats, &PreprocessConfig::default(), &SplitTable::new());
        assert!(leaders.is_empty());
    }

    #[test]
    fn bigram_separation_examples() {
        let mut docs: Vec<Vec<String>> = Vec::new();
        for _ in 0..60 {
            docs.push(vec!["bangalore".into(), "karnataka".into()]);
            docs.push(vec!["sector".into(), "noida".into()]);
        }
        docs.push(vec!["bangalorkarnataka".into()]);
        docs.push(vec!["bangalorekarnatak".into()]);
        docs.push(vec!["sectarnoida".into()]);
        docs.push(vec!["unrelatedtoken".into()]);
        let stats = TokenStatsTable::from_documents(&docs);
        let config = PreprocessConfig::default();
        let split = build_split_table(&stats, &config);
        let merge = build_merge_table(&stats, &PreprocessConfig::default(), &split);
        let leaders = build_spell_leaders(&stats, &config, &split);
        let table = build_bigram_variants(&stats, &config, &split, &merge, &leaders);
        let pair = |a: &str, b: &str| (a.to_string(), b.to_string());
        assert_eq!(table.get("bangalorkarnataka"), Some(&pair("bangalore", "karnataka")));
        assert_eq!(table.get("bangalorekarnatak"), Some(&pair("bangalore", "karnataka")));
        assert_eq!(table.get("sectarnoida"), Some(&pair("sector", "noida")));
        assert!(!table.contains_key("unrelatedtoken"));
    }
}
