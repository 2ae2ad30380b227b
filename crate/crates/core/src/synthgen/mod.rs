//! Labelled synthetic address corpora with injected typing errors.
//!
//! Every record draws from its own ChaCha stream (`rng::stream(seed,
//! "synth", index)`), so output is identical whether records are generated
//! sequentially or in parallel.
//!
//! Error categories follow the four observed kinds of address noise:
//! a missing space between two correct tokens, a spurious space inside a
//! token, a misspelt token, and a misspelt pair with the space missing.
//! At most one category applies per token: a single uniform draw is compared
//! against the cumulative category rates, so each category fires with exactly
//! its configured marginal probability.

mod gazetteer;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{AddressRecord, TokenStatsTable};
use crate::preprocess::{basic_clean, PreprocessArtifacts};
use crate::rng::{self, Draw, Rng};
use crate::textmetrics::levenshtein;
use crate::{Error, Result};

pub use gazetteer::{builtin_gazetteer, Gazetteer, SubRegion};
use gazetteer::{BUILDINGS, BUILDING_KINDS, HOUSE_PREFIXES, LANDMARK_LEADS, STREET_KINDS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    SpaceDeletion,
    SpaceInsertion,
    Misspelling,
    CompoundMisspelling,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::SpaceDeletion,
        Category::SpaceInsertion,
        Category::Misspelling,
        Category::CompoundMisspelling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::SpaceDeletion => "space_deletion",
            Category::SpaceInsertion => "space_insertion",
            Category::Misspelling => "misspelling",
            Category::CompoundMisspelling => "compound_misspelling",
        }
    }

    /// Number of clean tokens the corruption consumes.
    fn span(self) -> usize {
        match self {
            Category::SpaceDeletion | Category::CompoundMisspelling => 2,
            Category::SpaceInsertion | Category::Misspelling => 1,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErrorRates {
    pub space_deletion: f64,
    pub space_insertion: f64,
    pub misspelling: f64,
    pub compound_misspelling: f64,
}

impl Default for ErrorRates {
    fn default() -> Self {
        ErrorRates {
            space_deletion: 0.05,
            space_insertion: 0.04,
            misspelling: 0.08,
            compound_misspelling: 0.03,
        }
    }
}

impl ErrorRates {
    pub fn none() -> Self {
        ErrorRates {
            space_deletion: 0.0,
            space_insertion: 0.0,
            misspelling: 0.0,
            compound_misspelling: 0.0,
        }
    }

    pub fn rate(&self, c: Category) -> f64 {
        match c {
            Category::SpaceDeletion => self.space_deletion,
            Category::SpaceInsertion => self.space_insertion,
            Category::Misspelling => self.misspelling,
            Category::CompoundMisspelling => self.compound_misspelling,
        }
    }

    pub fn total(&self) -> f64 {
        Category::ALL.iter().map(|&c| self.rate(c)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_subregions: usize,
    pub n_addresses: usize,
    /// `None` uses [`builtin_gazetteer`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gazetteer: Option<Gazetteer>,
    pub error_rates: ErrorRates,
    pub seed: u64,
    /// Probability that the address names a locality at all.
    pub locality_rate: f64,
    /// Probability that a named locality/landmark is borrowed from a
    /// neighbouring sub-region (boundary confusion).
    pub neighbour_rate: f64,
    /// Probability that the pincode is omitted; a wrong one is drawn with the
    /// same probability.
    pub pincode_noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_subregions: 12,
            n_addresses: 5000,
            gazetteer: None,
            error_rates: ErrorRates::default(),
            seed: 0,
            locality_rate: 0.85,
            neighbour_rate: 0.15,
            pincode_noise: 0.15,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        for c in Category::ALL {
            let r = self.error_rates.rate(c);
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Config(format!("{c} rate {r} is outside [0, 1]")));
            }
        }
        if self.error_rates.total() > 1.0 + 1e-12 {
            return Err(Error::Config(format!(
                "error rates sum to {}, at most one category applies per token so the sum must be <= 1",
                self.error_rates.total()
            )));
        }
        for (name, p) in [
            ("locality_rate", self.locality_rate),
            ("neighbour_rate", self.neighbour_rate),
            ("pincode_noise", self.pincode_noise),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} {p} is outside [0, 1]")));
            }
        }
        if self.n_subregions < 2 {
            return Err(Error::Config("n_subregions must be at least 2".into()));
        }
        if self.n_addresses < self.n_subregions {
            return Err(Error::Config("n_addresses must be at least n_subregions".into()));
        }
        let available = self.gazetteer.as_ref().map_or(builtin_gazetteer().len(), Gazetteer::len);
        if self.n_subregions > available {
            return Err(Error::Config(format!(
                "gazetteer has {available} sub-regions, {} requested",
                self.n_subregions
            )));
        }
        if let Some(g) = &self.gazetteer {
            for (name, s) in &g.subregions {
                if s.localities.is_empty() && s.landmarks.is_empty() {
                    return Err(Error::Config(format!("sub-region {name} has no places")));
                }
            }
        }
        Ok(())
    }

    fn resolved_gazetteer(&self) -> Gazetteer {
        self.gazetteer
            .clone()
            .unwrap_or_else(builtin_gazetteer)
            .truncated(self.n_subregions)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corruption {
    pub category: Category,
    pub corrupted: String,
    /// Affected clean tokens, space separated.
    pub original: String,
    /// Index of the first affected token in `clean_tokens`.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthRecord {
    pub record: AddressRecord,
    pub clean_tokens: Vec<String>,
    pub corruptions: Vec<Corruption>,
    /// Sub-region tokens drawn from, before corruption.
    pub places: Vec<String>,
}

/// One line of the ground-truth sidecar written next to a synthetic corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truth {
    pub clean: String,
    pub corruptions: Vec<Corruption>,
    pub id: String,
}

impl SynthRecord {
    pub fn truth(&self) -> Truth {
        Truth {
            clean: self.clean_tokens.join(" "),
            corruptions: self.corruptions.clone(),
            id: self.record.id.clone(),
        }
    }

    /// Re-attach a sidecar line to its corpus record. The corruption log must
    /// replay to the record's text.
    pub fn from_truth(record: AddressRecord, truth: Truth) -> Result<Self> {
        if truth.id != record.id {
            return Err(Error::Input(format!(
                "truth line for {:?} paired with record {:?}",
                truth.id, record.id
            )));
        }
        let clean_tokens: Vec<String> = truth.clean.split_whitespace().map(String::from).collect();
        if apply_corruptions(&clean_tokens, &truth.corruptions) != record.raw_text {
            return Err(Error::Input(format!(
                "corruption log for {:?} does not reproduce its address",
                record.id
            )));
        }
        Ok(SynthRecord {
            record,
            clean_tokens,
            corruptions: truth.corruptions,
            places: Vec::new(),
        })
    }
}

/// Rebuild the corrupted text from clean tokens and the corruption log.
pub fn apply_corruptions(clean_tokens: &[String], corruptions: &[Corruption]) -> String {
    let mut by_pos: BTreeMap<usize, &Corruption> = BTreeMap::new();
    for c in corruptions {
        by_pos.insert(c.position, c);
    }
    let mut out: Vec<&str> = Vec::with_capacity(clean_tokens.len());
    let mut i = 0;
    while i < clean_tokens.len() {
        match by_pos.get(&i) {
            Some(c) => {
                out.push(&c.corrupted);
                i += c.original.split(' ').count();
            }
            None => {
                out.push(&clean_tokens[i]);
                i += 1;
            }
        }
    }
    out.join(" ")
}

const VOWELS: &[u8] = b"aeiou";

fn keyboard_neighbours(c: u8) -> &'static [u8] {
    match c {
        b'q' => b"wa",
        b'w' => b"qes",
        b'e' => b"wrd",
        b'r' => b"etf",
        b't' => b"ryg",
        b'y' => b"tuh",
        b'u' => b"yij",
        b'i' => b"uok",
        b'o' => b"ipl",
        b'p' => b"ol",
        b'a' => b"qsz",
        b's' => b"adwx",
        b'd' => b"sfe",
        b'f' => b"dgr",
        b'g' => b"fht",
        b'h' => b"gjy",
        b'j' => b"hku",
        b'k' => b"jli",
        b'l' => b"ko",
        b'z' => b"xa",
        b'x' => b"zcs",
        b'c' => b"xvd",
        b'v' => b"cbf",
        b'b' => b"vng",
        b'n' => b"bmh",
        b'm' => b"nj",
        _ => b"e",
    }
}

/// One edit, biased towards the spelling confusions people actually make:
/// vowel substitution, doubled or undoubled consonants, dropped vowels, and
/// occasionally a slip onto a neighbouring key. The first letter is kept.
pub fn misspell(token: &str, rng: &mut Rng) -> String {
    let s = token.as_bytes();
    if s.len() < 3 {
        return format!("{token}{}", *rng.pick(&[b'a', b'e']) as char);
    }
    let interior: Vec<usize> = (1..s.len()).collect();
    let vowel_at: Vec<usize> = interior.iter().copied().filter(|&i| VOWELS.contains(&s[i])).collect();
    let consonant_at: Vec<usize> = interior
        .iter()
        .copied()
        .filter(|&i| s[i].is_ascii_alphabetic() && !VOWELS.contains(&s[i]))
        .collect();

    let mut out = s.to_vec();
    let roll = rng.unit();
    if roll < 0.4 && !vowel_at.is_empty() {
        let i = *rng.pick(&vowel_at);
        let choices: Vec<u8> = VOWELS.iter().copied().filter(|&v| v != s[i]).collect();
        out[i] = *rng.pick(&choices);
    } else if roll < 0.65 && !consonant_at.is_empty() {
        let i = *rng.pick(&consonant_at);
        if i + 1 < s.len() && s[i + 1] == s[i] {
            out.remove(i);
        } else {
            out.insert(i, s[i]);
        }
    } else if roll < 0.9 && !vowel_at.is_empty() {
        let i = *rng.pick(&vowel_at);
        out.remove(i);
    } else {
        let i = *rng.pick(&interior);
        out[i] = *rng.pick(keyboard_neighbours(s[i]));
    }
    let result = String::from_utf8(out).expect("ascii");
    if result == token {
        // vowel swap onto itself is impossible, but a keyboard slip on a
        // non-letter can be; fall back to an insertion
        format!("{token}e")
    } else {
        result
    }
}

fn is_word(t: &str) -> bool {
    t.len() >= 3 && t.bytes().all(|b| b.is_ascii_lowercase())
}

fn compose(
    region: &SubRegion,
    neighbours: &[&SubRegion],
    g: &Gazetteer,
    cfg: &SynthConfig,
    rng: &mut Rng,
) -> (Vec<String>, Vec<String>) {
    let words = |s: &str| s.split(' ').map(String::from).collect::<Vec<_>>();
    let mut tokens: Vec<String> = Vec::new();
    let mut places: Vec<String> = Vec::new();

    let prefix = rng.pick(HOUSE_PREFIXES);
    tokens.extend(prefix.iter().map(|s| s.to_string()));
    tokens.push((1 + rng.below(400)).to_string());

    if rng.chance(0.35) {
        tokens.push(rng.pick(BUILDINGS).to_string());
        tokens.push(rng.pick(BUILDING_KINDS).to_string());
    }
    if rng.chance(0.35) {
        tokens.push((1 + rng.below(12)).to_string());
        tokens.extend(rng.pick(STREET_KINDS).iter().map(|s| s.to_string()));
    }

    let source = |rng: &mut Rng| -> &SubRegion {
        if !neighbours.is_empty() && rng.chance(cfg.neighbour_rate) {
            neighbours[rng.index(neighbours.len())]
        } else {
            region
        }
    };
    let with_landmark = region.localities.is_empty() || rng.chance(0.5);
    let with_locality = !region.localities.is_empty() && (rng.chance(cfg.locality_rate) || !with_landmark);
    if with_landmark {
        let from = source(rng);
        if !from.landmarks.is_empty() {
            tokens.push(rng.pick(LANDMARK_LEADS).to_string());
            let lm = words(rng.pick(&from.landmarks));
            if std::ptr::eq(from, region) {
                places.extend(lm.iter().cloned());
            }
            tokens.extend(lm);
        }
    }
    if with_locality {
        let from = source(rng);
        if !from.localities.is_empty() {
            let loc = rng.pick(&from.localities).clone();
            if std::ptr::eq(from, region) {
                places.push(loc.clone());
            }
            tokens.push(loc);
        }
    }
    tokens.push(g.city.clone());
    if rng.chance(0.5) {
        tokens.push(g.state.clone());
    }
    let pin_roll = rng.unit();
    if pin_roll >= cfg.pincode_noise {
        if !region.pincodes.is_empty() {
            tokens.push(rng.pick(&region.pincodes).clone());
        }
    } else if pin_roll >= cfg.pincode_noise / 2.0 {
        let all: Vec<&String> = g.subregions.values().flat_map(|s| &s.pincodes).collect();
        if !all.is_empty() {
            tokens.push(all[rng.index(all.len())].clone());
        }
    }
    (tokens, places)
}

fn corrupt(clean: &[String], rates: &ErrorRates, rng: &mut Rng) -> (Vec<String>, Vec<Corruption>) {
    // the trailing pincode is never corrupted
    let body_len = match clean.last() {
        Some(t) if crate::corpus::is_pincode(t) => clean.len() - 1,
        _ => clean.len(),
    };
    let mut out = Vec::with_capacity(clean.len());
    let mut log = Vec::new();
    let mut i = 0;
    while i < clean.len() {
        if i >= body_len {
            out.push(clean[i].clone());
            i += 1;
            continue;
        }
        let u = rng.unit();
        let mut acc = 0.0;
        let mut category = None;
        for c in Category::ALL {
            acc += rates.rate(c);
            if u < acc {
                category = Some(c);
                break;
            }
        }
        let t = &clean[i];
        let next = clean.get(i + 1).filter(|_| i + 1 < body_len);
        let corrupted = match category {
            Some(Category::Misspelling) if is_word(t) => Some(misspell(t, rng)),
            Some(Category::SpaceInsertion) if is_word(t) && t.len() >= 4 => {
                let cut = 2 + rng.index(t.len() - 3);
                Some(format!("{} {}", &t[..cut], &t[cut..]))
            }
            Some(Category::SpaceDeletion) => next.map(|n| format!("{t}{n}")),
            Some(Category::CompoundMisspelling) => next
                .filter(|n| is_word(t) && is_word(n))
                .map(|n| misspell(&format!("{t}{n}"), rng)),
            _ => None,
        };
        match (category, corrupted) {
            (Some(c), Some(text)) => {
                let span = c.span();
                log.push(Corruption {
                    category: c,
                    corrupted: text.clone(),
                    original: clean[i..i + span].join(" "),
                    position: i,
                });
                out.push(text);
                i += span;
            }
            _ => {
                out.push(t.clone());
                i += 1;
            }
        }
    }
    (out, log)
}

/// Generate a labelled corpus. Deterministic for a fixed config.
pub fn generate_corpus(config: &SynthConfig) -> Result<Vec<SynthRecord>> {
    config.validate()?;
    let g = config.resolved_gazetteer();
    let regions: Vec<(&String, &SubRegion)> = g.subregions.iter().collect();
    let k = regions.len();
    // mildly skewed class sizes
    let weights: Vec<f64> = (0..k).map(|i| 1.0 / (1.0 + 0.08 * i as f64)).collect();
    let total_w: f64 = weights.iter().sum();

    let records = (0..config.n_addresses)
        .into_par_iter()
        .map(|index| {
            let mut rng = rng::stream(config.seed, "synth", index as u64);
            let r = if index < k {
                index
            } else {
                let mut u = rng.unit() * total_w;
                let mut pick = k - 1;
                for (j, w) in weights.iter().enumerate() {
                    if u < *w {
                        pick = j;
                        break;
                    }
                    u -= w;
                }
                pick
            };
            let (label, region) = regions[r];
            let neighbours: Vec<&SubRegion> = [r.checked_sub(1), (r + 1 < k).then_some(r + 1)]
                .into_iter()
                .flatten()
                .map(|j| regions[j].1)
                .collect();
            let (clean_tokens, places) = compose(region, &neighbours, &g, config, &mut rng);
            let (noisy, corruptions) = corrupt(&clean_tokens, &config.error_rates, &mut rng);
            let mut record = AddressRecord::new(format!("a{index:06}"), noisy.join(" ")).with_label(label.clone());
            record.zone = Some("zone-1".into());
            SynthRecord {
                record,
                clean_tokens,
                corruptions,
                places,
            }
        })
        .collect();
    Ok(records)
}

/// Random keyboard-mash strings for junk-address tests.
pub fn monkey_typed(n: usize, seed: u64) -> Vec<String> {
    const ROWS: [&[u8]; 3] = [b"qwertyuiop", b"asdfghjkl", b"zxcvbnm"];
    (0..n)
        .map(|i| {
            let mut rng = rng::stream(seed, "monkey", i as u64);
            let words = 1 + rng.index(3);
            let mut parts = Vec::with_capacity(words);
            for _ in 0..words {
                let row = rng.pick(&ROWS);
                let len = 5 + rng.index(10);
                let w: String = (0..len)
                    .map(|_| {
                        let r = if rng.chance(0.75) { row } else { rng.pick(&ROWS) };
                        *rng.pick(r) as char
                    })
                    .collect();
                parts.push(w);
            }
            parts.join(" ")
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    pub injected: usize,
    pub recovered: usize,
}

impl Recovery {
    /// `None` when nothing was injected.
    pub fn rate(&self) -> Option<f64> {
        (self.injected > 0).then(|| self.recovered as f64 / self.injected as f64)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub categories: BTreeMap<Category, Recovery>,
    /// Misspellings of long (> 6 chars) tokens at most two edits from a truth
    /// token that is at least ten times more frequent in the corpus.
    pub correctable_misspellings: Recovery,
}

impl RecoveryReport {
    pub fn rate(&self, c: Category) -> Option<f64> {
        self.categories.get(&c).and_then(Recovery::rate)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut cats = serde_json::Map::new();
        for (c, r) in &self.categories {
            let mut o = serde_json::json!({"injected": r.injected, "recovered": r.recovered});
            if let Some(rate) = r.rate() {
                o["rate"] = rate.into();
            }
            cats.insert(c.name().to_string(), o);
        }
        let m = &self.correctable_misspellings;
        let mut correctable = serde_json::json!({"injected": m.injected, "recovered": m.recovered});
        if let Some(rate) = m.rate() {
            correctable["rate"] = rate.into();
        }
        serde_json::json!({"categories": cats, "correctable_misspellings": correctable})
    }
}

/// Per-category share of corruptions the full pipeline undoes.
///
/// Each corrupted span is run through the table stages on its own and counts
/// as recovered when the output equals the original clean tokens. Categories
/// with no injected instances are absent from the report.
pub fn recovery_report(synth: &[SynthRecord], artifacts: &PreprocessArtifacts) -> RecoveryReport {
    let docs: Vec<Vec<String>> = synth
        .iter()
        .map(|s| basic_clean(&s.record.raw_text).tokens)
        .collect();
    let stats = TokenStatsTable::from_documents(&docs);

    let mut report = RecoveryReport::default();
    for c in synth.iter().flat_map(|s| &s.corruptions) {
        let truth: Vec<String> = c.original.split(' ').map(String::from).collect();
        let noisy = basic_clean(&c.corrupted).tokens;
        let ok = artifacts.apply(&noisy) == truth;
        let entry = report.categories.entry(c.category).or_default();
        entry.injected += 1;
        entry.recovered += usize::from(ok);

        if c.category == Category::Misspelling
            && c.original.len() > 6
            && levenshtein(&c.original, &c.corrupted) <= 2
            && stats.term_count(&c.original) >= 10 * stats.term_count(&c.corrupted)
        {
            report.correctable_misspellings.injected += 1;
            report.correctable_misspellings.recovered += usize::from(ok);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(rates: ErrorRates, seed: u64) -> SynthConfig {
        SynthConfig {
            n_addresses: 300,
            error_rates: rates,
            seed,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn zero_rates_leave_text_clean() {
        let corpus = generate_corpus(&small(ErrorRates::none(), 3)).unwrap();
        for s in &corpus {
            assert_eq!(s.record.raw_text, s.clean_tokens.join(" "));
            assert!(s.corruptions.is_empty());
        }
    }

    #[test]
    fn corruption_log_replays() {
        let corpus = generate_corpus(&small(ErrorRates::default(), 5)).unwrap();
        assert!(corpus.iter().any(|s| !s.corruptions.is_empty()));
        for s in &corpus {
            assert_eq!(apply_corruptions(&s.clean_tokens, &s.corruptions), s.record.raw_text);
            let back = SynthRecord::from_truth(s.record.clone(), s.truth()).unwrap();
            assert_eq!(back.corruptions, s.corruptions);
        }
    }

    #[test]
    fn deterministic_and_labelled() {
        let a = generate_corpus(&small(ErrorRates::default(), 9)).unwrap();
        let b = generate_corpus(&small(ErrorRates::default(), 9)).unwrap();
        assert_eq!(a, b);
        let c = generate_corpus(&small(ErrorRates::default(), 10)).unwrap();
        assert_ne!(a, c);
        let g = builtin_gazetteer();
        for s in &a {
            let region = &g.subregions[s.record.label.as_ref().unwrap()];
            for p in &s.places {
                let in_region = region.localities.contains(p)
                    || region.landmarks.iter().any(|l| l.split(' ').any(|w| w == p));
                assert!(in_region, "{p} not in {:?}", s.record.label);
            }
        }
        // every class present
        let labels: std::collections::BTreeSet<_> = a.iter().map(|s| s.record.label.clone()).collect();
        assert_eq!(labels.len(), 12);
    }

    #[test]
    fn invalid_rates_rejected() {
        let mut cfg = small(ErrorRates::none(), 1);
        cfg.error_rates.misspelling = 1.5;
        assert!(generate_corpus(&cfg).unwrap_err().is_config());
        cfg.error_rates.misspelling = -0.1;
        assert!(generate_corpus(&cfg).unwrap_err().is_config());
        cfg.error_rates = ErrorRates {
            space_deletion: 0.6,
            space_insertion: 0.6,
            ..ErrorRates::none()
        };
        assert!(generate_corpus(&cfg).unwrap_err().is_config());
        let mut cfg = small(ErrorRates::none(), 1);
        cfg.n_subregions = 1;
        assert!(generate_corpus(&cfg).unwrap_err().is_config());
    }

    #[test]
    fn misspell_is_one_edit() {
        let mut rng = rng::stream(1, "t", 0);
        for w in ["apartments", "chandrapura", "layout", "noida", "ab"] {
            for _ in 0..50 {
                let m = misspell(w, &mut rng);
                assert_ne!(m, w);
                assert_eq!(levenshtein(&m, w), 1, "{w} -> {m}");
            }
        }
    }

    #[test]
    fn empty_categories_are_absent() {
        let corpus = generate_corpus(&small(ErrorRates::none(), 2)).unwrap();
        let report = recovery_report(&corpus, &PreprocessArtifacts::default());
        assert!(report.categories.is_empty());
        assert_eq!(report.rate(Category::Misspelling), None);
        assert!(report.to_json()["categories"].as_object().unwrap().is_empty());
    }

    #[test]
    fn monkey_strings_are_letters() {
        let m = monkey_typed(20, 4);
        assert_eq!(m, monkey_typed(20, 4));
        assert!(m.iter().all(|s| s.bytes().all(|b| b.is_ascii_lowercase() || b == b' ')));
    }
}
