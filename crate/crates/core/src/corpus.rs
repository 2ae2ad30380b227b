//! Address records, corpus loading, holdout splits and token statistics.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::preprocess::basic_clean;
use crate::rng::{self, Draw};
use crate::{Error, Result};

/// One raw address as it arrives from a storefront.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddressRecord {
    pub id: String,
    #[serde(rename = "address")]
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pincode: Option<String>,
    /// Sub-region identifier; the classification target.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone: Option<String>,
}

impl AddressRecord {
    pub fn new(id: impl Into<String>, raw_text: impl Into<String>) -> Self {
        AddressRecord {
            id: id.into(),
            raw_text: raw_text.into(),
            pincode: None,
            label: None,
            zone: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

pub fn is_pincode(s: &str) -> bool {
    s.len() == 6 && s.bytes().all(|b| b.is_ascii_digit())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl Format {
    /// Guess from a file extension; anything other than `.csv` is JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Jsonl,
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawRow {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    address: Option<String>,
    #[serde(default)]
    pincode: Option<String>,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    zone: Option<String>,
}

fn non_empty(v: Option<String>) -> Option<String> {
    v.filter(|s| !s.trim().is_empty())
}

impl RawRow {
    fn into_record(self, line: usize, ordinal: usize) -> Result<AddressRecord> {
        let raw_text = match self.address {
            Some(a) if !a.trim().is_empty() => a,
            Some(_) => {
                return Err(Error::Parse {
                    line,
                    reason: "address is empty".into(),
                })
            }
            None => {
                return Err(Error::Parse {
                    line,
                    reason: "missing required key \"address\"".into(),
                })
            }
        };
        let pincode = non_empty(self.pincode).map(|p| p.trim().to_string());
        if let Some(p) = &pincode {
            if !is_pincode(p) {
                return Err(Error::Parse {
                    line,
                    reason: format!("pincode {p:?} is not six decimal digits"),
                });
            }
        }
        Ok(AddressRecord {
            id: non_empty(self.id).unwrap_or_else(|| ordinal.to_string()),
            raw_text,
            pincode,
            label: non_empty(self.label),
            zone: non_empty(self.zone),
        })
    }
}

/// Load a corpus. Records keep file order; rows without an id get their
/// 0-based row ordinal.
pub fn load_corpus(path: impl AsRef<Path>, format: Format) -> Result<Vec<AddressRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        Format::Jsonl => read_jsonl(BufReader::new(file), path),
        Format::Csv => read_csv(file),
    }
}

fn read_jsonl(reader: impl BufRead, path: &Path) -> Result<Vec<AddressRecord>> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: RawRow = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        let ordinal = records.len();
        records.push(row.into_record(line_no, ordinal)?);
    }
    Ok(records)
}

fn read_csv(reader: impl std::io::Read) -> Result<Vec<AddressRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let mut records = Vec::new();
    for row in rdr.deserialize::<RawRow>() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::Parse {
                line,
                reason: e.to_string(),
            }
        })?;
        // header is line 1
        let line = records.len() + 2;
        let ordinal = records.len();
        records.push(row.into_record(line, ordinal)?);
    }
    Ok(records)
}

/// Write records as JSONL in the same schema `load_corpus` reads.
pub fn write_jsonl(path: impl AsRef<Path>, records: &[AddressRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut out = std::io::BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Number of holdout items for `n` items: `fraction * n` rounded half-up.
pub fn holdout_size(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64) + 0.5).floor() as usize
}

/// Uniform random train/test partition. Both halves keep input order.
pub fn split_holdout<T: Clone>(items: &[T], fraction: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!(
            "holdout fraction must lie in (0, 1), got {fraction}"
        )));
    }
    if items.is_empty() {
        return Err(Error::Input("cannot split an empty corpus".into()));
    }
    let n_test = holdout_size(items.len(), fraction);
    let mut order: Vec<usize> = (0..items.len()).collect();
    rng::stream(seed, "holdout", 0).shuffle(&mut order);
    let mut in_test = vec![false; items.len()];
    for &i in &order[..n_test] {
        in_test[i] = true;
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (item, test_side) in items.iter().zip(in_test) {
        if test_side {
            test.push(item.clone());
        } else {
            train.push(item.clone());
        }
    }
    Ok((train, test))
}

/// Corpus-wide token counts.
///
/// Counts are additive: the table for a union of disjoint corpora is the
/// element-wise sum of the per-corpus tables, which is what makes sharded
/// counting with [`TokenStatsTable::merge`] order independent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStatsTable {
    term_count: HashMap<String, u64>,
    doc_freq: HashMap<String, u64>,
    bigram_count: HashMap<(String, String), u64>,
    total_docs: u64,
    total_tokens: u64,
}

impl TokenStatsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_document<S: AsRef<str>>(&mut self, tokens: &[S]) {
        self.total_docs += 1;
        let mut seen: Vec<&str> = Vec::with_capacity(tokens.len());
        for t in tokens {
            let t = t.as_ref();
            *self.term_count.entry(t.to_string()).or_insert(0) += 1;
            self.total_tokens += 1;
            if !seen.contains(&t) {
                seen.push(t);
                *self.doc_freq.entry(t.to_string()).or_insert(0) += 1;
            }
        }
        for pair in tokens.windows(2) {
            let key = (pair[0].as_ref().to_string(), pair[1].as_ref().to_string());
            *self.bigram_count.entry(key).or_insert(0) += 1;
        }
    }

    pub fn merge(&mut self, other: TokenStatsTable) {
        self.total_docs += other.total_docs;
        self.total_tokens += other.total_tokens;
        for (k, v) in other.term_count {
            *self.term_count.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.doc_freq {
            *self.doc_freq.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.bigram_count {
            *self.bigram_count.entry(k).or_insert(0) += v;
        }
    }

    /// Count a list of tokenized documents, sharded across the rayon pool.
    pub fn from_documents<D, S>(docs: &[D]) -> Self
    where
        D: AsRef<[S]> + Sync,
        S: AsRef<str> + Sync,
    {
        docs.par_chunks(512)
            .map(|chunk| {
                let mut t = TokenStatsTable::new();
                for d in chunk {
                    t.add_document(d.as_ref());
                }
                t
            })
            .reduce(TokenStatsTable::new, |mut a, b| {
                a.merge(b);
                a
            })
    }

    pub fn term_count(&self, token: &str) -> u64 {
        self.term_count.get(token).copied().unwrap_or(0)
    }

    pub fn doc_freq(&self, token: &str) -> u64 {
        self.doc_freq.get(token).copied().unwrap_or(0)
    }

    pub fn bigram_count(&self, a: &str, b: &str) -> u64 {
        // tuple-of-String keys cannot be borrowed as (&str, &str)
        self.bigram_count
            .get(&(a.to_string(), b.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn total_docs(&self) -> u64 {
        self.total_docs
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn vocab_size(&self) -> usize {
        self.term_count.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, u64)> {
        self.term_count.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn doc_freqs(&self) -> impl Iterator<Item = (&str, u64)> {
        self.doc_freq.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn bigrams(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.bigram_count
            .iter()
            .map(|((a, b), &v)| (a.as_str(), b.as_str(), v))
    }

    /// Check the table's structural invariants; returns the first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let sum: u64 = self.term_count.values().sum();
        if sum != self.total_tokens {
            return Err(format!(
                "term counts sum to {sum}, total_tokens is {}",
                self.total_tokens
            ));
        }
        for (t, &tc) in &self.term_count {
            let df = self.doc_freq(t);
            if df < 1 || df > self.total_docs || df > tc {
                return Err(format!("token {t:?}: doc_freq {df}, term_count {tc}"));
            }
        }
        if self.doc_freq.len() != self.term_count.len() {
            return Err("doc_freq and term_count cover different tokens".into());
        }
        for (a, b) in self.bigram_count.keys() {
            if !self.term_count.contains_key(a) || !self.term_count.contains_key(b) {
                return Err(format!("bigram ({a}, {b}) has an uncounted token"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = StatsFile {
            version: crate::ARTIFACT_VERSION,
            total_docs: self.total_docs,
            total_tokens: self.total_tokens,
            term_count: self.term_count.iter().map(|(k, &v)| (k.clone(), v)).collect(),
            doc_freq: self.doc_freq.iter().map(|(k, &v)| (k.clone(), v)).collect(),
            bigram_count: self
                .bigram_count
                .iter()
                .map(|((a, b), &v)| (format!("{a} {b}"), v))
                .collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StatsFile = serde_json::from_str(text)?;
        let mut bigram_count = HashMap::with_capacity(file.bigram_count.len());
        for (k, v) in file.bigram_count {
            let (a, b) = k
                .split_once(' ')
                .ok_or_else(|| Error::Input(format!("bigram key {k:?} is not \"a b\"")))?;
            bigram_count.insert((a.to_string(), b.to_string()), v);
        }
        let table = TokenStatsTable {
            term_count: file.term_count.into_iter().collect(),
            doc_freq: file.doc_freq.into_iter().collect(),
            bigram_count,
            total_docs: file.total_docs,
            total_tokens: file.total_tokens,
        };
        table.validate().map_err(Error::Input)?;
        Ok(table)
    }
}

// Fields in alphabetical order so the serialized document has sorted keys.
#[derive(Serialize, Deserialize)]
struct StatsFile {
    bigram_count: BTreeMap<String, u64>,
    doc_freq: BTreeMap<String, u64>,
    term_count: BTreeMap<String, u64>,
    total_docs: u64,
    total_tokens: u64,
    version: u32,
}

/// Token statistics over basic-cleaned records.
pub fn build_token_stats(records: &[AddressRecord]) -> Result<TokenStatsTable> {
    if records.is_empty() {
        return Err(Error::Input("cannot build token statistics from an empty corpus".into()));
    }
    let docs: Vec<Vec<String>> = records
        .par_iter()
        .map(|r| basic_clean(&r.raw_text).tokens)
        .collect();
    Ok(TokenStatsTable::from_documents(&docs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn docs(lines: &[&str]) -> Vec<Vec<String>> {
        lines
            .iter()
            .map(|l| l.split_whitespace().map(String::from).collect())
            .collect()
    }

    #[test]
    fn two_address_hand_count() {
        let t = TokenStatsTable::from_documents(&docs(&["hsr layout", "hsr sector"]));
        assert_eq!(t.term_count("hsr"), 2);
        assert_eq!(t.doc_freq("hsr"), 2);
        assert_eq!(t.bigram_count("hsr", "layout"), 1);
        assert_eq!(t.bigram_count("layout", "hsr"), 0);
        assert_eq!(t.total_docs(), 2);
        assert_eq!(t.total_tokens(), 4);
    }

    #[test]
    fn repeated_token_counts_doc_once() {
        let t = TokenStatsTable::from_documents(&docs(&["a a b"]));
        assert_eq!(t.term_count("a"), 2);
        assert_eq!(t.doc_freq("a"), 1);
        assert_eq!(t.bigram_count("a", "a"), 1);
    }

    #[test]
    fn empty_document_contributes_nothing_but_a_doc() {
        let mut t = TokenStatsTable::new();
        t.add_document::<&str>(&[]);
        assert_eq!(t.total_tokens(), 0);
        assert_eq!(t.vocab_size(), 0);
        assert_eq!(t.total_docs(), 1);
    }

    #[test]
    fn jsonl_example_and_ids() {
        let input = "{\"address\":\"Sector 23, House number XXX, Faridabad, Haryana 121004\"}\n\n{\"id\":\"x9\",\"address\":\"hsr layout\",\"pincode\":\"560102\",\"label\":\"s1\"}\n";
        let recs = read_jsonl(Cursor::new(input), Path::new("mem")).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].raw_text, "Sector 23, House number XXX, Faridabad, Haryana 121004");
        assert_eq!(recs[0].id, "0");
        assert_eq!(recs[1].id, "x9");
        assert_eq!(recs[1].pincode.as_deref(), Some("560102"));
        assert_eq!(recs[1].label.as_deref(), Some("s1"));
    }

    #[test]
    fn jsonl_error_names_line() {
        let mut input = String::new();
        for i in 0..6 {
            input.push_str(&format!("{{\"address\":\"road {i}\"}}\n"));
        }
        input.push_str("{\"address\":\"unterminated}\n");
        match read_jsonl(Cursor::new(input), Path::new("mem")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn jsonl_rejects_bad_pincode_and_missing_address() {
        let bad_pin = "{\"address\":\"a\",\"pincode\":\"12345\"}\n";
        assert!(matches!(
            read_jsonl(Cursor::new(bad_pin), Path::new("m")),
            Err(Error::Parse { line: 1, .. })
        ));
        let missing = "{\"label\":\"a\"}\n";
        assert!(matches!(
            read_jsonl(Cursor::new(missing), Path::new("m")),
            Err(Error::Parse { line: 1, .. })
        ));
        let blank = "{\"address\":\"   \"}\n";
        assert!(read_jsonl(Cursor::new(blank), Path::new("m")).is_err());
    }

    #[test]
    fn empty_input_is_empty_corpus() {
        assert!(read_jsonl(Cursor::new(""), Path::new("m")).unwrap().is_empty());
        assert!(read_csv(Cursor::new("id,address\n")).unwrap().is_empty());
    }

    #[test]
    fn csv_rows() {
        let input = "id,address,pincode,label,zone\n,\"12, hsr layout\",560102,s1,z1\nb,koramangala,,s2,\n";
        let recs = read_csv(Cursor::new(input)).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].id, "0");
        assert_eq!(recs[0].raw_text, "12, hsr layout");
        assert_eq!(recs[0].zone.as_deref(), Some("z1"));
        assert_eq!(recs[1].pincode, None);
        assert_eq!(recs[1].zone, None);
    }

    #[test]
    fn holdout_sizes() {
        let items: Vec<u32> = (0..100).collect();
        let (train, test) = split_holdout(&items, 0.2, 7).unwrap();
        assert_eq!((train.len(), test.len()), (80, 20));
        assert!(train.iter().all(|x| !test.contains(x)));
        let five: Vec<u32> = (0..5).collect();
        let (train, test) = split_holdout(&five, 0.2, 7).unwrap();
        assert_eq!((train.len(), test.len()), (4, 1));
        assert_eq!(holdout_size(5, 0.5), 3);
        assert_eq!(holdout_size(3, 0.5), 2);
    }

    #[test]
    fn holdout_rejects_bad_fraction() {
        let items = [1, 2, 3];
        for f in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(split_holdout(&items, f, 1).unwrap_err().is_config());
        }
    }

    #[test]
    fn stats_json_round_trip() {
        let t = TokenStatsTable::from_documents(&docs(&["hsr layout 560102", "hsr sector 2"]));
        let text = t.to_json().unwrap();
        assert_eq!(TokenStatsTable::from_json(&text).unwrap(), t);
        assert_eq!(t.to_json().unwrap(), text);
    }
}
