//! Python bindings: text metrics, preprocessing tables, the address language
//! model and the synthetic corpus generator.

use addrnorm_core::addrlm::{train_ngram, LmConfig, NgramLM};
use addrnorm_core::corpus::TokenStatsTable;
use addrnorm_core::preprocess::{basic_clean as core_basic_clean, preprocess_address, Mode, PreprocessArtifacts, PreprocessConfig};
use addrnorm_core::synthgen::{generate_corpus, monkey_typed as core_monkey_typed, SynthConfig};
use addrnorm_core::textmetrics;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: addrnorm_core::Error) -> PyErr {
    match e {
        addrnorm_core::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyfunction]
fn levenshtein(a: &str, b: &str) -> usize {
    textmetrics::levenshtein(a, b)
}

#[pyfunction]
fn metaphone(token: &str) -> String {
    textmetrics::metaphone(token).as_str().to_string()
}

/// Basic cleaning only; the pincode, if any, is the last token.
#[pyfunction]
fn basic_clean(raw: &str) -> Vec<String> {
    core_basic_clean(raw).tokens
}

/// Preprocessing tables.
#[pyclass(module = "addrnorm")]
struct Artifacts(PreprocessArtifacts);

#[pymethods]
impl Artifacts {
    /// Build tables from raw addresses. `config` is a JSON object overriding
    /// preprocessing defaults.
    #[staticmethod]
    #[pyo3(signature = (addresses, config=None))]
    fn build(addresses: Vec<String>, config: Option<&str>) -> PyResult<Self> {
        let config: PreprocessConfig = match config {
            Some(c) => serde_json::from_str(c).map_err(|e| PyValueError::new_err(e.to_string()))?,
            None => PreprocessConfig::default(),
        };
        let docs: Vec<Vec<String>> = addresses.iter().map(|a| core_basic_clean(a).tokens).collect();
        Ok(Artifacts(PreprocessArtifacts::build(&TokenStatsTable::from_documents(&docs), config)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        PreprocessArtifacts::from_json(text).map(Artifacts).map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(to_py)
    }

    #[pyo3(signature = (raw, mode="full"))]
    fn preprocess(&self, raw: &str, mode: &str) -> PyResult<Vec<String>> {
        let mode: Mode = mode.parse().map_err(to_py)?;
        Ok(preprocess_address(raw, &self.0, mode).tokens)
    }

    /// (split, merge, bigram, spell) table sizes.
    fn sizes(&self) -> (usize, usize, usize, usize) {
        (self.0.split.len(), self.0.merge.len(), self.0.bigram.len(), self.0.leaders.len())
    }
}

#[pyclass(module = "addrnorm")]
struct LanguageModel(NgramLM);

#[pymethods]
impl LanguageModel {
    #[staticmethod]
    #[pyo3(signature = (documents, config=None))]
    fn train(documents: Vec<Vec<String>>, config: Option<&str>) -> PyResult<Self> {
        let config: LmConfig = match config {
            Some(c) => serde_json::from_str(c).map_err(|e| PyValueError::new_err(e.to_string()))?,
            None => LmConfig::default(),
        };
        train_ngram(&documents, config).map(LanguageModel).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        NgramLM::from_json(text).map(LanguageModel).map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(to_py)
    }

    fn perplexity(&self, tokens: Vec<String>) -> PyResult<f64> {
        self.0.perplexity(&tokens).map_err(to_py)
    }

    #[getter]
    fn tau_ppl(&self) -> f64 {
        self.0.tau_ppl
    }

    #[getter]
    fn vocab_size(&self) -> usize {
        self.0.vocab_size()
    }
}

/// Synthetic labelled addresses as `(id, address, label)` tuples.
#[pyfunction]
#[pyo3(signature = (n, seed=0, subregions=12))]
fn synth(n: usize, seed: u64, subregions: usize) -> PyResult<Vec<(String, String, Option<String>)>> {
    let cfg = SynthConfig {
        n_addresses: n,
        n_subregions: subregions,
        seed,
        ..SynthConfig::default()
    };
    let corpus = generate_corpus(&cfg).map_err(to_py)?;
    Ok(corpus
        .into_iter()
        .map(|s| (s.record.id, s.record.raw_text, s.record.label))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (n, seed=0))]
fn monkey_typed(n: usize, seed: u64) -> Vec<String> {
    core_monkey_typed(n, seed)
}

#[pymodule]
fn addrnorm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(levenshtein, m)?)?;
    m.add_function(wrap_pyfunction!(metaphone, m)?)?;
    m.add_function(wrap_pyfunction!(basic_clean, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_function(wrap_pyfunction!(monkey_typed, m)?)?;
    m.add_class::<Artifacts>()?;
    m.add_class::<LanguageModel>()?;
    Ok(())
}
