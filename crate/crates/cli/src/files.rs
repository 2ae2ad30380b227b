//! File formats owned by the CLI and the run manifest written next to every
//! output.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use addrnorm_core::{Error, Result, ARTIFACT_VERSION};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Input(format!("{}: {e}", path.display()))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// One preprocessed address: `{"id", "label"?, "pincode"?, "tokens"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenRow {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pincode: Option<String>,
    pub tokens: Vec<String>,
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            reason: format!("{}: {e}", path.display()),
        })?);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let f = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(f);
    for r in rows {
        serde_json::to_writer(&mut w, &r)?;
        w.write_all(b"\n").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Load a JSON config of type `T`, or its defaults when no path is given.
/// Unknown keys and type mismatches are configuration errors.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Provenance for one produced artifact. Input digests are keyed by flag
/// name, not path, so runs in different directories compare equal.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub artifact_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub input_digests: BTreeMap<String, String>,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            artifact_version: ARTIFACT_VERSION,
            command: command.to_string(),
            config: serde_json::Value::Object(Default::default()),
            input_digests: BTreeMap::new(),
            seed,
        }
    }

    pub fn input(&mut self, flag: &str, path: &Path) -> Result<()> {
        self.input_digests.insert(flag.to_string(), sha256_file(path)?);
        Ok(())
    }

    pub fn config(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        let v = serde_json::to_value(value)?;
        if let serde_json::Value::Object(m) = &mut self.config {
            m.insert(key.to_string(), v);
        }
        Ok(())
    }

    /// Write `<output>.manifest.json`.
    pub fn write_for(&self, output: &Path) -> Result<()> {
        let mut p = output.as_os_str().to_owned();
        p.push(".manifest.json");
        let p = PathBuf::from(p);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_text(&p, &text)
    }
}
