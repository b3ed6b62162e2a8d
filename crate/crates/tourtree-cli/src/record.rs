//! Provenance records written alongside every file-producing run: the
//! subcommand, its full resolved parameter set, the seed, wall-clock
//! timestamps, and SHA-256 digests of every input and output file. Replaying
//! the recorded parameters reproduces the recorded output digests; the
//! timestamps are the only fields expected to differ.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub subcommand: String,
    /// Every parameter that influenced the run, resolved to its final value.
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    /// Input path -> SHA-256 of the bytes that were read.
    pub inputs: BTreeMap<String, String>,
    /// Output path -> SHA-256 of the bytes that were written.
    pub outputs: BTreeMap<String, String>,
    pub code_version: String,
    pub format_version: u32,
}

impl RunRecord {
    pub fn start(subcommand: &str, seed: u64) -> Self {
        RunRecord {
            subcommand: subcommand.to_string(),
            params: BTreeMap::new(),
            seed,
            started_unix_ms: unix_ms(),
            finished_unix_ms: 0,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            format_version: tourtree::FORMAT_VERSION,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs
            .insert(path.display().to_string(), sha256_hex(bytes));
    }

    pub fn output(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs
            .insert(path.display().to_string(), sha256_hex(bytes));
    }

    /// Finish the record and write it next to `out` as `<out>.run.json`.
    pub fn write_alongside(mut self, out: &Path) -> Result<()> {
        self.finished_unix_ms = unix_ms();
        let mut path = out.as_os_str().to_owned();
        path.push(".run.json");
        let body = serde_json::to_string_pretty(&self)?;
        std::fs::write(&path, body)
            .with_context(|| format!("writing run record {}", Path::new(&path).display()))?;
        Ok(())
    }
}
