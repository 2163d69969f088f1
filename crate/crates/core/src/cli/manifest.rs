use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub(crate) const CONFIG_FILE: &str = "config.json";
pub(crate) const MANIFEST_FILE: &str = "manifest.json";

/// Provenance record written next to every set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// SHA-256 of the stored `config.json` bytes.
    pub config_hash: String,
    pub config_file: String,
    pub tool_version: String,
    pub timestamp: String,
    pub master_seed: u64,
    pub outputs: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub(crate) fn new(config_text: &str, master_seed: u64, outputs: Vec<String>) -> Self {
        Self {
            config_hash: sha256_hex(config_text.as_bytes()),
            config_file: CONFIG_FILE.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            master_seed,
            outputs,
        }
    }

    pub fn load(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?)
    }

    /// Recompute the config hash from the stored copy and check every listed
    /// output exists.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        let bytes = fs::read(dir.join(&self.config_file))?;
        let hash = sha256_hex(&bytes);
        if hash != self.config_hash {
            return Err(Error::Config(format!(
                "config hash mismatch: manifest {} but stored config hashes to {hash}",
                self.config_hash
            )));
        }
        for f in &self.outputs {
            if !dir.join(f).is_file() {
                return Err(Error::Config(format!("listed output {f} is missing")));
            }
        }
        Ok(())
    }
}
