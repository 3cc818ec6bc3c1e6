use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use crate::RunConfig;

/// Tool version, hash of the effective configuration, and seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    /// The output directory is not part of the hashed configuration.
    pub fn new(cfg: &RunConfig, seed: u64) -> anyhow::Result<Self> {
        let hashed = RunConfig { out: None, ..cfg.clone() };
        let canonical = serde_json::to_string(&hashed)?;
        Ok(Self {
            tool: "twinkernel",
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: hex::encode(Sha256::digest(canonical.as_bytes())),
            seed,
        })
    }

    pub fn header_line(&self) -> String {
        format!("# {} {} config_sha256={} seed={}", self.tool, self.version, self.config_sha256, self.seed)
    }
}

fn target(dir: &Path, name: &str) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.join(name))
}

pub fn write_csv(dir: &Path, name: &str, prov: &Provenance, body: &str) -> anyhow::Result<PathBuf> {
    let path = target(dir, name)?;
    let text = format!("{}\n{body}", prov.header_line());
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, prov: &Provenance, value: &T) -> anyhow::Result<PathBuf> {
    let path = target(dir, name)?;
    let doc = serde_json::json!({ "header": prov, "report": value });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
