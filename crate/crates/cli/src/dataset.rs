//! Dataset directory layout: `{root}/manifest.json` plus one directory per
//! item, `{root}/{item_id}/`, holding that item's files.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use pdtemplates::io;
use serde::{Deserialize, Serialize};

pub const MANIFEST: &str = "manifest.json";
pub const CLOUD: &str = "cloud.csv";
pub const SERIES: &str = "series.csv";
pub const DIAGRAM_PREFIX: &str = "diagram";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: String,
    pub seed: u64,
    /// Class index used when training.
    pub label: usize,
    /// Extra per-item facts (class name, parameter value, chaos score).
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub info: serde_json::Map<String, serde_json::Value>,
}

impl Manifest {
    pub fn read(root: &Path) -> Result<Manifest> {
        Ok(io::read_json(&root.join(MANIFEST))?)
    }

    pub fn write(&self, root: &Path) -> Result<()> {
        Ok(io::write_json(&root.join(MANIFEST), self)?)
    }
}

pub fn item_dir(root: &Path, item: &Item) -> PathBuf {
    root.join(&item.id)
}

pub fn item_id(index: usize) -> String {
    format!("{index:05}")
}

pub fn write_series(path: &Path, series: &[f64]) -> Result<()> {
    let mut text = String::with_capacity(series.len() * 20 + 2);
    text.push_str("x\n");
    for v in series {
        text.push_str(&format!("{v}\n"));
    }
    Ok(io::atomic_write(path, text.as_bytes())?)
}

pub fn read_series(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| crate::Usage(format!("{}: line {}: bad value `{l}`", path.display(), k + 2)).into())
        })
        .collect()
}
