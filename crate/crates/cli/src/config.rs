//! Run configuration: defaults, optional config file (TOML or JSON), and
//! command-line overrides, in that precedence order.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: u64,
    pub tol: Option<f64>,
    pub budget_candidates: u64,
    pub budget_doublings: u32,
    pub budget_witness: u64,
    pub out: PathBuf,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            samples: 200_000,
            tol: None,
            budget_candidates: 500_000_000,
            budget_doublings: 16,
            budget_witness: 20_000_000,
            out: PathBuf::from("out"),
            format: OutputFormat::Json,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub tol: Option<f64>,
    pub budget_candidates: Option<u64>,
    pub budget_doublings: Option<u32>,
    pub budget_witness: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

pub fn load_file_config(path: &Path) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&text).context("parsing TOML config")?,
        Some("json") => serde_json::from_str(&text).context("parsing JSON config")?,
        _ => bail!("config file must end in .toml or .json"),
    };
    Ok(parsed)
}

impl RunConfig {
    pub fn merge_file(&mut self, file: FileConfig) {
        if let Some(v) = file.seed {
            self.seed = v;
        }
        if let Some(v) = file.samples {
            self.samples = v;
        }
        if let Some(v) = file.tol {
            self.tol = Some(v);
        }
        if let Some(v) = file.budget_candidates {
            self.budget_candidates = v;
        }
        if let Some(v) = file.budget_doublings {
            self.budget_doublings = v;
        }
        if let Some(v) = file.budget_witness {
            self.budget_witness = v;
        }
        if let Some(v) = file.out {
            self.out = v;
        }
        if let Some(v) = file.format {
            self.format = v;
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.samples == 0 {
            bail!("samples must be positive");
        }
        if self.budget_candidates == 0 || self.budget_witness == 0 {
            bail!("budgets must be positive");
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0 && t.is_finite()) {
                bail!("tol must be a finite nonnegative real");
            }
        }
        Ok(())
    }
}
