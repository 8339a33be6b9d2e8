//! Resolved run configuration: TOML file plus flag overrides, flags win.

use anyhow::{bail, Context, Result};
use kphint_analysis::default_edges;
use kphint_pipeline::EndpointConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Every knob consumed by the subcommands. Serialized (canonical JSON)
/// and hashed into the header record of every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CliConfig {
    pub data_dir: PathBuf,
    pub runs: u32,
    pub samples_per_run: u32,
    pub epsilon: f64,
    pub delta: f64,
    pub enumeration_cap: u32,
    pub paradox_subset_cap: u32,
    pub bucket_edges: Vec<f64>,
    pub injection_threshold: f64,
    pub endpoint: EndpointConfig,
    pub seed: u64,
    /// Worker threads for endpoint-backed evaluation.
    pub parallelism: usize,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            data_dir: PathBuf::from("data"),
            runs: 8,
            samples_per_run: 32,
            epsilon: 1.0 / 32.0,
            delta: 1.0 / 32.0,
            enumeration_cap: kphint_select::DEFAULT_ENUMERATION_CAP,
            paradox_subset_cap: 64,
            bucket_edges: default_edges(),
            injection_threshold: 0.9,
            endpoint: EndpointConfig::default(),
            seed: 0,
            parallelism: 4,
        }
    }
}

/// Config-related flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct ConfigArgs {
    /// TOML config file; missing default path just means defaults.
    #[arg(long, global = true, default_value = "kphint.toml")]
    pub config: PathBuf,
    #[arg(long, global = true)]
    pub data_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub runs: Option<u32>,
    #[arg(long, global = true)]
    pub samples_per_run: Option<u32>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub enumeration_cap: Option<u32>,
    #[arg(long, global = true)]
    pub paradox_subset_cap: Option<u32>,
    /// Comma-separated bucket edges, e.g. 0,0.5,1.
    #[arg(long, global = true, value_delimiter = ',')]
    pub bucket_edges: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub injection_threshold: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
    #[arg(long, global = true)]
    pub base_url: Option<String>,
    #[arg(long, global = true)]
    pub model_name: Option<String>,
}

impl ConfigArgs {
    /// File values under flag values under built-in defaults.
    pub fn resolve(&self) -> Result<CliConfig> {
        let mut config = load_file(&self.config)?;
        if let Some(v) = &self.data_dir {
            config.data_dir = v.clone();
        }
        if let Some(v) = self.runs {
            config.runs = v;
        }
        if let Some(v) = self.samples_per_run {
            config.samples_per_run = v;
        }
        if let Some(v) = self.epsilon {
            config.epsilon = v;
        }
        if let Some(v) = self.delta {
            config.delta = v;
        }
        if let Some(v) = self.enumeration_cap {
            config.enumeration_cap = v;
        }
        if let Some(v) = self.paradox_subset_cap {
            config.paradox_subset_cap = v;
        }
        if let Some(v) = &self.bucket_edges {
            config.bucket_edges = v.clone();
        }
        if let Some(v) = self.injection_threshold {
            config.injection_threshold = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.parallelism {
            config.parallelism = v;
        }
        if let Some(v) = &self.base_url {
            config.endpoint.base_url = v.clone();
        }
        if let Some(v) = &self.model_name {
            config.endpoint.model_name = v.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn load_file(path: &Path) -> Result<CliConfig> {
    if !path.exists() {
        return Ok(CliConfig::default());
    }
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

impl CliConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 || self.samples_per_run == 0 {
            bail!("runs and samples_per_run must be positive");
        }
        if !(0.0..=1.0).contains(&self.epsilon) || !(0.0..=1.0).contains(&self.delta) {
            bail!("epsilon and delta must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.injection_threshold) {
            bail!("injection_threshold must lie in [0, 1]");
        }
        if self.parallelism == 0 {
            bail!("parallelism must be positive");
        }
        self.endpoint.validate()?;
        Ok(())
    }

    /// Hex digest of the canonical JSON form, embedded in output headers.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[derive(Parser)]
    struct Harness {
        #[command(flatten)]
        args: ConfigArgs,
    }

    fn resolve(argv: &[&str]) -> Result<CliConfig> {
        let mut full = vec!["kphint"];
        full.extend_from_slice(argv);
        Harness::parse_from(full).args.resolve()
    }

    #[test]
    fn defaults_apply_without_a_config_file() {
        let config = resolve(&[]).unwrap();
        assert_eq!(config, CliConfig::default());
        assert_eq!(config.runs, 8);
        assert_eq!(config.samples_per_run, 32);
        assert_eq!(config.epsilon, 1.0 / 32.0);
        assert_eq!(config.delta, 1.0 / 32.0);
        assert_eq!(config.injection_threshold, 0.9);
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kphint.toml");
        std::fs::write(&path, "runs = 4\nseed = 9\n").unwrap();
        let config = resolve(&[
            "--config",
            path.to_str().unwrap(),
            "--runs",
            "6",
        ])
        .unwrap();
        assert_eq!(config.runs, 6, "flag wins over file");
        assert_eq!(config.seed, 9, "file wins over default");
    }

    #[test]
    fn nested_endpoint_fields_load_from_toml() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kphint.toml");
        std::fs::write(
            &path,
            "[endpoint]\nbase_url = \"http://example:9000/v1\"\nmodel_name = \"m\"\n",
        )
        .unwrap();
        let config = resolve(&["--config", path.to_str().unwrap()]).unwrap();
        assert_eq!(config.endpoint.base_url, "http://example:9000/v1");
        assert_eq!(config.endpoint.model_name, "m");
    }

    #[test]
    fn bucket_edges_parse_from_a_comma_list() {
        let config = resolve(&["--bucket-edges", "0,0.5,1"]).unwrap();
        assert_eq!(config.bucket_edges, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(resolve(&["--runs", "0"]).is_err());
        assert!(resolve(&["--epsilon", "1.5"]).is_err());
        assert!(resolve(&["--parallelism", "0"]).is_err());
    }

    #[test]
    fn hash_tracks_every_field() {
        let base = CliConfig::default();
        let mut changed = base.clone();
        changed.seed = 1;
        assert_ne!(base.hash(), changed.hash());
        assert_eq!(base.hash(), CliConfig::default().hash());
        assert_eq!(base.hash().len(), 64);
    }
}
