//! Effective run configuration: flags over config file over defaults.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bct_core::ctw::{default_beta, DEFAULT_DEPTH};
use bct_core::entropy::DEFAULT_MC_LENGTH;
use bct_core::posterior::DEFAULT_SAMPLES;
use bct_core::summary::{DEFAULT_BINS, DEFAULT_LEVEL};
use clap::Args;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Bct,
    Ctw,
    Ppm,
    Lz,
    Plugin,
}

impl Estimator {
    pub const ALL: [Estimator; 5] = [
        Estimator::Bct,
        Estimator::Ctw,
        Estimator::Ppm,
        Estimator::Lz,
        Estimator::Plugin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Bct => "bct",
            Estimator::Ctw => "ctw",
            Estimator::Ppm => "ppm",
            Estimator::Lz => "lz",
            Estimator::Plugin => "plugin",
        }
    }

    fn parse(s: &str) -> Option<Estimator> {
        Estimator::ALL.into_iter().find(|e| e.name() == s)
    }
}

/// Options shared by every command. All are optional so that the config file
/// and defaults can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Alphabet size m.
    #[arg(long)]
    pub alphabet: Option<u32>,
    /// Maximum context depth D.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Prior hyperparameter β in (0, 1); default 1 - 2^(-m+1).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Number of posterior samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Path length for Monte Carlo entropy evaluation.
    #[arg(long = "mc-length")]
    pub mc_length: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Credible-interval level.
    #[arg(long)]
    pub level: Option<f64>,
    /// Histogram bin count.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Comma-separated subset of bct,ctw,ppm,lz,plugin.
    #[arg(long)]
    pub estimators: Option<String>,
    /// Comma-separated plug-in block lengths.
    #[arg(long = "plugin-k")]
    pub plugin_k: Option<String>,
    /// TOML file with any of the above keys (snake_case).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alphabet: Option<u32>,
    depth: Option<usize>,
    beta: Option<f64>,
    samples: Option<usize>,
    mc_length: Option<usize>,
    seed: Option<u64>,
    level: Option<f64>,
    bins: Option<usize>,
    estimators: Option<String>,
    plugin_k: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alphabet: u32,
    pub depth: usize,
    pub beta: f64,
    pub samples: usize,
    pub mc_length: usize,
    pub seed: u64,
    pub level: f64,
    pub bins: usize,
    pub estimators: Vec<Estimator>,
    pub plugin_k: Vec<usize>,
}

fn parse_list<T, F>(text: &str, what: &str, f: F) -> Result<Vec<T>, CliError>
where
    F: Fn(&str) -> Option<T>,
{
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| f(t).ok_or_else(|| CliError::Usage(format!("invalid {what} {t:?}"))))
        .collect()
}

impl CommonArgs {
    /// Resolve with `default_alphabet` used when neither flag nor file sets it.
    pub fn resolve(&self, default_alphabet: Option<u32>) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let alphabet = self
            .alphabet
            .or(file.alphabet)
            .or(default_alphabet)
            .ok_or_else(|| CliError::Usage("--alphabet is required".into()))?;
        if alphabet < 2 {
            return Err(CliError::Usage(format!("alphabet size must be at least 2, got {alphabet}")));
        }
        let estimators = match self.estimators.clone().or(file.estimators) {
            Some(list) => parse_list(&list, "estimator", Estimator::parse)?,
            None => Estimator::ALL.to_vec(),
        };
        let plugin_k = match self.plugin_k.clone().or(file.plugin_k) {
            Some(list) => parse_list(&list, "block length", |t| t.parse().ok().filter(|&k| k > 0))?,
            None => vec![5, 6, 7],
        };
        let cfg = RunConfig {
            alphabet,
            depth: self.depth.or(file.depth).unwrap_or(DEFAULT_DEPTH),
            beta: self.beta.or(file.beta).unwrap_or_else(|| default_beta(alphabet)),
            samples: self.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
            mc_length: self.mc_length.or(file.mc_length).unwrap_or(DEFAULT_MC_LENGTH),
            seed: self.seed.or(file.seed).unwrap_or(0),
            level: self.level.or(file.level).unwrap_or(DEFAULT_LEVEL),
            bins: self.bins.or(file.bins).unwrap_or(DEFAULT_BINS),
            estimators,
            plugin_k,
        };
        if !(cfg.beta > 0.0 && cfg.beta < 1.0) {
            return Err(CliError::Usage(format!("beta must lie in (0, 1), got {}", cfg.beta)));
        }
        if cfg.samples < 2 {
            return Err(CliError::Usage("--samples must be at least 2".into()));
        }
        if cfg.mc_length == 0 || cfg.bins == 0 {
            return Err(CliError::Usage("--mc-length and --bins must be positive".into()));
        }
        if !(cfg.level > 0.0 && cfg.level < 1.0) {
            return Err(CliError::Usage(format!("--level must lie in (0, 1), got {}", cfg.level)));
        }
        Ok(cfg)
    }
}

fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
}

impl RunConfig {
    /// Key-value lines echoed into every report.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "alphabet = {}", self.alphabet);
        let _ = writeln!(out, "depth = {}", self.depth);
        let _ = writeln!(out, "beta = {}", self.beta);
        let _ = writeln!(out, "samples = {}", self.samples);
        let _ = writeln!(out, "mc_length = {}", self.mc_length);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "level = {}", self.level);
        let _ = writeln!(out, "bins = {}", self.bins);
        let names: Vec<&str> = self.estimators.iter().map(|e| e.name()).collect();
        let _ = writeln!(out, "estimators = {}", names.join(","));
        let ks: Vec<String> = self.plugin_k.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(out, "plugin_k = {}", ks.join(","));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_protocol() {
        let cfg = CommonArgs::default().resolve(Some(3)).unwrap();
        assert_eq!(cfg.depth, 10);
        assert_eq!(cfg.samples, 100_000);
        assert_eq!(cfg.beta, 0.75);
        assert_eq!(cfg.mc_length, 1_000_000);
        assert_eq!(cfg.level, 0.95);
        assert_eq!(cfg.bins, 50);
        assert_eq!(cfg.plugin_k, vec![5, 6, 7]);
        assert_eq!(cfg.estimators.len(), 5);
    }

    #[test]
    fn flags_override_file_over_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "alphabet = 2\ndepth = 4\nseed = 9\n").unwrap();
        let args = CommonArgs {
            depth: Some(6),
            config: Some(path),
            ..CommonArgs::default()
        };
        let cfg = args.resolve(None).unwrap();
        assert_eq!((cfg.alphabet, cfg.depth, cfg.seed), (2, 6, 9));
    }

    #[test]
    fn rejects_bad_values() {
        let args = CommonArgs {
            estimators: Some("bct,magic".into()),
            ..CommonArgs::default()
        };
        assert!(args.resolve(Some(2)).is_err());
        assert!(CommonArgs::default().resolve(None).is_err());
        let args = CommonArgs {
            beta: Some(1.5),
            ..CommonArgs::default()
        };
        assert!(args.resolve(Some(2)).is_err());
    }
}
