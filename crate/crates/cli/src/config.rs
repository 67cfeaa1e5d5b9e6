//! Effective run configuration: built-in defaults, then the config file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use prosodyne::attention::AttentionConfig;
use prosodyne::metrics::EvalConfig;
use prosodyne::pipeline::{FilterProfile, PipelineError, PROFILE_NAMES};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    #[default]
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Worker threads for corpus evaluation. Never echoed, so outputs do not
    /// depend on it.
    #[serde(skip_serializing)]
    pub workers: usize,
    pub format: Format,
    pub seed: u64,
    pub eval: EvalConfig,
    pub filter: FilterSettings,
    pub attention: AttentionSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            format: Format::default(),
            seed: 0,
            eval: EvalConfig::default(),
            filter: FilterSettings::default(),
            attention: AttentionSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterSettings {
    /// Built-in profile name or path to a profile file.
    pub profile: String,
}

impl Default for FilterSettings {
    fn default() -> Self {
        Self { profile: "lsvsr".into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Dims {
    #[default]
    Desk,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttentionSettings {
    /// Dimensions for the shape check.
    pub dims: Dims,
    pub gradient_instances: usize,
    pub max_model_dim: usize,
    pub max_source_len: usize,
    pub unroll_trials: usize,
    pub unroll_steps: usize,
    pub shape_only: bool,
}

impl Default for AttentionSettings {
    fn default() -> Self {
        Self {
            dims: Dims::Desk,
            gradient_instances: 50,
            max_model_dim: 16,
            max_source_len: 8,
            unroll_trials: 100,
            unroll_steps: 20,
            shape_only: false,
        }
    }
}

impl AttentionSettings {
    pub fn config(&self) -> AttentionConfig {
        match self.dims {
            Dims::Desk => AttentionConfig::desk(),
            Dims::Full => AttentionConfig::full(),
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalFlags {
    /// TOML or JSON config file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads for corpus evaluation.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Filter profile name (lsvsr, voxceleb2, grid) or profile file.
    #[arg(long, global = true, value_name = "NAME")]
    pub profile: Option<String>,
    /// Seed for attention diagnostics.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
}

/// Feature-extraction overrides for `compare` and `eval-corpus`.
#[derive(Debug, Clone, Default, Args)]
pub struct EvalFlags {
    /// MFCC analysis window.
    #[arg(long, value_name = "MS")]
    pub window_ms: Option<f64>,
    /// MFCC analysis hop.
    #[arg(long, value_name = "MS")]
    pub hop_ms: Option<f64>,
    #[arg(long, value_name = "N")]
    pub mel_bins: Option<usize>,
    #[arg(long, value_name = "N")]
    pub mfcc_coeffs: Option<usize>,
    /// Cepstral coefficients entering MCD.
    #[arg(long, value_name = "K")]
    pub mcd_k: Option<usize>,
    /// Scale MCD to decibels.
    #[arg(long)]
    pub mcd_db: bool,
    #[arg(long, value_name = "MS")]
    pub yin_hop_ms: Option<f64>,
    #[arg(long, value_name = "MS")]
    pub yin_window_ms: Option<f64>,
    #[arg(long, value_name = "HZ")]
    pub f_min: Option<f64>,
    #[arg(long, value_name = "HZ")]
    pub f_max: Option<f64>,
    #[arg(long, value_name = "T")]
    pub yin_threshold: Option<f64>,
}

impl EvalFlags {
    pub fn apply(&self, eval: &mut EvalConfig) {
        set(&mut eval.frame.window_ms, self.window_ms);
        set(&mut eval.frame.hop_ms, self.hop_ms);
        set(&mut eval.mel.bins, self.mel_bins);
        set(&mut eval.mfcc_coeffs, self.mfcc_coeffs);
        set(&mut eval.mcd.k, self.mcd_k);
        if self.mcd_db {
            eval.mcd.db_scale = true;
        }
        set(&mut eval.yin.hop_ms, self.yin_hop_ms);
        set(&mut eval.yin.window_ms, self.yin_window_ms);
        set(&mut eval.yin.f_min, self.f_min);
        set(&mut eval.yin.f_max, self.f_max);
        set(&mut eval.yin.threshold, self.yin_threshold);
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl RunConfig {
    /// Defaults overlaid with the config file (if any) and the global flags.
    pub fn resolve(flags: &GlobalFlags) -> Result<Self, CliError> {
        let mut config = match &flags.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        set(&mut config.workers, flags.workers);
        set(&mut config.format, flags.format);
        set(&mut config.seed, flags.seed);
        set(&mut config.filter.profile, flags.profile.clone());
        if config.workers == 0 {
            return Err(CliError::Input("--workers must be at least 1".into()));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        parse_by_extension(path, &text).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }
}

fn parse_by_extension<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, String> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

/// Resolves a built-in profile name or a TOML/JSON profile file.
pub fn resolve_profile(name_or_path: &str) -> Result<FilterProfile, CliError> {
    if PROFILE_NAMES.contains(&name_or_path) {
        return FilterProfile::by_name(name_or_path).map_err(CliError::input);
    }
    let path = Path::new(name_or_path);
    if !path.is_file() {
        return Err(CliError::input(PipelineError::UnknownProfile { name: name_or_path.to_string() }));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read profile {}: {e}", path.display())))?;
    let profile: FilterProfile =
        parse_by_extension(path, &text).map_err(|e| CliError::Input(format!("profile {}: {e}", path.display())))?;
    profile.validate().map_err(CliError::input)?;
    Ok(profile)
}
