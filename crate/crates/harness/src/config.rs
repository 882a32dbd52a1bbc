//! Experiment configuration: defaults, TOML loading, and validation.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use sempilot_core::estimator::SchemeId;
use sempilot_core::pilot::PilotConfig;
use sempilot_core::semantic::StochasticParams;
use sempilot_core::textcodec::Alphabet;
use sempilot_llmclient::RemoteConfig;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// SNR sweep points in dB.
    pub snr_db: Vec<f64>,
    /// Trials per SNR point.
    pub trials: usize,
    pub master_seed: u64,
    /// Characters per trial, `L`.
    pub text_len: usize,
    /// Corpus file; the bundled sample corpus when absent.
    pub corpus: Option<PathBuf>,
    /// Alphabet override file (one character per line, 64 lines).
    pub alphabet_file: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Worker threads; 0 picks the rayon default.
    pub workers: usize,
    pub schemes: Vec<SchemeName>,
    /// Drop selections where decoded and corrected both hold the mask
    /// character.
    pub exclude_mask_matches: bool,
    /// Run the scaling sum over corrected symbols instead of the initial
    /// decisions.
    pub scaling_uses_corrected: bool,
    pub pilot: PilotSection,
    pub channel: ChannelSection,
    pub corrector: CorrectorSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            snr_db: vec![7.0, 8.0, 9.0, 10.0],
            trials: 1000,
            master_seed: 1,
            text_len: 30,
            corpus: None,
            alphabet_file: None,
            out_dir: PathBuf::from("out"),
            workers: 0,
            schemes: SchemeId::ALL.iter().map(|&id| SchemeName(id)).collect(),
            exclude_mask_matches: false,
            scaling_uses_corrected: false,
            pilot: PilotSection::default(),
            channel: ChannelSection::default(),
            corrector: CorrectorSection::default(),
        }
    }
}

/// Newtype so scheme lists deserialize from their string keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeName(pub SchemeId);

impl<'de> Deserialize<'de> for SchemeName {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse::<SchemeId>().map(SchemeName).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PilotSection {
    pub length: usize,
    pub root: usize,
}

impl Default for PilotSection {
    fn default() -> Self {
        let d = PilotConfig::default();
        PilotSection { length: d.length, root: d.root }
    }
}

impl PilotSection {
    pub fn as_pilot_config(&self) -> PilotConfig {
        PilotConfig { length: self.length, root: self.root }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    /// Rician K-factor in dB.
    pub k_factor_db: f64,
    /// Fixed line-of-sight phase in radians; drawn uniformly per trial when
    /// absent.
    pub los_phase: Option<f64>,
}

impl Default for ChannelSection {
    fn default() -> Self {
        ChannelSection { k_factor_db: 10.0, los_phase: None }
    }
}

impl ChannelSection {
    /// K-factor on the linear scale.
    pub fn k_linear(&self) -> f64 {
        10f64.powf(self.k_factor_db / 10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectorKind {
    Oracle,
    Identity,
    Stochastic,
    Remote,
}

impl std::str::FromStr for CorrectorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "oracle" => Ok(CorrectorKind::Oracle),
            "identity" => Ok(CorrectorKind::Identity),
            "stochastic" => Ok(CorrectorKind::Stochastic),
            "remote" => Ok(CorrectorKind::Remote),
            _ => Err(format!("unknown corrector kind {s:?}")),
        }
    }
}

impl<'de> Deserialize<'de> for CorrectorKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrectorSection {
    pub kind: CorrectorKind,
    pub p_fix: f64,
    pub p_mask: f64,
    pub p_miscorrect: f64,
    pub p_mask_run: f64,
    pub remote: RemoteSection,
}

impl Default for CorrectorSection {
    fn default() -> Self {
        let p = StochasticParams::default();
        CorrectorSection {
            kind: CorrectorKind::Stochastic,
            p_fix: p.p_fix,
            p_mask: p.p_mask,
            p_miscorrect: p.p_miscorrect,
            p_mask_run: p.p_mask_run,
            remote: RemoteSection::default(),
        }
    }
}

impl CorrectorSection {
    pub fn stochastic_params(&self) -> StochasticParams {
        StochasticParams {
            p_fix: self.p_fix,
            p_mask: self.p_mask,
            p_miscorrect: self.p_miscorrect,
            p_mask_run: self.p_mask_run,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RemoteSection {
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub timeout_secs: f64,
    pub max_retries: u32,
    pub retry_backoff_ms: u64,
    pub cache_dir: PathBuf,
    pub max_in_flight: usize,
}

impl Default for RemoteSection {
    fn default() -> Self {
        let d = RemoteConfig::default();
        RemoteSection {
            endpoint: d.endpoint,
            model: d.model,
            api_key_env: d.api_key_env,
            timeout_secs: d.timeout_secs,
            max_retries: d.max_retries,
            retry_backoff_ms: d.retry_backoff_ms,
            cache_dir: d.cache_dir,
            max_in_flight: d.max_in_flight,
        }
    }
}

impl RemoteSection {
    pub fn as_remote_config(&self) -> RemoteConfig {
        RemoteConfig {
            endpoint: self.endpoint.clone(),
            model: self.model.clone(),
            api_key_env: self.api_key_env.clone(),
            timeout_secs: self.timeout_secs,
            max_retries: self.max_retries,
            retry_backoff_ms: self.retry_backoff_ms,
            cache_dir: self.cache_dir.clone(),
            max_in_flight: self.max_in_flight,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<ExperimentConfig> {
        let config: ExperimentConfig = toml::from_str(text).context("parsing config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        ExperimentConfig::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            bail!("snr_db must list at least one SNR point");
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.text_len == 0 {
            bail!("text_len must be at least 1");
        }
        if self.schemes.is_empty() {
            bail!("schemes must list at least one scheme");
        }
        if self.channel.k_factor_db.is_nan() {
            bail!("channel.k_factor_db must be a number");
        }
        self.corrector
            .stochastic_params()
            .validate()
            .map_err(|reason| anyhow::anyhow!("corrector: {reason}"))?;
        sempilot_core::pilot::zadoff_chu(&self.pilot.as_pilot_config())
            .map_err(|e| anyhow::anyhow!("pilot: {e}"))?;
        Ok(())
    }

    pub fn scheme_ids(&self) -> Vec<SchemeId> {
        self.schemes.iter().map(|s| s.0).collect()
    }

    /// Loads the alphabet override when configured, the default otherwise.
    pub fn alphabet(&self) -> Result<Alphabet> {
        match &self.alphabet_file {
            None => Ok(Alphabet::standard().clone()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading alphabet file {}", path.display()))?;
                Alphabet::from_lines(&text).map_err(|e| anyhow::anyhow!("alphabet: {e}"))
            }
        }
    }
}
