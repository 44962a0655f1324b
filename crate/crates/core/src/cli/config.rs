use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;
use crate::learner::ForestConfig;
use crate::synth::CohortParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Defaults to `<output>/recordings`.
    pub recordings: Option<PathBuf>,
    /// Defaults to `<output>/manifests`.
    pub manifests: Option<PathBuf>,
    pub output: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self { recordings: None, manifests: None, output: PathBuf::from("out") }
    }
}

impl PathsConfig {
    pub fn recordings_dir(&self) -> PathBuf {
        self.recordings.clone().unwrap_or_else(|| self.output.join("recordings"))
    }

    pub fn manifests_dir(&self) -> PathBuf {
        self.manifests.clone().unwrap_or_else(|| self.output.join("manifests"))
    }

    pub fn features_file(&self) -> PathBuf {
        self.output.join("features.csv")
    }

    pub fn model_file(&self) -> PathBuf {
        self.output.join("model.json")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub n_subjects: usize,
    pub seed: u64,
    pub spo2_shift_per_level: [f64; 4],
    pub sample_rate: f64,
    pub noise_sd: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        let p = CohortParams::default();
        Self {
            n_subjects: p.n_subjects,
            seed: p.seed,
            spo2_shift_per_level: p.spo2_shift_per_level,
            sample_rate: p.sample_rate,
            noise_sd: p.noise_sd,
        }
    }
}

impl GeneratorConfig {
    pub fn cohort_params(&self) -> CohortParams {
        CohortParams {
            n_subjects: self.n_subjects,
            seed: self.seed,
            spo2_shift_per_level: self.spo2_shift_per_level,
            sample_rate: self.sample_rate,
            noise_sd: self.noise_sd,
            ..CohortParams::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    Kfold10,
    Loso,
}

impl EvalMode {
    pub fn name(self) -> &'static str {
        match self {
            EvalMode::Kfold10 => "kfold10",
            EvalMode::Loso => "loso",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateConfig {
    pub mode: EvalMode,
    pub shuffle_seed: u64,
    /// Levels kept for training and evaluation; empty keeps all.
    pub levels: Vec<u8>,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self { mode: EvalMode::Kfold10, shuffle_seed: 0, levels: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: PathsConfig,
    pub generator: GeneratorConfig,
    pub forest: ForestConfig,
    pub evaluate: EvaluateConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Other(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::from_io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the effective configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical))
    }

    /// Every seed, so one flag pins the whole run.
    pub fn set_seed(&mut self, seed: u64) {
        self.generator.seed = seed;
        self.forest.rng_seed = seed;
        self.evaluate.shuffle_seed = seed;
    }
}
