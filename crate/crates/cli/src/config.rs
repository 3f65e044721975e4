use std::path::Path;

use cadenza_core::explainer::Level;
use cadenza_core::generator::{GenerationConfig, Register};
use serde::Deserialize;

use crate::CliError;

/// Settings file for `continue`; every key is optional and flags win.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub phrases: Option<usize>,
    pub seed: Option<u64>,
    pub bpm: Option<u16>,
    pub level: Option<String>,
    pub substitution_probability: Option<f64>,
    pub ornament_rate: Option<f64>,
    pub right_hand_register: Option<Register>,
    pub left_hand_register: Option<Register>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<FileConfig, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

/// Effective settings for one `continue` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub phrases: usize,
    pub bpm: Option<u16>,
    pub level: Level,
    pub generation: GenerationConfig,
}

#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub phrases: Option<usize>,
    pub seed: Option<u64>,
    pub bpm: Option<u16>,
    pub level: Option<Level>,
}

pub fn merge(file: FileConfig, flags: Overrides) -> Result<RunConfig, CliError> {
    let mut generation = GenerationConfig::default();
    if let Some(s) = flags.seed.or(file.seed) {
        generation.seed = s;
    }
    if let Some(p) = file.substitution_probability {
        generation.substitution_probability = p;
    }
    if let Some(r) = file.ornament_rate {
        generation.ornament_rate = r;
    }
    if let Some(r) = file.right_hand_register {
        generation.right_hand_register = r;
    }
    if let Some(r) = file.left_hand_register {
        generation.left_hand_register = r;
    }
    generation.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let level = match (flags.level, file.level) {
        (Some(l), _) => l,
        (None, Some(s)) => s.parse().map_err(|_| CliError::Usage(format!("unknown level `{s}` in config")))?,
        (None, None) => Level::Beginner,
    };
    Ok(RunConfig { phrases: flags.phrases.or(file.phrases).unwrap_or(1), bpm: flags.bpm.or(file.bpm), level, generation })
}
