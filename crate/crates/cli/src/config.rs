//! TOML configuration for endpoints and default paths.

use std::path::{Path, PathBuf};

use figforge_core::kb::HttpEmbedderConfig;
use figforge_core::pipeline::EndpointConfig;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedderKind {
    #[default]
    Hash,
    Http,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub k: Option<usize>,
    pub t_max: Option<usize>,
    pub refine_max: Option<usize>,
    pub select_tokens: Option<usize>,
    pub rasterize_command: Option<String>,
    pub asset_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub offline: bool,
    pub ledger: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub embedder: EmbedderKind,
    pub model: Option<EndpointConfig>,
    pub critic: Option<EndpointConfig>,
    pub image: Option<EndpointConfig>,
    pub embedding: Option<HttpEmbedderConfig>,
    pub pipeline: PipelineSection,
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<CliConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        CliConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<CliConfig, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}
