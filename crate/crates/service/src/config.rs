use std::path::{Path, PathBuf};
use std::time::Duration;

use manasik_core::engine::{CorpusPaths, EngineSettings};
use manasik_core::index::WeightSource;
use manasik_core::ontology::ExpansionMode;
use manasik_core::{DEFAULT_ALPHA, DEFAULT_K};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", .path.display())]
    Toml {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("environment variable {name}: cannot parse `{value}`")]
    Env { name: String, value: String },
    #[error("no concept description file configured")]
    MissingCorpus,
}

/// Service configuration, read from a TOML file and then overridden by
/// `MANASIK_*` environment variables.
///
/// ```toml
/// port = 8080
/// alpha = 0.02
/// session_timeout_secs = 1800
///
/// [corpus]
/// concepts = "data/concepts.xml"
/// contexts = "data/contexts.xml"
/// ontology = "data/ontology.xml"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub host: String,
    pub port: u16,
    pub corpus: CorpusPaths,
    pub weight_source: WeightSource,
    pub cache: Option<PathBuf>,
    pub alpha: f64,
    pub k: usize,
    pub expansion_mode: ExpansionMode,
    pub expansion_depth: usize,
    pub session_timeout_secs: u64,
    pub max_body_bytes: usize,
    /// Directory served under `/ui`.
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        let engine = EngineSettings::default();
        ServiceConfig {
            host: "127.0.0.1".into(),
            port: 8080,
            corpus: CorpusPaths::default(),
            weight_source: WeightSource::Precomputed,
            cache: None,
            alpha: DEFAULT_ALPHA,
            k: DEFAULT_K,
            expansion_mode: engine.expansion_mode,
            expansion_depth: engine.expansion_depth,
            session_timeout_secs: 30 * 60,
            max_body_bytes: 64 * 1024,
            ui_dir: None,
        }
    }
}

/// Environment variables understood by [`ServiceConfig::apply_env`].
pub const ENV_VARS: [&str; 11] = [
    "MANASIK_HOST",
    "MANASIK_PORT",
    "MANASIK_CORPUS",
    "MANASIK_CONTEXTS",
    "MANASIK_SHOTS",
    "MANASIK_ONTOLOGY",
    "MANASIK_ALPHA",
    "MANASIK_K",
    "MANASIK_SESSION_TIMEOUT",
    "MANASIK_CACHE",
    "MANASIK_UI_DIR",
];

impl ServiceConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Toml {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Applies overrides from `lookup` (normally `std::env::var`).
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(name: &str, value: String) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::Env {
                name: name.to_string(),
                value,
            })
        }
        for name in ENV_VARS {
            let Some(value) = lookup(name) else { continue };
            match name {
                "MANASIK_HOST" => self.host = value,
                "MANASIK_PORT" => self.port = parse(name, value)?,
                "MANASIK_CORPUS" => self.corpus.concepts = value.into(),
                "MANASIK_CONTEXTS" => self.corpus.contexts = Some(value.into()),
                "MANASIK_SHOTS" => self.corpus.shots = Some(value.into()),
                "MANASIK_ONTOLOGY" => self.corpus.ontology = Some(value.into()),
                "MANASIK_ALPHA" => self.alpha = parse(name, value)?,
                "MANASIK_K" => self.k = parse(name, value)?,
                "MANASIK_SESSION_TIMEOUT" => self.session_timeout_secs = parse(name, value)?,
                "MANASIK_CACHE" => self.cache = Some(value.into()),
                "MANASIK_UI_DIR" => self.ui_dir = Some(value.into()),
                _ => unreachable!(),
            }
        }
        Ok(())
    }

    pub fn engine_settings(&self) -> EngineSettings {
        EngineSettings {
            alpha: self.alpha,
            k: self.k,
            expansion_mode: self.expansion_mode,
            expansion_depth: self.expansion_depth,
            ..EngineSettings::default()
        }
    }

    pub fn session_timeout(&self) -> Duration {
        Duration::from_secs(self.session_timeout_secs)
    }
}
