//! Engine configuration: one JSON document naming the corpus files, the seed
//! provider and the pipeline settings.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use readpath::pipeline::PipelineConfig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    /// Papers JSONL. Relative paths are resolved against the config file.
    pub papers_path: PathBuf,
    /// Venue score table; every venue scores as missing when absent.
    #[serde(default)]
    pub venues_path: Option<PathBuf>,
    pub seed_provider: SeedProviderConfig,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default = "default_bind")]
    pub bind: String,
    /// Allowed browser origin; any origin when unset.
    #[serde(default)]
    pub cors_origin: Option<String>,
}

fn default_bind() -> String {
    DEFAULT_BIND.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SeedProviderConfig {
    /// Frozen `query -> ids` JSON map.
    Offline { path: PathBuf },
    /// Search endpoint queried with `GET url?{query_param}=<query>`.
    Http(HttpProviderConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpProviderConfig {
    pub url: String,
    #[serde(default = "default_query_param")]
    pub query_param: String,
    /// Parameter carrying the number of wanted hits, if the endpoint takes one.
    #[serde(default)]
    pub count_param: Option<String>,
    /// JSON pointer to the array of hits in the response.
    #[serde(default)]
    pub ids_pointer: String,
    /// Field holding the id when hits are objects rather than strings.
    #[serde(default)]
    pub id_field: Option<String>,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

fn default_query_param() -> String {
    "q".to_string()
}

fn default_timeout_ms() -> u64 {
    10_000
}

impl HttpProviderConfig {
    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }
}

impl EngineConfig {
    /// Reads, resolves relative paths and validates.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let invalid = |message: String| ConfigError::Invalid {
            path: path.to_path_buf(),
            message,
        };
        let mut config: EngineConfig = serde_json::from_str(&text).map_err(|e| invalid(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        config.validate().map_err(invalid)?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.papers_path);
        if let Some(v) = self.venues_path.as_mut() {
            join(v);
        }
        if let SeedProviderConfig::Offline { path } = &mut self.seed_provider {
            join(path);
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        self.pipeline.validate().map_err(|e| e.to_string())?;
        self.bind_addr()?;
        if let SeedProviderConfig::Http(h) = &self.seed_provider {
            reqwest::Url::parse(&h.url).map_err(|e| format!("seed_provider.url: {e}"))?;
            if !(h.ids_pointer.is_empty() || h.ids_pointer.starts_with('/')) {
                return Err("seed_provider.ids_pointer must be empty or start with '/'".into());
            }
            if h.timeout_ms == 0 {
                return Err("seed_provider.timeout_ms must be positive".into());
            }
        }
        Ok(())
    }

    pub fn bind_addr(&self) -> Result<SocketAddr, String> {
        self.bind.parse().map_err(|e| format!("bind {:?}: {e}", self.bind))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, text: &str) -> PathBuf {
        let p = dir.join("config.json");
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn loads_and_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            r#"{"papers_path": "papers.jsonl", "venues_path": "/abs/venues.json",
                "seed_provider": {"kind": "offline", "path": "seeds.json"},
                "pipeline": {"k_output": 12}}"#,
        );
        let c = EngineConfig::load(&p).unwrap();
        assert_eq!(c.papers_path, dir.path().join("papers.jsonl"));
        assert_eq!(c.venues_path, Some(PathBuf::from("/abs/venues.json")));
        assert_eq!(
            c.seed_provider,
            SeedProviderConfig::Offline {
                path: dir.path().join("seeds.json")
            }
        );
        assert_eq!(c.pipeline.k_output, 12);
        assert_eq!(c.bind, DEFAULT_BIND);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let dir = tempfile::tempdir().unwrap();
        for text in [
            r#"{"papers_path": "p", "seed_provider": {"kind": "offline", "path": "s"}, "colour": 1}"#,
            r#"{"papers_path": "p", "seed_provider": {"kind": "carrier-pigeon"}}"#,
            r#"{"papers_path": "p", "seed_provider": {"kind": "offline", "path": "s"}, "bind": "nowhere"}"#,
            r#"{"papers_path": "p", "seed_provider": {"kind": "offline", "path": "s"},
                "pipeline": {"params": {"damping": 1.5}}}"#,
            r#"{"papers_path": "p", "seed_provider": {"kind": "http", "url": "not a url"}}"#,
        ] {
            let p = write(dir.path(), text);
            assert!(matches!(EngineConfig::load(&p), Err(ConfigError::Invalid { .. })), "{text}");
        }
    }

    #[test]
    fn http_provider_defaults() {
        let c: SeedProviderConfig = serde_json::from_str(r#"{"kind": "http", "url": "http://localhost/search"}"#).unwrap();
        let SeedProviderConfig::Http(h) = c else { panic!() };
        assert_eq!(h.query_param, "q");
        assert_eq!(h.timeout(), Duration::from_secs(10));
        assert_eq!(h.ids_pointer, "");
    }
}
