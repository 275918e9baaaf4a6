//! Seed providers built from configuration, including the HTTP search
//! endpoint client.

use std::sync::Arc;

use readpath::seeding::{OfflineSeedProvider, QuerySpec, SeedError, SeedProvider};
use serde_json::Value;

use crate::config::{HttpProviderConfig, SeedProviderConfig};

/// Queries a JSON search endpoint. Blocking; call it off the async runtime.
#[derive(Debug, Clone)]
pub struct HttpSeedProvider {
    config: HttpProviderConfig,
}

impl HttpSeedProvider {
    pub fn new(config: HttpProviderConfig) -> Self {
        HttpSeedProvider { config }
    }

    fn extract(&self, body: &Value) -> Result<Vec<String>, SeedError> {
        let hits = body
            .pointer(&self.config.ids_pointer)
            .and_then(Value::as_array)
            .ok_or_else(|| SeedError::Provider(format!("no array at {:?}", self.config.ids_pointer)))?;
        let mut ids = Vec::with_capacity(hits.len());
        for hit in hits {
            let id = match (&self.config.id_field, hit) {
                (None, Value::String(s)) => Some(s.clone()),
                (Some(field), Value::Object(map)) => map.get(field).and_then(Value::as_str).map(str::to_string),
                _ => None,
            };
            // Hits without a usable id are skipped like unresolvable ones.
            ids.extend(id);
        }
        Ok(ids)
    }
}

impl SeedProvider for HttpSeedProvider {
    fn candidates(&self, query: &QuerySpec) -> Result<Vec<String>, SeedError> {
        let fail = |e: reqwest::Error| SeedError::Provider(e.without_url().to_string());
        let mut params = vec![(self.config.query_param.clone(), query.query_string())];
        if let Some(p) = &self.config.count_param {
            params.push((p.clone(), query.k_seeds.to_string()));
        }
        let url = reqwest::Url::parse_with_params(&self.config.url, &params)
            .map_err(|e| SeedError::Provider(e.to_string()))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(self.config.timeout())
            .build()
            .map_err(fail)?;
        let body: Value = client
            .get(url)
            .send()
            .and_then(|r| r.error_for_status())
            .and_then(|r| r.json())
            .map_err(fail)?;
        self.extract(&body)
    }
}

pub fn build_provider(config: &SeedProviderConfig) -> Result<Arc<dyn SeedProvider>, SeedError> {
    Ok(match config {
        SeedProviderConfig::Offline { path } => Arc::new(OfflineSeedProvider::from_file(path)?),
        SeedProviderConfig::Http(h) => Arc::new(HttpSeedProvider::new(h.clone())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn provider(pointer: &str, field: Option<&str>) -> HttpSeedProvider {
        HttpSeedProvider::new(HttpProviderConfig {
            url: "http://localhost/search".into(),
            query_param: "q".into(),
            count_param: None,
            ids_pointer: pointer.into(),
            id_field: field.map(str::to_string),
            timeout_ms: 100,
        })
    }

    #[test]
    fn extracts_string_hits() {
        let p = provider("/ids", None);
        assert_eq!(p.extract(&json!({"ids": ["a", "b", 3]})).unwrap(), ["a", "b"]);
        assert_eq!(provider("", None).extract(&json!(["x"])).unwrap(), ["x"]);
    }

    #[test]
    fn extracts_object_hits() {
        let p = provider("/data/results", Some("paperId"));
        let body = json!({"data": {"results": [{"paperId": "p1"}, {"title": "no id"}, {"paperId": "p2"}]}});
        assert_eq!(p.extract(&body).unwrap(), ["p1", "p2"]);
    }

    #[test]
    fn missing_array_is_a_provider_error() {
        assert!(matches!(
            provider("/ids", None).extract(&json!({"other": []})),
            Err(SeedError::Provider(_))
        ));
    }
}
