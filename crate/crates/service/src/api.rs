//! HTTP routes over a shared, read-only [`Engine`].

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use readpath::corpus::PaperRecord;
use readpath::pipeline::PipelineError;
use readpath::seeding::SeedError;
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};
use uuid::Uuid;

use crate::engine::{Engine, QueryRequest, QueryResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub corpus_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    /// Set for internal faults; matches the id in the server log.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error: message.into(),
                id: None,
            },
        }
    }

    fn internal(detail: &dyn std::fmt::Display) -> Self {
        let id = Uuid::new_v4().to_string();
        tracing::error!(%id, error = %detail, "request failed");
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: ErrorBody {
                error: "internal error".into(),
                id: Some(id),
            },
        }
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Seeds(SeedError::NoSeeds(_)) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
            PipelineError::Seeds(SeedError::InvalidQuery(_)) => ApiError::new(StatusCode::BAD_REQUEST, e.to_string()),
            other => ApiError::internal(&other),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

pub fn router(engine: Arc<Engine>, cors_origin: Option<&str>) -> Router {
    let origin = match cors_origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(o) => AllowOrigin::exact(o),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([axum::http::Method::GET, axum::http::Method::POST])
        .allow_headers([axum::http::header::CONTENT_TYPE]);
    Router::new()
        .route("/api/query", post(query))
        .route("/api/paper/{id}", get(paper))
        .route("/api/health", get(health))
        .layer(cors)
        .with_state(engine)
}

async fn query(
    State(engine): State<Arc<Engine>>,
    body: Result<Json<QueryRequest>, JsonRejection>,
) -> Result<Json<QueryResult>, ApiError> {
    let Json(request) = body.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.body_text()))?;
    let result = tokio::task::spawn_blocking(move || engine.query(request))
        .await
        .map_err(|e| ApiError::internal(&e))??;
    Ok(Json(result))
}

async fn paper(State(engine): State<Arc<Engine>>, Path(id): Path<String>) -> Result<Json<PaperRecord>, ApiError> {
    engine
        .corpus
        .graph
        .get(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown paper {id}")))
}

async fn health(State(engine): State<Arc<Engine>>) -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        corpus_size: engine.corpus.graph.len(),
    })
}
