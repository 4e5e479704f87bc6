//! HTTP API over an [`Engine`].
//!
//! Every error body is `{"code", "message", "detail"?}` with `code` from
//! [`ApiError::CODES`].

use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use rulebridge::pipeline::PipelineError;
use rulebridge::rulestore::{Accuracy, ReviewRecord, ReviewVerdict, StoreError, TranslatedRuleDoc};
use rulebridge::{Kind, Method};

use crate::engine::Engine;

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ApiError {
    pub const CODES: [&'static str; 8] = [
        "invalid-kind",
        "invalid-method",
        "invalid-request",
        "not-found",
        "revision-conflict",
        "scorer-unavailable",
        "unauthorized",
        "internal",
    ];

    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            detail: None,
        }
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid-request", message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::bad_request(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        Self::bad_request(r.body_text())
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::ScorerUnavailable(_) => {
                Self::new(StatusCode::SERVICE_UNAVAILABLE, "scorer-unavailable", e.to_string())
            }
            PipelineError::InvalidConfig(_) => Self::bad_request(e.to_string()),
            PipelineError::EmptyOntology(_) => Self::internal(e.to_string()),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match &e {
            StoreError::Conflict { stored, supplied, .. } => {
                let detail = json!({ "stored_revision": stored, "supplied_revision": supplied });
                Self::new(StatusCode::CONFLICT, "revision-conflict", e.to_string()).with_detail(detail)
            }
            StoreError::UnknownId(_) => Self::new(StatusCode::NOT_FOUND, "not-found", e.to_string()),
            StoreError::Invalid(_) => Self::bad_request(e.to_string()),
            StoreError::Io { .. } | StoreError::Corrupt { .. } => Self::internal(e.to_string()),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;
type AppState = Arc<Engine>;

fn parse_kind(s: &str) -> ApiResult<Kind> {
    s.parse()
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "invalid-kind", format!("unknown kind {s:?}")))
}

fn parse_method(s: &str) -> ApiResult<Method> {
    s.parse()
        .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "invalid-method", format!("unknown method {s:?}")))
}

fn authorize(engine: &Engine, headers: &HeaderMap) -> ApiResult<()> {
    let Some(expected) = &engine.config.server.token else {
        return Ok(());
    };
    let supplied = headers
        .get("authorization")
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "));
    if supplied == Some(expected.as_str()) {
        Ok(())
    } else {
        Err(ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", "missing or wrong bearer token"))
    }
}

pub fn router(engine: AppState) -> Router {
    let mut app = Router::new()
        .route("/api/health", get(health))
        .route("/api/catalog/{kind}", get(catalog))
        .route("/api/translate", post(translate))
        .route("/api/results", get(results))
        .route("/api/reviews", get(list_reviews).post(record_review))
        .route("/api/rules/{id}", get(get_rule).put(put_rule));
    if let Some(dir) = &engine.config.server.ui_dir {
        app = app.nest_service("/ui", ServeDir::new(dir));
    }
    app.fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not-found", "no such endpoint") })
        .with_state(engine)
}

async fn health(State(engine): State<AppState>) -> Json<Value> {
    let (triggers, actions) = engine
        .catalog
        .as_ref()
        .map_or((0, 0), |c| (c.triggers.len(), c.actions.len()));
    let snapshot = engine.store.snapshot();
    Json(json!({
        "status": "ok",
        "triggers": triggers,
        "actions": actions,
        "ontology": {
            "triggers": engine.ontology.triggers.len(),
            "actions": engine.ontology.actions.len(),
        },
        "vectors": engine.vectors.len(),
        "rules": snapshot.rules.len(),
        "reviews": snapshot.reviews.len(),
    }))
}

async fn catalog(State(engine): State<AppState>, Path(kind): Path<String>) -> ApiResult<Json<Value>> {
    let kind = parse_kind(&kind)?;
    let terms = engine.catalog.as_ref().map(|c| c.terms(kind).to_vec()).unwrap_or_default();
    let ontology: Vec<&str> = engine.ontology.terms(kind).iter().map(|t| t.name.as_str()).collect();
    Ok(Json(json!({ "kind": kind, "terms": terms, "ontology": ontology })))
}

#[derive(Deserialize)]
struct TranslateRequest {
    name: String,
    kind: String,
    method: Option<String>,
    top_n: Option<usize>,
}

async fn translate(
    State(engine): State<AppState>,
    body: Result<Json<TranslateRequest>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let Json(req) = body?;
    let kind = parse_kind(&req.kind)?;
    let method = match &req.method {
        Some(m) => parse_method(m)?,
        None => engine.config.pipeline.method,
    };
    if req.name.trim().is_empty() {
        return Err(ApiError::bad_request("name must not be empty"));
    }
    let result = tokio::task::spawn_blocking(move || engine.translate(&req.name, kind, method, req.top_n))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(serde_json::to_value(result).map_err(|e| ApiError::internal(e.to_string()))?))
}

#[derive(Deserialize)]
struct ResultsQuery {
    kind: Option<String>,
    name: Option<String>,
}

async fn results(
    State(engine): State<AppState>,
    query: Result<Query<ResultsQuery>, QueryRejection>,
) -> ApiResult<Json<Value>> {
    let Query(q) = query?;
    let kind = q.kind.as_deref().map(parse_kind).transpose()?;
    let found = engine.stored_results(q.name.as_deref(), kind);
    if q.name.is_some() && found.is_empty() {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "not-found", "no stored result for that term"));
    }
    Ok(Json(serde_json::to_value(found).map_err(|e| ApiError::internal(e.to_string()))?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReviewRequest {
    source_name: String,
    kind: String,
    verdict: String,
    candidate: Option<String>,
    accuracy: Option<Accuracy>,
    method: Option<String>,
    reviewer: Option<String>,
}

async fn record_review(
    State(engine): State<AppState>,
    headers: HeaderMap,
    body: Result<Json<ReviewRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<ReviewRecord>)> {
    authorize(&engine, &headers)?;
    let Json(req) = body?;
    let kind = parse_kind(&req.kind)?;
    let method = req.method.as_deref().map(parse_method).transpose()?;
    let verdict = match (req.verdict.as_str(), req.candidate) {
        ("chosen", Some(candidate)) => {
            if !engine.ontology.contains(&candidate, kind) {
                return Err(ApiError::bad_request(format!("{candidate:?} is not an ontology {kind}")));
            }
            ReviewVerdict::Chosen { candidate }
        }
        ("chosen", None) => return Err(ApiError::bad_request("verdict \"chosen\" needs a candidate")),
        ("none_suitable", _) => ReviewVerdict::NoneSuitable,
        (other, _) => return Err(ApiError::bad_request(format!("unknown verdict {other:?}"))),
    };
    let review = ReviewRecord {
        source_name: req.source_name,
        kind,
        verdict,
        accuracy: req.accuracy,
        method,
        reviewer: req.reviewer.unwrap_or_else(|| "anonymous".to_string()),
        created_at: Utc::now(),
    };
    engine.store.record_review(&review)?;
    Ok((StatusCode::CREATED, Json(review)))
}

async fn list_reviews(State(engine): State<AppState>) -> Json<Vec<ReviewRecord>> {
    Json(engine.store.list_reviews())
}

async fn get_rule(State(engine): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<TranslatedRuleDoc>> {
    Ok(Json(engine.store.get_rule(&id)?))
}

async fn put_rule(
    State(engine): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Result<Json<TranslatedRuleDoc>, JsonRejection>,
) -> ApiResult<Json<TranslatedRuleDoc>> {
    authorize(&engine, &headers)?;
    let Json(doc) = body?;
    if doc.id != id {
        return Err(ApiError::bad_request(format!("path id {id:?} does not match document id {:?}", doc.id)));
    }
    engine.store.put_rule(&doc)?;
    Ok(Json(engine.store.get_rule(&id)?))
}

/// Binds `addr` and serves until interrupted.
pub async fn serve(engine: Engine, addr: &str) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(Arc::new(engine)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
