//! HTTP routes over a [`SessionService`]. Every body is JSON and carries
//! a `v` schema version.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use seqteach::session::{EventInput, Group, SessionError, SessionService, SCHEMA_VERSION};

pub struct ApiError(SessionError);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code) = match &self.0 {
            SessionError::NoBankLoaded => (StatusCode::SERVICE_UNAVAILABLE, "no_bank_loaded"),
            SessionError::UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            SessionError::SessionFinalized(_) => (StatusCode::CONFLICT, "session_finalized"),
            SessionError::CurriculumComplete => (StatusCode::CONFLICT, "curriculum_complete"),
            SessionError::InvalidEvent(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_event"),
            SessionError::UnsupportedVersion(_) => (StatusCode::BAD_REQUEST, "unsupported_version"),
            SessionError::UnknownGroup(_) => (StatusCode::BAD_REQUEST, "unknown_group"),
            SessionError::Corrupt { .. } | SessionError::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "storage"),
        };
        let body = json!({ "v": SCHEMA_VERSION, "error": code, "message": self.0.to_string() });
        (status, Json(body)).into_response()
    }
}

type Svc = Arc<SessionService>;
type ApiResult = Result<Response, ApiError>;

fn bad_body(e: serde_json::Error) -> ApiError {
    ApiError(SessionError::InvalidEvent(format!("malformed body: {e}")))
}

/// Runs blocking store work off the async workers.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, SessionError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(SessionError::Io(std::io::Error::other(e))))?
        .map_err(ApiError)
}

#[derive(Debug, Deserialize)]
struct CreateBody {
    #[serde(default = "version")]
    v: u32,
    #[serde(default)]
    group: Option<String>,
}

fn version() -> u32 {
    SCHEMA_VERSION
}

async fn create(State(svc): State<Svc>, body: Bytes) -> ApiResult {
    let req: CreateBody = if body.iter().all(u8::is_ascii_whitespace) {
        CreateBody {
            v: SCHEMA_VERSION,
            group: None,
        }
    } else {
        serde_json::from_slice(&body).map_err(bad_body)?
    };
    if req.v != SCHEMA_VERSION {
        return Err(SessionError::UnsupportedVersion(req.v).into());
    }
    let group = req.group.map(|g| g.parse::<Group>()).transpose()?;
    let session = blocking(move || svc.create_session(group)).await?;
    Ok((StatusCode::CREATED, Json(session)).into_response())
}

async fn show(State(svc): State<Svc>, Path(id): Path<String>) -> ApiResult {
    Ok(Json(svc.session(&id)?).into_response())
}

async fn task(State(svc): State<Svc>, Path(id): Path<String>) -> ApiResult {
    let env = blocking(move || svc.next_task(&id)).await?;
    Ok(Json(env).into_response())
}

async fn record(State(svc): State<Svc>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let input: EventInput = serde_json::from_slice(&body).map_err(bad_body)?;
    let ack = blocking(move || svc.record_event(&id, input)).await?;
    Ok(Json(ack).into_response())
}

async fn finalize(State(svc): State<Svc>, Path(id): Path<String>) -> ApiResult {
    let s = blocking(move || svc.finalize(&id)).await?;
    Ok(Json(s).into_response())
}

#[derive(Debug, Deserialize)]
struct ExportQuery {
    group: Option<String>,
    format: Option<String>,
}

async fn export(State(svc): State<Svc>, Query(q): Query<ExportQuery>) -> ApiResult {
    let group = q.group.map(|g| g.parse::<Group>()).transpose()?;
    let bundle = blocking(move || svc.export(group)).await?;
    Ok(match q.format.as_deref() {
        Some("ndjson") => ([("content-type", "application/x-ndjson")], bundle.to_ndjson()).into_response(),
        _ => Json(bundle).into_response(),
    })
}

pub fn app(svc: Arc<SessionService>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/task", get(task))
        .route("/sessions/{id}/events", post(record))
        .route("/sessions/{id}/finalize", post(finalize))
        .route("/export", get(export))
        .with_state(svc)
}
