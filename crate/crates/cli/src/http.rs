//! JSON API over [`SessionService`], mounted under `/api`.
//!
//! | method | path                              | success |
//! |--------|-----------------------------------|---------|
//! | GET    | `/api/kbs`                        | 200     |
//! | POST   | `/api/sessions`                   | 201     |
//! | GET    | `/api/sessions/{id}`              | 200     |
//! | POST   | `/api/sessions/{id}/answer`       | 200     |
//! | GET    | `/api/sessions/{id}/transcript`   | 200     |
//!
//! Errors carry `{"error": ...}`; a rejected answer (422) also lists the
//! allowed values.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tower_http::services::ServeDir;

use crate::service::{ServiceError, SessionService};

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let (status, body) = match &self {
            ServiceError::NotFound(m) => (StatusCode::NOT_FOUND, json!({ "error": m })),
            ServiceError::Conflict(m) => (StatusCode::CONFLICT, json!({ "error": m })),
            ServiceError::InvalidAnswer { message, allowed } => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({ "error": message, "allowed": allowed }),
            ),
            ServiceError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, json!({ "error": m })),
        };
        (status, Json(body)).into_response()
    }
}

#[derive(Deserialize)]
struct CreateSession {
    kb: String,
}

#[derive(Deserialize)]
struct Answer {
    value: String,
}

type Shared = State<Arc<SessionService>>;

async fn list_kbs(State(svc): Shared) -> Response {
    Json(svc.list_kbs()).into_response()
}

async fn create_session(State(svc): Shared, Json(req): Json<CreateSession>) -> Response {
    match svc.create_session(&req.kb) {
        Ok(view) => (StatusCode::CREATED, Json(view)).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn get_session(State(svc): Shared, Path(id): Path<String>) -> Response {
    svc.get(&id).map(Json).into_response()
}

async fn post_answer(State(svc): Shared, Path(id): Path<String>, Json(req): Json<Answer>) -> Response {
    svc.answer(&id, &req.value).map(Json).into_response()
}

async fn get_transcript(State(svc): Shared, Path(id): Path<String>) -> Response {
    svc.transcript(&id).map(Json).into_response()
}

/// Builds the API router. Unmatched paths are served from `static_dir` when given.
pub fn router(service: Arc<SessionService>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/kbs", get(list_kbs))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/answer", post(post_answer))
        .route("/sessions/{id}/transcript", get(get_transcript))
        .with_state(service);
    let app = Router::new().nest("/api", api);
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

/// Serves until the process is killed, sweeping idle sessions every minute.
pub async fn serve(
    addr: SocketAddr,
    service: Arc<SessionService>,
    static_dir: Option<PathBuf>,
) -> std::io::Result<()> {
    let sweeper = Arc::clone(&service);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.sweep_expired();
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(service, static_dir)).await
}
