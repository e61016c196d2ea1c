//! HTTP routes over a shared [`JudgeStore`].

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::error::JudgeError;
use crate::store::{CreateRequest, JudgeStore, Next, VerdictRequest};

pub type SharedStore = Arc<RwLock<JudgeStore>>;

impl JudgeError {
    pub fn status(&self) -> StatusCode {
        match self {
            JudgeError::UnknownSession(_) | JudgeError::UnknownItem(_) => StatusCode::NOT_FOUND,
            JudgeError::SessionClosed(_) | JudgeError::SessionOpen(_) | JudgeError::RepeatJudge(_) => {
                StatusCode::CONFLICT
            }
            JudgeError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        }
    }
}

impl IntoResponse for JudgeError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.to_string() });
        if let JudgeError::IncompleteJudging(missing) = &self {
            body["unanswered"] = json!(missing);
        }
        (self.status(), Json(body)).into_response()
    }
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, JudgeError> {
    serde_json::from_slice(body).map_err(|e| JudgeError::Invalid(e.to_string()))
}

fn poisoned() -> JudgeError {
    JudgeError::Storage("store lock poisoned".into())
}

async fn create(State(store): State<SharedStore>, body: Bytes) -> Result<Response, JudgeError> {
    let request: CreateRequest = parse(&body)?;
    let id = store.write().map_err(|_| poisoned())?.create_session(request)?;
    Ok((StatusCode::CREATED, Json(json!({ "session_id": id }))).into_response())
}

async fn next(
    State(store): State<SharedStore>,
    UrlPath(id): UrlPath<String>,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Response, JudgeError> {
    let judge = query
        .get("judge")
        .filter(|j| !j.is_empty())
        .ok_or_else(|| JudgeError::Invalid("missing `judge` query parameter".into()))?;
    let next = store.read().map_err(|_| poisoned())?.next_item(&id, judge)?;
    Ok(match next {
        Next::Item(item) => Json(item).into_response(),
        Next::Done => StatusCode::NO_CONTENT.into_response(),
    })
}

async fn verdict(
    State(store): State<SharedStore>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Response, JudgeError> {
    let request: VerdictRequest = parse(&body)?;
    let accepted = store.write().map_err(|_| poisoned())?.submit_verdict(&id, request)?;
    Ok(Json(json!({ "accepted": accepted })).into_response())
}

async fn close(State(store): State<SharedStore>, UrlPath(id): UrlPath<String>) -> Result<Response, JudgeError> {
    let result = store.write().map_err(|_| poisoned())?.close_session(&id)?;
    Ok(Json(result).into_response())
}

async fn result(State(store): State<SharedStore>, UrlPath(id): UrlPath<String>) -> Result<Response, JudgeError> {
    let guard = store.read().map_err(|_| poisoned())?;
    Ok(Json(guard.result(&id)?).into_response())
}

pub fn router(store: SharedStore, ui: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/next", get(next))
        .route("/sessions/{id}/verdicts", post(verdict))
        .route("/sessions/{id}/close", post(close))
        .route("/sessions/{id}/result", get(result))
        .with_state(store);
    match ui {
        Some(dir) => api.nest_service("/ui", tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

/// Replay the log and serve on `listener` until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, log: &Path, ui: Option<&Path>) -> Result<(), JudgeError> {
    let store = JudgeStore::open(log)?;
    let app = router(Arc::new(RwLock::new(store)), ui);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| JudgeError::Storage(e.to_string()))
}
