use std::convert::Infallible;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream, StreamExt};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::broadcast;

use crate::state::{DemoAppState, UiUpdate};

type AppState = Arc<DemoAppState>;

#[derive(Deserialize)]
struct UtteranceBody {
    text: String,
}

#[derive(Deserialize)]
struct DeeplinkBody {
    link: String,
}

#[derive(Deserialize)]
struct EventsQuery {
    /// Replay queued updates newer than this sequence number first.
    since: Option<u64>,
}

/// UI API plus the MCP endpoint at `/mcp`.
pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/utterance", post(utterance))
        .route("/deeplink", post(deeplink))
        .route("/state", get(current_state))
        .route("/history", get(history))
        .route("/events", get(events))
        .with_state(state.clone())
        .merge(langbar_mcp::http::router(state.mcp().clone()))
}

fn reject(status: StatusCode, reason: impl Into<String>) -> Response {
    (status, Json(json!({"error": reason.into()}))).into_response()
}

async fn utterance(State(state): State<AppState>, body: Result<Json<UtteranceBody>, JsonRejection>) -> Response {
    let text = match body {
        Ok(Json(b)) => b.text,
        Err(e) => return reject(StatusCode::BAD_REQUEST, e.body_text()),
    };
    if text.trim().is_empty() {
        return reject(StatusCode::BAD_REQUEST, "empty utterance");
    }
    // the model client blocks
    match tokio::task::spawn_blocking(move || state.utterance(&text)).await {
        Ok(turn) => Json(turn).into_response(),
        Err(e) => reject(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn deeplink(State(state): State<AppState>, body: Result<Json<DeeplinkBody>, JsonRejection>) -> Response {
    let link = match body {
        Ok(Json(b)) => b.link,
        Err(e) => return reject(StatusCode::BAD_REQUEST, e.body_text()),
    };
    match state.replay(&link) {
        Ok(out) => Json(out).into_response(),
        Err(e) => reject(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
    }
}

async fn current_state(State(state): State<AppState>) -> Response {
    Json(state.state()).into_response()
}

async fn history(State(state): State<AppState>) -> Response {
    Json(json!({
        "items": state.history_items(),
        "conversation": state.conversation(),
    }))
    .into_response()
}

fn sse(update: &UiUpdate) -> Result<Event, Infallible> {
    Ok(Event::default()
        .event("update")
        .id(update.seq.to_string())
        .json_data(update)
        .expect("updates serialize"))
}

async fn events(
    State(state): State<AppState>,
    Query(q): Query<EventsQuery>,
) -> Sse<impl Stream<Item = Result<Event, Infallible>>> {
    let rx = state.feed().subscribe();
    let backlog = q.since.map(|s| state.feed().since(s)).unwrap_or_default();
    let mut last = backlog.last().map(|u| u.seq).or(q.since).unwrap_or(0);
    let backlog = stream::iter(backlog.iter().map(sse).collect::<Vec<_>>());
    let live = stream::unfold(rx, |mut rx| async move {
        loop {
            match rx.recv().await {
                Ok(u) => return Some((u, rx)),
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    })
    .filter(move |u| {
        // skip what the backlog already delivered
        let fresh = u.seq > last;
        if fresh {
            last = u.seq;
        }
        std::future::ready(fresh)
    })
    .map(|u| sse(&u));
    Sse::new(backlog.chain(live)).keep_alive(KeepAlive::default())
}
