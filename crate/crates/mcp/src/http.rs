use std::convert::Infallible;
use std::sync::Arc;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use futures::stream::{self, Stream};
use serde_json::Value;
use tokio::sync::broadcast;

use crate::server::McpServer;

#[derive(Clone)]
struct HttpState {
    server: Arc<McpServer>,
    notifications: broadcast::Sender<Value>,
}

/// Streamable HTTP transport at `/mcp`: `POST` carries requests, `GET`
/// opens an event stream of server notifications. No authentication.
pub fn router(server: Arc<McpServer>) -> Router {
    let (tx, _) = broadcast::channel(256);
    let sender = tx.clone();
    server.add_notifier(Arc::new(move |m: &Value| {
        let _ = sender.send(m.clone());
    }));
    Router::new()
        .route("/mcp", post(post_message).get(event_stream))
        .with_state(HttpState {
            server,
            notifications: tx,
        })
}

async fn post_message(State(state): State<HttpState>, Json(message): Json<Value>) -> Response {
    match state.server.handle(&message) {
        Some(response) => Json(response).into_response(),
        None => StatusCode::ACCEPTED.into_response(),
    }
}

async fn event_stream(State(state): State<HttpState>) -> Sse<impl Stream<Item = Result<Event, Infallible>>> {
    let rx = state.notifications.subscribe();
    let events = stream::unfold(rx, |mut rx| async move {
        loop {
            match rx.recv().await {
                Ok(m) => return Some((Ok(Event::default().event("message").data(m.to_string())), rx)),
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    });
    Sse::new(events).keep_alive(KeepAlive::default())
}
