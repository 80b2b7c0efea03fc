use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use langbar_assistant::{ChatMessage, ChatRequest, HttpClient, ModelClient, ModelError, ToolDef};
use langbar_core::{ParamKind, ParameterSpec, ToolCall, ToolSpec};
use serde_json::{json, Value};

/// Serves one canned response and hands back the request body.
fn serve_once(status: &'static str, body: Value) -> (String, thread::JoinHandle<Value>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut length = 0;
        let mut auth = String::new();
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            let lower = line.to_ascii_lowercase();
            if let Some(v) = lower.strip_prefix("content-length:") {
                length = v.trim().parse().unwrap();
            }
            if lower.starts_with("authorization:") {
                auth = line.trim().to_string();
            }
            if line == "\r\n" {
                break;
            }
        }
        let mut buf = vec![0; length];
        reader.read_exact(&mut buf).unwrap();
        let text = body.to_string();
        let mut stream = stream;
        write!(
            stream,
            "HTTP/1.1 {status}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{text}",
            text.len()
        )
        .unwrap();
        let mut received: Value = serde_json::from_slice(&buf).unwrap();
        received["_auth"] = json!(auth);
        received
    });
    (url, handle)
}

#[test]
fn round_trip_against_local_endpoint() {
    let (url, server) = serve_once(
        "200 OK",
        json!({"id": "c1", "object": "chat.completion", "model": "m", "choices": [{"index": 0,
            "finish_reason": "tool_calls", "message": {"role": "assistant", "content": null, "tool_calls": [
                {"id": "t1", "type": "function", "function": {"name": "creditcard", "arguments": "{\"limit\":9000}"}}]}}]}),
    );
    let client = HttpClient::new(url, Duration::from_secs(5)).unwrap().with_api_key("secret");
    let spec = ToolSpec::new("creditcard", "Show your credit card")
        .with_param(ParameterSpec::new("limit", "Card limit", ParamKind::Integer));
    let request = ChatRequest::new("local-model", vec![ChatMessage::user("raise my limit to 9000")])
        .with_tools(vec![ToolDef::from_spec(&spec)]);
    let response = client.complete(&request).unwrap();
    assert_eq!(response.first_tool_call().unwrap(), Some(ToolCall::new("creditcard").arg("limit", 9000)));
    assert_eq!(client.log().count(), 1);
    assert_eq!(client.log().latencies().len(), 1);

    let sent = server.join().unwrap();
    assert_eq!(sent["model"], "local-model");
    assert_eq!(sent["tools"][0]["type"], "function");
    assert_eq!(sent["tools"][0]["function"]["parameters"]["properties"]["limit"]["type"], "integer");
    assert_eq!(sent["_auth"], "authorization: Bearer secret");
}

#[test]
fn error_status_is_reported() {
    let (url, server) = serve_once("503 Service Unavailable", json!({"error": "loading"}));
    let client = HttpClient::new(url, Duration::from_secs(5)).unwrap();
    let err = client.complete(&ChatRequest::new("m", vec![ChatMessage::user("hi")])).unwrap_err();
    assert!(matches!(err, ModelError::Status { status: 503, .. }));
    server.join().unwrap();
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let client = HttpClient::new(format!("http://127.0.0.1:{port}/x"), Duration::from_secs(2)).unwrap();
    let err = client.complete(&ChatRequest::new("m", vec![])).unwrap_err();
    assert!(matches!(err, ModelError::Transport(_)));
    assert_eq!(client.log().count(), 1);
}
