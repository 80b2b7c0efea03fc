//! Where tool calls go: straight into the GUI session, or through an MCP
//! endpoint.

use std::sync::Arc;

use langbar_core::{GuiSession, ParameterSpec, ToolCall, ToolError, ToolSpec};
use langbar_mcp::McpServer;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendMode {
    /// In-process against the session's ViewModels.
    #[default]
    Embedded,
    /// As a client of the session's MCP endpoint.
    Mcp,
}

pub trait Backend: Send + Sync {
    fn tools(&self) -> Vec<ToolSpec>;

    /// Runs a call and returns the tool result text.
    fn call(&self, call: &ToolCall) -> Result<String, ToolError>;
}

pub struct EmbeddedBackend {
    session: Arc<GuiSession>,
}

impl EmbeddedBackend {
    pub fn new(session: Arc<GuiSession>) -> Self {
        Self { session }
    }
}

impl Backend for EmbeddedBackend {
    fn tools(&self) -> Vec<ToolSpec> {
        self.session.tools().into_iter().map(|t| t.spec).collect()
    }

    fn call(&self, call: &ToolCall) -> Result<String, ToolError> {
        let tool = self
            .session
            .tools()
            .into_iter()
            .find(|t| t.name() == call.name)
            .ok_or_else(|| ToolError::new(format!("tool not found: {}", call.name)))?;
        tool.invoke(call).map(|o| o.result.text)
    }
}

/// A JSON-RPC peer.
pub trait RpcChannel: Send + Sync {
    fn request(&self, message: &Value) -> Option<Value>;
}

impl RpcChannel for McpServer {
    fn request(&self, message: &Value) -> Option<Value> {
        self.handle(message)
    }
}

pub struct McpBackend {
    channel: Arc<dyn RpcChannel>,
    next_id: std::sync::atomic::AtomicU64,
}

impl McpBackend {
    /// Performs the initialize handshake.
    pub fn connect(channel: Arc<dyn RpcChannel>) -> Result<Self, ToolError> {
        let backend = Self {
            channel,
            next_id: std::sync::atomic::AtomicU64::new(1),
        };
        backend.rpc("initialize", json!({"protocolVersion": langbar_mcp::PROTOCOL_VERSION, "capabilities": {},
            "clientInfo": {"name": "langbar-assistant", "version": env!("CARGO_PKG_VERSION")}}))?;
        backend
            .channel
            .request(&json!({"jsonrpc": "2.0", "method": "notifications/initialized"}));
        Ok(backend)
    }

    fn rpc(&self, method: &str, params: Value) -> Result<Value, ToolError> {
        let id = self.next_id.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
        let response = self
            .channel
            .request(&json!({"jsonrpc": "2.0", "id": id, "method": method, "params": params}))
            .ok_or_else(|| ToolError::new(format!("no response to {method}")))?;
        if let Some(err) = response.get("error") {
            return Err(ToolError::new(err["message"].as_str().unwrap_or("error").to_string()));
        }
        Ok(response["result"].clone())
    }
}

impl Backend for McpBackend {
    fn tools(&self) -> Vec<ToolSpec> {
        let Ok(result) = self.rpc("tools/list", json!({})) else {
            return Vec::new();
        };
        result["tools"]
            .as_array()
            .map(|tools| tools.iter().filter_map(spec_from_wire).collect())
            .unwrap_or_default()
    }

    fn call(&self, call: &ToolCall) -> Result<String, ToolError> {
        let result = self.rpc("tools/call", json!({"name": call.name, "arguments": call.arguments}))?;
        let text = result["content"]
            .as_array()
            .into_iter()
            .flatten()
            .filter_map(|c| c["text"].as_str())
            .collect::<Vec<_>>()
            .join("\n");
        if result["isError"] == true {
            return Err(ToolError {
                parameter: backticked(&text),
                message: text,
            });
        }
        Ok(text)
    }
}

fn backticked(text: &str) -> Option<String> {
    let start = text.find('`')? + 1;
    let len = text[start..].find('`')?;
    Some(text[start..start + len].to_string())
}

/// Rebuilds a tool spec from its MCP listing.
pub fn spec_from_wire(tool: &Value) -> Option<ToolSpec> {
    let mut spec = ToolSpec::new(tool["name"].as_str()?, tool["description"].as_str().unwrap_or_default());
    let schema = &tool["inputSchema"];
    let required: Vec<&str> = schema["required"]
        .as_array()
        .map(|r| r.iter().filter_map(Value::as_str).collect())
        .unwrap_or_default();
    for (name, prop) in schema["properties"].as_object().into_iter().flatten() {
        let mut p = Map::new();
        p.insert("name".into(), json!(name));
        p.insert("description".into(), prop.get("description").cloned().unwrap_or(json!("")));
        if let Some(t) = prop.get("type") {
            p.insert("type".into(), t.clone());
        }
        if let Some(e) = prop.get("enum").or_else(|| prop.get("items").and_then(|i| i.get("enum"))) {
            p.insert("enum".into(), e.clone());
        }
        p.insert("required".into(), json!(required.contains(&name.as_str())));
        spec = spec.with_param(serde_json::from_value::<ParameterSpec>(Value::Object(p)).ok()?);
    }
    Some(spec)
}
