use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Weak};

use langbar_core::sap::repair_call;
use langbar_core::{
    BoundTool, Clock, CompositionError, GuiSession, GuiTransition, Origin, ToolCall, TransitionKind,
};
use parking_lot::Mutex;
use serde_json::{json, Map, Value};

use crate::registry::{GuiEventKind, SessionRegistry};

pub const PROTOCOL_VERSION: &str = "2025-06-18";
pub const GUI_EVENTS_URI: &str = "gui://last-gui-events";
pub const LIST_CHANGED: &str = "notifications/tools/list_changed";

/// Tool result texts longer than this are cut from the end.
pub const MAX_RESULT_BYTES: usize = 8 * 1024;
pub const TRUNCATION_MARKER: &str = "\n[truncated]";

pub const PARSE_ERROR: i64 = -32700;
pub const INVALID_REQUEST: i64 = -32600;
pub const METHOD_NOT_FOUND: i64 = -32601;
pub const INVALID_PARAMS: i64 = -32602;
pub const RESOURCE_NOT_FOUND: i64 = -32002;

pub type Notifier = Arc<dyn Fn(&Value) + Send + Sync>;

/// MCP server for one GUI session.
///
/// Tools are republished whenever the active screen changes, and each
/// republish sends exactly one `notifications/tools/list_changed` to every
/// registered notifier.
pub struct McpServer {
    session: Arc<GuiSession>,
    registry: SessionRegistry,
    initialized: AtomicBool,
    notifiers: Mutex<Vec<(u64, Notifier)>>,
    next_notifier: AtomicU64,
    exec: Mutex<()>,
    drafts_enabled: AtomicBool,
    drafts: Mutex<VecDeque<Value>>,
    name: String,
}

impl McpServer {
    pub fn for_session(session: Arc<GuiSession>, clock: Arc<dyn Clock>) -> Arc<Self> {
        let server = Arc::new(Self {
            session: session.clone(),
            registry: SessionRegistry::new(clock),
            initialized: AtomicBool::new(false),
            notifiers: Mutex::new(Vec::new()),
            next_notifier: AtomicU64::new(0),
            exec: Mutex::new(()),
            drafts_enabled: AtomicBool::new(false),
            drafts: Mutex::new(VecDeque::new()),
            name: "langbar".to_string(),
        });
        server
            .registry
            .replace_tools(session.published_tools())
            .expect("composed tool names are unique");
        let weak: Weak<Self> = Arc::downgrade(&server);
        session.subscribe(Arc::new(move |t: &GuiTransition| {
            if let Some(server) = weak.upgrade() {
                server.on_transition(t);
            }
        }));
        server
    }

    pub fn session(&self) -> &Arc<GuiSession> {
        &self.session
    }

    pub fn registry(&self) -> &SessionRegistry {
        &self.registry
    }

    pub fn is_initialized(&self) -> bool {
        self.initialized.load(Ordering::SeqCst)
    }

    /// Registers a sink for server-initiated messages. Returns an id for
    /// [`Self::remove_notifier`].
    pub fn add_notifier(&self, notifier: Notifier) -> u64 {
        let id = self.next_notifier.fetch_add(1, Ordering::SeqCst);
        self.notifiers.lock().push((id, notifier));
        id
    }

    pub fn remove_notifier(&self, id: u64) {
        self.notifiers.lock().retain(|(i, _)| *i != id);
    }

    /// Swaps the published tool set and notifies clients.
    pub fn replace_tools(&self, tools: Vec<BoundTool>) -> Result<u64, CompositionError> {
        let generation = self.registry.replace_tools(tools)?;
        self.notify(&json!({"jsonrpc": "2.0", "method": LIST_CHANGED}));
        Ok(generation)
    }

    fn notify(&self, message: &Value) {
        let sinks: Vec<Notifier> = self.notifiers.lock().iter().map(|(_, n)| n.clone()).collect();
        for n in sinks {
            n(message);
        }
    }

    /// Turns on the assistant-role draft emitter. Off by default: drafts
    /// put GUI activity into the conversation as if the assistant had said
    /// it, which a client may not expect.
    pub fn enable_assistant_drafts(&self, on: bool) {
        self.drafts_enabled.store(on, Ordering::SeqCst);
    }

    /// Pending assistant-role message drafts, oldest first.
    pub fn take_drafts(&self) -> Vec<Value> {
        self.drafts.lock().drain(..).collect()
    }

    fn on_transition(&self, t: &GuiTransition) {
        let kind = match (t.kind, t.origin) {
            (TransitionKind::Navigation, Origin::User) => Some(GuiEventKind::UserClick),
            (TransitionKind::Navigation, Origin::Assistant) => Some(GuiEventKind::Navigation),
            (TransitionKind::ParameterEdit, _) => Some(GuiEventKind::ParameterEdit),
            (TransitionKind::Reentry, _) => None,
        };
        let Some(kind) = kind else { return };
        let detail = match kind {
            GuiEventKind::ParameterEdit => t
                .applied
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(", "),
            _ => t.link.clone(),
        };
        self.registry.record(kind, t.to.clone(), detail.clone());
        if self.drafts_enabled.load(Ordering::SeqCst) {
            let text = match kind {
                GuiEventKind::ParameterEdit => format!("(GUI) {} updated: {detail}", t.to),
                _ => format!("(GUI) opened {}: {detail}", t.to),
            };
            self.drafts.lock().push_back(json!({"role": "assistant", "content": text}));
        }
        // the self tool describes the filled fields, so edits republish too
        let self_tool = self.session.app().catalog.get(&t.to).is_some_and(|s| s.meta.self_tool);
        if t.changes_screen() || self_tool {
            let _ = self.replace_tools(self.session.published_tools());
        }
    }

    /// Handles one JSON-RPC message. Returns the response, or `None` for
    /// notifications and stray responses.
    pub fn handle(&self, message: &Value) -> Option<Value> {
        let Some(obj) = message.as_object() else {
            return Some(error_response(Value::Null, INVALID_REQUEST, "expected a JSON-RPC object"));
        };
        let id = obj.get("id").cloned();
        let Some(method) = obj.get("method").and_then(Value::as_str) else {
            if obj.contains_key("result") || obj.contains_key("error") {
                return None;
            }
            return Some(error_response(id.unwrap_or(Value::Null), INVALID_REQUEST, "missing method"));
        };
        let params = obj.get("params").cloned().unwrap_or(Value::Null);
        let Some(id) = id else {
            self.handle_notification(method);
            return None;
        };
        let result = self.dispatch(method, &params);
        Some(match result {
            Ok(result) => json!({"jsonrpc": "2.0", "id": id, "result": result}),
            Err((code, message)) => error_response(id, code, &message),
        })
    }

    fn handle_notification(&self, method: &str) {
        if method == "notifications/initialized" {
            self.initialized.store(true, Ordering::SeqCst);
        }
    }

    fn dispatch(&self, method: &str, params: &Value) -> Result<Value, (i64, String)> {
        match method {
            "initialize" => return Ok(self.initialize(params)),
            "ping" => return Ok(json!({})),
            _ => {}
        }
        if !self.is_initialized() {
            return Err((INVALID_REQUEST, "session not initialized".into()));
        }
        match method {
            "tools/list" => Ok(self.list_tools()),
            "tools/call" => self.call_tool(params),
            "resources/list" => Ok(json!({"resources": [{
                "uri": GUI_EVENTS_URI,
                "name": "last-gui-events",
                "description": "Recent GUI events, oldest first",
                "mimeType": "application/json"
            }]})),
            "resources/read" => self.read_resource(params),
            other => Err((METHOD_NOT_FOUND, format!("method not found: {other}"))),
        }
    }

    fn initialize(&self, params: &Value) -> Value {
        self.initialized.store(true, Ordering::SeqCst);
        let version = params
            .get("protocolVersion")
            .and_then(Value::as_str)
            .unwrap_or(PROTOCOL_VERSION);
        json!({
            "protocolVersion": version,
            "capabilities": {
                "tools": {"listChanged": true},
                "resources": {}
            },
            "serverInfo": {"name": self.name, "version": env!("CARGO_PKG_VERSION")}
        })
    }

    /// The current tool list in MCP wire shape.
    pub fn list_tools(&self) -> Value {
        let set = self.registry.current();
        let tools: Vec<Value> = set
            .tools()
            .iter()
            .map(|t| {
                json!({
                    "name": t.spec.name,
                    "description": t.spec.description,
                    "inputSchema": t.spec.input_schema()
                })
            })
            .collect();
        json!({"tools": tools})
    }

    fn call_tool(&self, params: &Value) -> Result<Value, (i64, String)> {
        let name = params
            .get("name")
            .and_then(Value::as_str)
            .ok_or((INVALID_PARAMS, "missing tool name".to_string()))?;
        let arguments = match params.get("arguments") {
            None | Some(Value::Null) => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => return Err((INVALID_PARAMS, "arguments must be an object".into())),
        };
        let _serial = self.exec.lock();
        let set = self.registry.current();
        let tool = set
            .get(name)
            .ok_or_else(|| (INVALID_PARAMS, format!("tool not found: {name}")))?;
        let call = ToolCall {
            name: name.to_string(),
            arguments,
        };
        let synonyms = self.session.app().synonyms_for(name);
        let (repaired, _log) = repair_call(&call, &tool.spec, &synonyms);
        Ok(match tool.invoke(&repaired) {
            Ok(outcome) => tool_result(&outcome.result.text, false),
            Err(e) => {
                let text = match &e.parameter {
                    Some(p) => format!("invalid parameter `{p}`: {}", e.message),
                    None => e.message.clone(),
                };
                tool_result(&text, true)
            }
        })
    }

    /// The event ring as a JSON document, oldest first.
    pub fn gui_events_document(&self) -> Value {
        json!({"events": self.registry.events()})
    }

    fn read_resource(&self, params: &Value) -> Result<Value, (i64, String)> {
        let uri = params.get("uri").and_then(Value::as_str).unwrap_or_default();
        if uri != GUI_EVENTS_URI {
            return Err((RESOURCE_NOT_FOUND, format!("resource not found: {uri}")));
        }
        let text = serde_json::to_string(&self.gui_events_document()).expect("events serialize");
        Ok(json!({"contents": [{"uri": GUI_EVENTS_URI, "mimeType": "application/json", "text": text}]}))
    }
}

fn tool_result(text: &str, is_error: bool) -> Value {
    json!({"content": [{"type": "text", "text": truncate(text)}], "isError": is_error})
}

/// Cuts `text` to at most [`MAX_RESULT_BYTES`], marker included.
pub fn truncate(text: &str) -> String {
    if text.len() <= MAX_RESULT_BYTES {
        return text.to_string();
    }
    let mut end = MAX_RESULT_BYTES - TRUNCATION_MARKER.len();
    while !text.is_char_boundary(end) {
        end -= 1;
    }
    format!("{}{TRUNCATION_MARKER}", &text[..end])
}

pub fn error_response(id: Value, code: i64, message: &str) -> Value {
    json!({"jsonrpc": "2.0", "id": id, "error": {"code": code, "message": message}})
}
