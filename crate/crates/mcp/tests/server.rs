use std::io::Cursor;
use std::sync::Arc;

use langbar_core::{AppConfig, AppModel, BoundTool, GuiSession, Origin, SteppingClock, ToolCall, ToolOutcome, ToolResult, ToolSpec};
use langbar_mcp::{stdio, GuiEventKind, McpServer, GUI_EVENTS_URI, LIST_CHANGED};
use parking_lot::Mutex;
use serde_json::{json, Value};

fn app() -> Arc<AppModel> {
    let config: AppConfig = serde_json::from_value(json!({
        "initial_screen": "home",
        "routes": [
            {"name": "home", "description": "Home", "children": [
                {"name": "transfer", "description": "Transfer money", "parameters": [
                    {"name": "destination", "description": "Recipient", "type": "string"},
                    {"name": "amount", "description": "Amount in euros", "type": "number"},
                    {"name": "isNewTransfer", "description": "Start a new transfer", "type": "boolean"}
                ]}
            ]},
            {"name": "creditcard", "description": "Show your credit card", "parameters": [
                {"name": "limit", "description": "Card limit", "type": "integer"},
                {"name": "action", "description": "Card action", "enum": ["replace", "cancel"]}
            ]}
        ],
        "screens": {"transfer": {"new_instance_flag": "isNewTransfer"}},
        "synonyms": {"creditcard": {"cancel": ["block"]}}
    }))
    .unwrap();
    Arc::new(AppModel::from_config(config).unwrap())
}

struct Fixture {
    server: Arc<McpServer>,
    sent: Arc<Mutex<Vec<Value>>>,
}

fn fixture() -> Fixture {
    let session = GuiSession::new(app());
    let server = McpServer::for_session(session, Arc::new(SteppingClock::new(1_000, 10)));
    let sent = Arc::new(Mutex::new(Vec::new()));
    let sink = sent.clone();
    server.add_notifier(Arc::new(move |m: &Value| sink.lock().push(m.clone())));
    let f = Fixture { server, sent };
    f.request("initialize", json!({"protocolVersion": "2025-06-18"}));
    f
}

impl Fixture {
    fn request(&self, method: &str, params: Value) -> Value {
        self.server
            .handle(&json!({"jsonrpc": "2.0", "id": 1, "method": method, "params": params}))
            .unwrap()
    }

    fn call(&self, name: &str, args: Value) -> Value {
        self.request("tools/call", json!({"name": name, "arguments": args}))
    }

    fn names(&self) -> Vec<String> {
        self.request("tools/list", json!({}))["result"]["tools"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| t["name"].as_str().unwrap().to_string())
            .collect()
    }

    fn events(&self) -> Value {
        let r = self.request("resources/read", json!({"uri": GUI_EVENTS_URI}));
        serde_json::from_str(r["result"]["contents"][0]["text"].as_str().unwrap()).unwrap()
    }

    fn notifications(&self) -> usize {
        self.sent.lock().iter().filter(|m| m["method"] == LIST_CHANGED).count()
    }
}

#[test]
fn requests_before_initialize_are_rejected() {
    let server = McpServer::for_session(GuiSession::new(app()), Arc::new(SteppingClock::new(0, 1)));
    let r = server
        .handle(&json!({"jsonrpc": "2.0", "id": 7, "method": "tools/list"}))
        .unwrap();
    assert_eq!(r["error"]["code"], -32600);
    assert_eq!(r["id"], 7);
    assert!(server.handle(&json!({"jsonrpc": "2.0", "method": "notifications/initialized"})).is_none());
    assert!(server.handle(&json!({"jsonrpc": "2.0", "id": 8, "method": "tools/list"})).unwrap()["result"].is_object());
}

#[test]
fn list_renders_json_schema_with_enum() {
    let f = fixture();
    let r = f.request("tools/list", json!({}));
    let tools = r["result"]["tools"].as_array().unwrap();
    let card = tools.iter().find(|t| t["name"] == "creditcard").unwrap();
    assert_eq!(card["inputSchema"]["type"], "object");
    assert_eq!(card["inputSchema"]["properties"]["action"]["enum"], json!(["replace", "cancel"]));
    assert_eq!(card["inputSchema"]["properties"]["limit"]["type"], "integer");
    assert_eq!(f.names(), ["home", "transfer", "creditcard"]);
}

#[test]
fn call_navigates_records_and_notifies_once() {
    let f = fixture();
    let r = f.call("creditcard", json!({"limit": 9000}));
    assert_eq!(r["result"]["isError"], false);
    assert!(r["result"]["content"][0]["text"].as_str().unwrap().contains("limit: 9000"));
    assert_eq!(f.notifications(), 1);
    assert_eq!(f.names(), ["creditcard", "home", "transfer"]);
    let events = f.events();
    assert_eq!(events["events"].as_array().unwrap().len(), 1);
    assert_eq!(events["events"][0]["kind"], "navigation");
    assert_eq!(events["events"][0]["screen_id"], "creditcard");

    // a parameter edit on the same screen is an event but no republish
    f.call("creditcard", json!({"action": "cancel"}));
    assert_eq!(f.notifications(), 1);
    assert_eq!(f.events()["events"][1]["kind"], "parameter_edit");
    assert_eq!(f.events()["events"][1]["detail"], "action=cancel");
}

#[test]
fn two_navigations_send_two_notifications_in_order() {
    let f = fixture();
    f.call("transfer", json!({}));
    let after_first = f.sent.lock().len();
    f.call("creditcard", json!({}));
    assert_eq!(f.notifications(), 2);
    assert_eq!(after_first, 1);
    let events = f.events();
    let screens: Vec<_> = events["events"].as_array().unwrap().iter().map(|e| e["screen_id"].clone()).collect();
    assert_eq!(screens, [json!("transfer"), json!("creditcard")]);
}

#[test]
fn notification_count_matches_successful_replacements() {
    let f = fixture();
    let start = f.server.registry().generation();
    let same = f.server.session().published_tools();
    f.server.replace_tools(same).unwrap();
    let dup = vec![
        BoundTool::new(ToolSpec::new("x", "x"), "a", |_| Ok(ToolOutcome { result: ToolResult::new(""), transition: None })),
        BoundTool::new(ToolSpec::new("x", "x"), "b", |_| Ok(ToolOutcome { result: ToolResult::new(""), transition: None })),
    ];
    assert!(f.server.replace_tools(dup).is_err());
    assert_eq!(f.server.registry().generation(), start + 1);
    assert_eq!(f.notifications(), 1);
}

#[test]
fn unknown_and_stale_tools_are_not_found() {
    let f = fixture();
    let r = f.call("no_such_tool", json!({}));
    assert_eq!(r["error"]["code"], -32602);
    assert!(r["error"]["message"].as_str().unwrap().contains("tool not found"));

    let extra = BoundTool::new(ToolSpec::new("stamp", "Stamp the transfer"), "transfer", |_| {
        Ok(ToolOutcome { result: ToolResult::new("stamped"), transition: None })
    });
    f.server.session().add_local_tool("transfer", extra);
    f.call("transfer", json!({}));
    assert!(f.names().contains(&"stamp".to_string()));
    assert_eq!(f.call("stamp", json!({}))["result"]["content"][0]["text"], "stamped");
    f.call("home", json!({}));
    let r = f.call("stamp", json!({}));
    assert!(r["error"]["message"].as_str().unwrap().contains("tool not found: stamp"));
}

#[test]
fn handler_errors_name_the_parameter() {
    let f = fixture();
    let r = f.call("creditcard", json!({"limit": "lots"}));
    assert_eq!(r["result"]["isError"], true);
    assert!(r["result"]["content"][0]["text"].as_str().unwrap().contains("`limit`"));
    let r = f.call("creditcard", json!({"action": "explode"}));
    assert_eq!(r["result"]["isError"], true);
    assert!(r["result"]["content"][0]["text"].as_str().unwrap().contains("`action`"));
    assert_eq!(f.server.session().snapshot().screen_id, "home");
}

#[test]
fn arguments_are_repaired_before_dispatch() {
    let f = fixture();
    let r = f.call("creditcard", json!({"limit": "9000", "action": "the Block"}));
    assert_eq!(r["result"]["isError"], false, "{r}");
    let text = r["result"]["content"][0]["text"].as_str().unwrap();
    assert!(text.contains("limit: 9000") && text.contains("action: cancel"), "{text}");
}

#[test]
fn ring_keeps_last_fifty_and_reads_are_pure() {
    let f = fixture();
    let session = f.server.session().clone();
    for i in 0..60 {
        let target = if i % 2 == 0 { "creditcard" } else { "home" };
        session.dispatch_call(&ToolCall::new(target), Origin::User).unwrap();
    }
    let a = f.events();
    let b = f.events();
    assert_eq!(a, b);
    let events = a["events"].as_array().unwrap();
    assert_eq!(events.len(), 50);
    // events 0..10 (creditcard, home, ...) were evicted; the 11th was creditcard
    assert_eq!(events[0]["screen_id"], "creditcard");
    assert!(events.iter().all(|e| e["kind"] == "user_click"));
    let ts: Vec<u64> = events.iter().map(|e| e["timestamp"].as_u64().unwrap()).collect();
    assert!(ts.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(f.server.registry().events()[0].kind, GuiEventKind::UserClick);
}

#[test]
fn unknown_resource_and_method() {
    let f = fixture();
    assert_eq!(f.request("resources/read", json!({"uri": "gui://nope"}))["error"]["code"], -32002);
    assert_eq!(f.request("sampling/createMessage", json!({}))["error"]["code"], -32601);
    let list = f.request("resources/list", json!({}));
    assert_eq!(list["result"]["resources"][0]["uri"], GUI_EVENTS_URI);
}

#[test]
fn assistant_drafts_are_off_by_default() {
    let f = fixture();
    f.call("creditcard", json!({}));
    assert!(f.server.take_drafts().is_empty());
    f.server.enable_assistant_drafts(true);
    f.call("home", json!({}));
    let drafts = f.server.take_drafts();
    assert_eq!(drafts.len(), 1);
    assert_eq!(drafts[0]["role"], "assistant");
}

#[test]
fn registry_swap_is_atomic_under_concurrent_lists() {
    let f = fixture();
    let a = f.names();
    f.call("creditcard", json!({}));
    let b = f.names();
    let server = f.server.clone();
    let writer = std::thread::spawn(move || {
        for i in 0..200 {
            let target = if i % 2 == 0 { "transfer" } else { "creditcard" };
            server.session().dispatch_call(&ToolCall::new(target), Origin::Assistant).unwrap();
        }
    });
    let c = vec!["transfer".to_string(), "home".into(), "creditcard".into()];
    for _ in 0..2000 {
        let seen = f.names();
        assert!(seen == a || seen == b || seen == c, "mixed list {seen:?}");
    }
    writer.join().unwrap();
}

#[test]
fn stdio_interleaves_notifications_with_responses() {
    let server = McpServer::for_session(GuiSession::new(app()), Arc::new(SteppingClock::new(0, 1)));
    let input = [
        json!({"jsonrpc": "2.0", "id": 1, "method": "initialize", "params": {}}),
        json!({"jsonrpc": "2.0", "method": "notifications/initialized"}),
        json!({"jsonrpc": "2.0", "id": 2, "method": "tools/call", "params": {"name": "transfer", "arguments": {}}}),
    ]
    .iter()
    .map(|v| v.to_string())
    .collect::<Vec<_>>()
    .join("\n")
        + "\nnot json\n";
    #[derive(Clone)]
    struct Shared(Arc<Mutex<Vec<u8>>>);
    impl std::io::Write for Shared {
        fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
            self.0.lock().extend_from_slice(buf);
            Ok(buf.len())
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }
    let out = Shared(Arc::new(Mutex::new(Vec::new())));
    stdio::serve(&server, Cursor::new(input), out.clone()).unwrap();
    let text = String::from_utf8(out.0.lock().clone()).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["id"], 1);
    assert_eq!(lines[1]["method"], LIST_CHANGED);
    assert_eq!(lines[2]["id"], 2);
    assert_eq!(lines[3]["error"]["code"], -32700);
}
