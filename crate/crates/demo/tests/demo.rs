use std::sync::Arc;

use langbar_assistant::{AssistantConfig, ScriptedClient, ScriptedReply};
use langbar_core::{Origin, ParamKind, SteppingClock, ToolCall, ToolSpec};
use langbar_demo::{build_demo_graph, DemoAppState, HistoryKind, IncidentStatus, UpdateBody, DEMO_ROUTE_COUNT};
use proptest::prelude::*;
use serde_json::{json, Value};

fn call(name: &str, args: Value) -> ScriptedReply {
    ScriptedReply::Call(ToolCall::with_args(name, args))
}

fn demo(replies: Vec<(&str, ScriptedReply)>) -> Arc<DemoAppState> {
    let client = ScriptedClient::keyed(replies.into_iter().map(|(k, v)| (k.to_string(), v)));
    DemoAppState::new(Arc::new(client), AssistantConfig::default(), Arc::new(SteppingClock::new(0, 1)))
}

#[test]
fn graph_has_the_demo_screens() {
    let app = build_demo_graph().unwrap();
    assert_eq!(app.graph.len(), DEMO_ROUTE_COUNT);
    let card = app.graph.route("creditcard").unwrap();
    let action = card.parameters.iter().find(|p| p.name == "action").unwrap();
    assert_eq!(action.kind, ParamKind::Enum(vec!["replace".into(), "cancel".into()]));
    let transfer = app.graph.route("transfer").unwrap();
    let flag = transfer.parameters.iter().find(|p| p.name == "isNewTransfer").unwrap();
    assert_eq!(flag.kind, ParamKind::Boolean);
    assert!(!flag.required);
    let incident = app.graph.route("record_incident").unwrap();
    assert!(incident.parameters.iter().any(|p| p.name == "fire_height_m" && p.kind == ParamKind::Number));
    assert_eq!(app.graph.route("incidents").unwrap().children.len(), 6);
    assert!(app.graph.route("map").is_some());
}

#[test]
fn incident_tools_match_the_evaluation_set() {
    let app = build_demo_graph().unwrap();
    let line = include_str!("../../evalkit/fixtures/incidents_en.jsonl").lines().next().unwrap();
    let case: Value = serde_json::from_str(line).unwrap();
    let tools: Vec<ToolSpec> = serde_json::from_value(case["tools"].clone()).unwrap();
    let ours = &app.graph.route("incidents").unwrap().children;
    assert_eq!(tools.len(), ours.len());
    for (tool, route) in tools.iter().zip(ours) {
        assert_eq!(tool.name, route.name);
        assert_eq!(tool.parameters, route.parameters);
    }
}

#[test]
fn transfer_is_confirmed_against_fake_accounts() {
    let d = demo(vec![
        ("transfer 50 to Robert", call("transfer", json!({"destination": "Robert", "amount": 50}))),
        ("do it", call("confirm_transfer", json!({}))),
    ]);
    d.utterance("transfer 50 to Robert");
    let turn = d.utterance("do it");
    assert!(turn.error.is_none(), "{:?}", turn.error);
    assert_eq!(d.data().accounts[0].balance, 2400.75);
    // only a GUI change becomes a replayable action
    let items = d.history_items();
    assert_eq!(items.iter().filter(|i| i.kind == HistoryKind::GuiAction).count(), 1);
    assert!(items.last().unwrap().text.starts_with("Transferred 50 euros to Robert"));
}

#[test]
fn unknown_contact_is_reported_on_the_field() {
    let d = demo(vec![
        ("pay Zed", call("transfer", json!({"destination": "Zed", "amount": 5}))),
        ("go", call("confirm_transfer", json!({}))),
    ]);
    d.utterance("pay Zed");
    let turn = d.utterance("go");
    assert_eq!(turn.feedback.unwrap().highlight_targets, ["field:destination"]);
    assert_eq!(d.data().accounts[0].balance, 2450.75);
}

#[test]
fn incidents_are_filed_listed_and_closed() {
    let d = demo(vec![
        (
            "fire in rack B12",
            call("record_incident", json!({"incident_type": "fire", "location": "rack B12", "fire_material_type": "power cell"})),
        ),
        ("submit", call("submit_report", json!({}))),
        ("list open", call("show_incidents", json!({"status": "open"}))),
        ("read them", call("list_incidents", json!({}))),
        ("close 3", call("close_incident", json!({"incident_id": 3, "resolution": "extinguished"}))),
        ("confirm", call("confirm_close", json!({}))),
    ]);
    let turn = d.utterance("fire in rack B12");
    assert_eq!(turn.tool_call.unwrap().arguments["fire_material_type"], "battery");
    assert_eq!(d.utterance("submit").result.as_deref(), Some("Incident #3 filed."));
    d.utterance("list open");
    assert_eq!(d.utterance("read them").result.as_deref(), Some("#2 report_water_leak (open)\n#3 record_incident (open)"));
    d.utterance("close 3");
    d.utterance("confirm");
    let data = d.data();
    assert_eq!(data.incidents[2].status, IncidentStatus::Closed);
    assert_eq!(data.incidents[2].fields["fire_material_type"], "battery");
    assert_eq!(data.incidents[2].resolution.as_deref(), Some("extinguished"));
    let pushes = d.feed().since(0).into_iter().filter(|u| matches!(u.body, UpdateBody::Incidents { .. })).count();
    assert_eq!(pushes, 2);
}

#[test]
fn every_gui_turn_adds_one_action_and_an_event() {
    let d = demo(vec![
        ("card", call("creditcard", json!({}))),
        ("limit", call("creditcard", json!({"limit": 500}))),
        ("offices", call("map", json!({"show": "offices"}))),
        ("chat", ScriptedReply::Text("Sure.".into())),
    ]);
    for text in ["card", "limit", "offices", "go back", "forward", "chat"] {
        let actions = d.history_items().iter().filter(|i| i.kind == HistoryKind::GuiAction).count();
        let seq = d.feed().last_seq();
        let turn = d.utterance(text);
        let after = d.history_items().iter().filter(|i| i.kind == HistoryKind::GuiAction).count();
        let gui = turn.feedback.as_ref().is_some_and(|f| f.history_entry.is_some());
        assert_eq!(after - actions, usize::from(gui), "{text}");
        assert!(d.feed().last_seq() > seq, "{text}");
        assert!(d.history_items().iter().all(|i| i.kind != HistoryKind::GuiAction || i.link.is_some()));
    }
}

#[test]
fn assistant_and_mcp_share_the_session() {
    let d = demo(vec![]);
    d.session().dispatch_call(&ToolCall::new("map").arg("show", "atms"), Origin::User).unwrap();
    let events = d.mcp().gui_events_document();
    assert_eq!(events["events"][0]["kind"], "user_click");
    assert_eq!(d.state().view.screen_id, "map");
}

fn arb_call() -> impl Strategy<Value = ToolCall> {
    prop_oneof![
        (proptest::option::of("[A-Z][a-z]{1,6}"), proptest::option::of(1u32..5000), any::<bool>()).prop_map(|(d, a, n)| {
            let mut c = ToolCall::new("transfer");
            if let Some(d) = d {
                c = c.arg("destination", d);
            }
            if let Some(a) = a {
                c = c.arg("amount", a);
            }
            if n {
                c = c.arg("isNewTransfer", true);
            }
            c
        }),
        (proptest::option::of(0i64..20000), proptest::option::of(prop_oneof!["replace", "cancel"])).prop_map(|(l, a)| {
            let mut c = ToolCall::new("creditcard");
            if let Some(l) = l {
                c = c.arg("limit", l);
            }
            if let Some(a) = a {
                c = c.arg("action", a);
            }
            c
        }),
        prop_oneof!["offices", "atms"].prop_map(|s| ToolCall::new("map").arg("show", s)),
        (0.0f64..10.0, prop_oneof!["battery", "cable", "paper"]).prop_map(|(h, m)| {
            ToolCall::new("record_incident").arg("fire_height_m", h).arg("fire_material_type", m)
        }),
        Just(ToolCall::new("home")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn replaying_a_history_link_restores_the_view(calls in proptest::collection::vec(arb_call(), 1..5), pick in any::<prop::sample::Index>()) {
        let d = demo(vec![]);
        let mut seen = Vec::new();
        for c in &calls {
            let out = d.session().dispatch_call(c, Origin::Assistant).unwrap();
            seen.push((out.transition.link.clone(), d.session().snapshot()));
        }
        let (link, original) = &seen[pick.index(seen.len())];
        let replayed = d.replay(link).unwrap();
        prop_assert_eq!(&replayed.view.screen_id, &original.screen_id);
        prop_assert_eq!(&replayed.view.parameter_values, &original.parameter_values);
    }
}
