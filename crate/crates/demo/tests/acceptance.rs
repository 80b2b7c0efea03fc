//! Acceptance checks. Prints one PASS/FAIL line per criterion with its
//! runtime and exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use langbar_assistant::{Assistant, AssistantConfig, ModelClient, ScriptedClient, ScriptedReply};
use langbar_core::sap::{levenshtein, repair_call, RepairRule, SynonymTable};
use langbar_core::viewmodel::{apply_parameters, ViewContext};
use langbar_core::{AppModel, GuiSession, Origin, ParamValue, SteppingClock, ToolCall, ToolSpec};
use langbar_demo::{build_demo_graph, DemoAppState};
use langbar_evalkit::{mock, parse_jsonl, run_suite, score_call, EvalCase, Matcher, RunConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use serde_json::{json, Value};

/// Exact comparisons use this slack only where a division is involved.
const FLOAT_TOLERANCE: f64 = 1e-9;

type Check = Result<(), String>;

type Criterion = (&'static str, Option<Duration>, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn properties<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Check {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn demo_app() -> Arc<AppModel> {
    Arc::new(build_demo_graph().unwrap())
}

fn tool(app: &AppModel, name: &str) -> ToolSpec {
    app.graph.to_tools().into_iter().find(|t| t.name == name).unwrap()
}

fn demo(client: ScriptedClient, config: AssistantConfig) -> (Arc<DemoAppState>, Arc<ScriptedClient>) {
    let client = Arc::new(client);
    let state = DemoAppState::new(client.clone(), config, Arc::new(SteppingClock::new(0, 1)));
    (state, client)
}

fn call(name: &str, args: Value) -> ScriptedReply {
    ScriptedReply::Call(ToolCall::with_args(name, args))
}

fn metric_oracle() -> Check {
    #[derive(serde::Deserialize)]
    struct Fixture {
        tools: Vec<ToolSpec>,
        ideal: ToolCall,
        faulty: ToolCall,
        matchers: BTreeMap<String, Matcher>,
    }
    let f: Fixture = serde_json::from_str(include_str!("../../evalkit/fixtures/three_wrong_case.json")).unwrap();
    let faulty = score_call(&f.ideal, &f.faulty, &f.matchers, &f.tools);
    ensure!(faulty.mismatches.iter().all(|m| m.slot != "name") && faulty.slots == 6, "fixture shape changed: {faulty:?}");
    ensure!(faulty.accuracy() == 0.5, "3 of 6 wrong scored {}", faulty.accuracy());
    let same = score_call(&f.ideal, &f.ideal, &f.matchers, &f.tools).accuracy();
    ensure!(same == 1.0, "identity scored {same}");
    let mut extra = f.ideal.clone();
    extra.arguments.insert("people_present".into(), json!(false));
    let acc = score_call(&f.ideal, &extra, &f.matchers, &f.tools).accuracy();
    ensure!((acc - 6.0 / 7.0).abs() < FLOAT_TOLERANCE, "hallucination scored {acc}");
    Ok(())
}

fn cases() -> Vec<EvalCase> {
    let mut c = parse_jsonl(include_str!("../../evalkit/fixtures/incidents_en.jsonl")).unwrap();
    c.extend(parse_jsonl(include_str!("../../evalkit/fixtures/incidents_nl.jsonl")).unwrap());
    c
}

fn mock_end_to_end() -> Check {
    let cases = cases();
    ensure!(cases.len() == 110, "expected 55+55 cases, got {}", cases.len());
    let ideal = run_suite(&cases, &mock::ideal_echo(&cases), &RunConfig::default());
    for s in &ideal.summaries {
        ensure!(s.mean_accuracy == 1.0, "ideal echo {}: {}", s.language, s.mean_accuracy);
    }
    let mut script = mock::parse_script(include_str!("../../evalkit/fixtures/noisy_en.jsonl")).unwrap();
    script.extend(mock::parse_script(include_str!("../../evalkit/fixtures/noisy_nl.jsonl")).unwrap());
    let noisy = run_suite(&cases, &ScriptedClient::keyed(script), &RunConfig::default());
    let expected: Value = serde_json::from_str(include_str!("../../evalkit/fixtures/noisy_expected.json")).unwrap();
    for s in &noisy.summaries {
        let want = expected[s.language.code()]["mean_accuracy"].as_f64().unwrap();
        ensure!((s.mean_accuracy - want).abs() < FLOAT_TOLERANCE, "noisy {}: {} != {want}", s.language, s.mean_accuracy);
    }
    Ok(())
}

fn arb_raw_value() -> impl Strategy<Value = Value> {
    prop_oneof![
        Just(Value::Null),
        Just(json!("null")),
        any::<bool>().prop_map(Value::from),
        (-500i64..500).prop_map(Value::from),
        (-50.0f64..50.0).prop_map(Value::from),
        (-500i64..500).prop_map(|i| json!(i.to_string())),
        prop_oneof!["battery", "Batteries", "power cell", "batery", "wire", "the cable", "Fire", "High", "lo", "rack B12"]
            .prop_map(Value::from),
        "[a-z ]{0,10}".prop_map(Value::from),
    ]
}

fn arb_incident_call() -> impl Strategy<Value = ToolCall> {
    let names = prop_oneof![
        Just("incident_type"),
        Just("fire_height_m"),
        Just("fire_material_type"),
        Just("location"),
        Just("severity"),
        Just("people_present"),
        Just("hallucinated"),
    ];
    proptest::collection::vec((names, arb_raw_value()), 0..7).prop_map(|pairs| {
        let mut c = ToolCall::new("record_incident");
        for (k, v) in pairs {
            c.arguments.insert(k.to_string(), v);
        }
        c
    })
}

fn sap_suite() -> Check {
    let app = demo_app();
    let incident = tool(&app, "record_incident");
    let card = tool(&app, "creditcard");
    let synonyms = app.synonyms_for("record_incident");
    let none = SynonymTable::default();
    let examples = [
        (&incident, &synonyms, "fire_material_type", json!("power cell"), json!("battery")),
        (&incident, &synonyms, "fire_material_type", json!("Batteries"), json!("battery")),
        (&card, &none, "action", json!("replac"), json!("replace")),
        (&card, &none, "action", json!("the replace"), json!("replace")),
        (&card, &none, "limit", json!("9000"), json!(9000)),
    ];
    for (spec, table, param, raw, want) in examples {
        let (out, _) = repair_call(&ToolCall::new(&spec.name).arg(param, raw.clone()), spec, table);
        ensure!(out.arguments[param] == want, "{raw} repaired to {}", out.arguments[param]);
    }
    properties(1000, arb_incident_call(), |c| {
        let (once, _) = repair_call(&c, &incident, &synonyms);
        let (twice, log) = repair_call(&once, &incident, &synonyms);
        prop_assert_eq!(&once, &twice);
        prop_assert!(log.entries.iter().all(|e| e.rule == RepairRule::None));
        Ok(())
    })?;
    properties(1000, arb_incident_call(), |c| {
        let (out, log) = repair_call(&c, &incident, &synonyms);
        if !log.flagged() {
            prop_assert!(incident.validate(&out.arguments).is_ok(), "{:?} -> {:?}", c, out);
        }
        prop_assert!(out.arguments.keys().all(|k| c.arguments.contains_key(k)));
        Ok(())
    })
}

fn mcp_transcript() -> Check {
    let actual = common::normalize_timestamps(&common::stdio_transcript());
    let expected = std::fs::read_to_string(common::golden("mcp_session.out.jsonl")).map_err(|e| e.to_string())?;
    ensure!(actual == expected, "transcript differs from golden:\n{actual}");
    let notes = actual.lines().filter(|l| l.contains("notifications/tools/list_changed")).count();
    ensure!(notes == 1, "{notes} list_changed notifications");
    Ok(())
}

fn fastpath_bypass() -> Check {
    let (d, client) = demo(ScriptedClient::sequence([ScriptedReply::Text("Pardon?".into())]), AssistantConfig::default());
    d.session().dispatch_call(&ToolCall::new("creditcard"), Origin::User).unwrap();
    let turn = d.utterance("go back");
    ensure!(turn.fastpath.is_some() && turn.error.is_none(), "go back not handled: {turn:?}");
    ensure!(client.log().count() == 0, "model called {} times for go back", client.log().count());
    ensure!(d.session().snapshot().screen_id == "home", "go back left {}", d.session().snapshot().screen_id);
    let turn = d.utterance("backpack");
    ensure!(turn.fastpath.is_none() && client.log().count() == 1, "backpack did not reach the model");

    // direct command vs. the published match tool, from identical states
    let app = demo_app();
    for pattern in app.fastpath.patterns() {
        let input = pattern.command_id.clone();
        let prepare = || {
            let s = GuiSession::new(app.clone());
            for c in ["creditcard", "map", "transfer"] {
                s.dispatch_call(&ToolCall::new(c), Origin::User).unwrap();
            }
            s.execute_command("back", Origin::User).unwrap();
            s
        };
        let direct = prepare();
        let m = app.fastpath.match_user_input(&input).ok_or(format!("`{input}` does not match its own pattern"))?;
        direct.run_command(&m, Origin::Assistant).map_err(|e| e.message)?;
        let routed = prepare();
        let tools = routed.published_tools();
        let matcher = tools.iter().find(|t| GuiSession::is_match_tool(t.name())).ok_or("no match tool")?;
        let tool_call = ToolCall::new(matcher.name()).arg("user_input", input.clone()).arg("regexps", json!([pattern.pattern]));
        matcher.invoke(&tool_call).map_err(|e| e.message)?;
        ensure!(direct.snapshot() == routed.snapshot(), "`{input}` differs between direct and tool route");
        ensure!(direct.depth() == routed.depth(), "`{input}` history depth differs");
    }
    Ok(())
}

fn repair_semantics() -> Check {
    let (d, _) = demo(
        ScriptedClient::keyed([
            ("Transfer 50 euros to Robert".to_string(), call("transfer", json!({"destination": "Robert", "amount": 50}))),
            ("No 40".to_string(), call("transfer", json!({"amount": 40}))),
            (
                "Also transfer 50 to Mary".to_string(),
                call("transfer", json!({"destination": "Mary", "amount": 50, "isNewTransfer": true})),
            ),
        ]),
        AssistantConfig::default(),
    );
    let values = |d: &DemoAppState| d.session().snapshot().parameter_values;
    d.utterance("Transfer 50 euros to Robert");
    let depth = d.session().depth();
    let turn = d.utterance("No 40");
    ensure!(turn.error.is_none(), "{:?}", turn.error);
    let want: BTreeMap<String, ParamValue> =
        [("amount".into(), ParamValue::Number(40.0)), ("destination".into(), ParamValue::Text("Robert".into()))].into();
    ensure!(values(&d) == want, "after correction: {:?}", values(&d));
    ensure!(d.session().depth() == depth, "correction opened a new screen instance");
    d.utterance("Also transfer 50 to Mary");
    let want: BTreeMap<String, ParamValue> =
        [("amount".into(), ParamValue::Number(50.0)), ("destination".into(), ParamValue::Text("Mary".into()))].into();
    ensure!(values(&d) == want, "after new transfer: {:?}", values(&d));
    Ok(())
}

fn two_phase_calling() -> Check {
    let config = AssistantConfig {
        two_phase: true,
        ..AssistantConfig::default()
    };
    let (d, client) = demo(
        ScriptedClient::sequence([
            call("creditcard", json!({})),
            call("creditcard", json!({"limit": 1200})),
            call("map", json!({})),
            call("map", json!({"show": "atms"})),
        ]),
        config.clone(),
    );
    for text in ["set my card limit to 1200", "where are the ATMs"] {
        let before = client.log().count();
        let turn = d.utterance(text);
        ensure!(turn.error.is_none(), "{text}: {:?}", turn.error);
        ensure!(turn.model_requests == 2 && client.log().count() - before == 2, "{text}: {} requests", turn.model_requests);
    }
    let single = Arc::new(
        AppModel::from_json(
            r#"{"initial_screen": "only", "routes": [{"name": "only", "description": "The only screen",
                "parameters": [{"name": "x", "description": "", "type": "integer"}]}]}"#,
        )
        .unwrap(),
    );
    let client = Arc::new(ScriptedClient::sequence([call("only", json!({"x": 3}))]));
    let a = Assistant::new(GuiSession::new(single), client.clone(), config, Arc::new(SteppingClock::new(0, 1)));
    let turn = a.handle_utterance("x is 3");
    ensure!(turn.model_requests == 1 && client.log().count() == 1, "single tool: {} requests", turn.model_requests);
    Ok(())
}

fn arb_nav_call() -> impl Strategy<Value = ToolCall> {
    prop_oneof![
        (proptest::option::of("[A-Za-z]{1,8}"), proptest::option::of(0i64..10000))
            .prop_map(|(d, a)| ToolCall::with_args("transfer", json!({"destination": d, "amount": a}))),
        (0i64..20000).prop_map(|l| ToolCall::new("creditcard").arg("limit", l)),
        prop_oneof!["offices", "atms"].prop_map(|s| ToolCall::new("map").arg("show", s)),
        Just(ToolCall::new("home")),
    ]
    .prop_map(|mut c| {
        c.arguments.retain(|_, v| !v.is_null());
        c
    })
}

fn arb_value() -> impl Strategy<Value = ParamValue> {
    prop_oneof![
        any::<bool>().prop_map(ParamValue::Bool),
        any::<i64>().prop_map(ParamValue::Integer),
        "[a-z]{0,6}".prop_map(ParamValue::Text),
    ]
}

fn arb_args() -> impl Strategy<Value = Vec<(String, ParamValue)>> {
    proptest::collection::btree_map("[a-e]", arb_value(), 0..4).prop_map(|m| m.into_iter().collect())
}

fn arb_context() -> impl Strategy<Value = ViewContext> {
    arb_args().prop_map(|a| apply_parameters(&ViewContext::new("screen"), &a, false))
}

fn arb_scored_call() -> impl Strategy<Value = ToolCall> {
    let names = prop_oneof![Just("record_incident"), Just("report_water_leak")];
    let keys = prop_oneof!["incident_type", "severity", "location", "fire_height_m", "people_present", "extra"];
    let values = prop_oneof![
        prop_oneof!["fire", "smoke", "high", "low", "rack B12"].prop_map(Value::from),
        (0.0f64..3.0).prop_map(Value::from),
        any::<bool>().prop_map(Value::from),
    ];
    (names, proptest::collection::btree_map(keys, values, 0..5))
        .prop_map(|(n, m)| ToolCall { name: n.into(), arguments: m.into_iter().collect() })
}

fn property_suites() -> Check {
    let app = demo_app();
    properties(500, (proptest::collection::vec(arb_nav_call(), 0..3), "[a-z]{1,5}"), |(prefix, bad)| {
        let s = GuiSession::new(app.clone());
        for c in &prefix {
            s.dispatch_call(c, Origin::Assistant).unwrap();
        }
        let before = (s.snapshot(), s.depth(), s.screen_text());
        let link = format!("app://creditcard?action=cancel&limit={bad}");
        prop_assert!(s.dispatch_link(&link.parse().unwrap(), Origin::Assistant).is_err());
        prop_assert_eq!((s.snapshot(), s.depth(), s.screen_text()), before);
        Ok(())
    })
    .map_err(|e| format!("atomic dispatch: {e}"))?;
    properties(500, (arb_context(), arb_context(), arb_args()), |(s1, s2, a)| {
        let merged = apply_parameters(&s1, &a, false);
        for (k, v) in &s1.parameter_values {
            if !a.iter().any(|(ak, _)| ak == k) {
                prop_assert_eq!(merged.parameter_values.get(k), Some(v));
            }
        }
        for (k, v) in &a {
            prop_assert_eq!(merged.parameter_values.get(k), Some(v));
        }
        prop_assert_eq!(apply_parameters(&s1, &a, true), apply_parameters(&s2, &a, true));
        Ok(())
    })
    .map_err(|e| format!("merge/new instance: {e}"))?;
    properties(500, ("[a-cA-C]{0,8}", "[a-cA-C]{0,8}", "[a-cA-C]{0,8}"), |(a, b, c)| {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &b) == 0, a.to_lowercase() == b.to_lowercase());
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
        Ok(())
    })
    .map_err(|e| format!("levenshtein: {e}"))?;
    let tools = vec![tool(&app, "record_incident"), tool(&app, "report_water_leak")];
    let none = BTreeMap::new();
    properties(500, (arb_scored_call(), arb_scored_call(), arb_raw_value()), |(ideal, actual, v)| {
        let s = score_call(&ideal, &actual, &none, &tools);
        prop_assert!((0.0..=1.0).contains(&s.accuracy()));
        prop_assert_eq!(s.accuracy() == 1.0, s.mismatches.is_empty());
        let mut more = actual.clone();
        more.arguments.insert("never_declared".into(), v);
        prop_assert!(score_call(&ideal, &more, &none, &tools).accuracy() <= s.accuracy());
        Ok(())
    })
    .map_err(|e| format!("accuracy: {e}"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("metric oracle", Some(Duration::from_secs(1)), metric_oracle),
        ("mock end-to-end", Some(Duration::from_secs(10)), mock_end_to_end),
        ("SAP suite", Some(Duration::from_secs(5)), sap_suite),
        ("MCP conformance transcript", None, mcp_transcript),
        ("fastpath bypass", None, fastpath_bypass),
        ("repair semantics", None, repair_semantics),
        ("two-phase calling", None, two_phase_calling),
        ("property suites", None, property_suites),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let mut result = check();
        let took = start.elapsed();
        if let (Ok(()), Some(limit)) = (&result, limit) {
            if took > limit {
                result = Err(format!("took longer than {limit:?}"));
            }
        }
        let budget = limit.map(|l| format!(", limit {l:?}")).unwrap_or_default();
        match result {
            Ok(()) => println!("PASS  {name} ({took:.2?}{budget})"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} ({took:.2?}{budget}): {why}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
