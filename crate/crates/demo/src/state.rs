use std::collections::VecDeque;
use std::sync::Arc;

use langbar_assistant::{Assistant, AssistantConfig, AssistantTurn, ConversationEntry, ModelClient};
use langbar_core::{
    BoundTool, Clock, DispatchError, GuiSession, GuiTransition, ParamKind, ParameterSpec, ToolError, ToolOutcome,
    ToolResult, ToolSpec, ViewContext,
};
use langbar_mcp::McpServer;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::sync::broadcast;

use crate::app::build_demo_graph;
use crate::data::{DemoData, Incident, IncidentStatus};

/// Updates kept for clients that reconnect and ask for what they missed.
pub const FEED_CAPACITY: usize = 256;

const REPORT_SCREENS: [&str; 4] = ["record_incident", "report_water_leak", "report_power_failure", "request_assistance"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistoryKind {
    User,
    AssistantText,
    GuiAction,
}

/// One line of the language-bar history panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UiHistoryItem {
    pub kind: HistoryKind,
    pub text: String,
    /// Replay link; always set for `gui_action` items.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum UpdateBody {
    /// The GUI state changed.
    Screen {
        screen_id: String,
        link: String,
        screen_changed: bool,
    },
    /// Feedback to render for a finished turn or replay.
    Feedback {
        speech_text: String,
        highlight_targets: Vec<String>,
        history_append: Vec<UiHistoryItem>,
    },
    Incidents { incidents: Vec<Incident> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UiUpdate {
    pub seq: u64,
    #[serde(flatten)]
    pub body: UpdateBody,
}

/// Ordered UI updates, fanned out to every subscriber.
pub struct Feed {
    queue: Mutex<(u64, VecDeque<UiUpdate>)>,
    tx: broadcast::Sender<UiUpdate>,
}

impl Feed {
    fn new() -> Self {
        Self {
            queue: Mutex::new((0, VecDeque::new())),
            tx: broadcast::channel(FEED_CAPACITY).0,
        }
    }

    pub fn push(&self, body: UpdateBody) -> u64 {
        let mut q = self.queue.lock();
        q.0 += 1;
        let update = UiUpdate { seq: q.0, body };
        if q.1.len() == FEED_CAPACITY {
            q.1.pop_front();
        }
        q.1.push_back(update.clone());
        // sent under the lock so subscribers see sequence order
        let _ = self.tx.send(update);
        q.0
    }

    /// Queued updates with `seq > after`.
    pub fn since(&self, after: u64) -> Vec<UiUpdate> {
        self.queue.lock().1.iter().filter(|u| u.seq > after).cloned().collect()
    }

    pub fn last_seq(&self) -> u64 {
        self.queue.lock().0
    }

    pub fn subscribe(&self) -> broadcast::Receiver<UiUpdate> {
        self.tx.subscribe()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateView {
    pub view: ViewContext,
    pub screen_text: String,
    pub link: String,
    pub data: DemoData,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayOutcome {
    pub view: ViewContext,
    pub screen_text: String,
    pub link: String,
}

/// Backend state for one demo user: GUI session, assistant, MCP endpoint,
/// fake data and the UI update feed.
pub struct DemoAppState {
    session: Arc<GuiSession>,
    assistant: Assistant,
    mcp: Arc<McpServer>,
    data: Arc<Mutex<DemoData>>,
    feed: Arc<Feed>,
    history: Mutex<Vec<UiHistoryItem>>,
}

impl DemoAppState {
    pub fn new(client: Arc<dyn ModelClient>, config: AssistantConfig, clock: Arc<dyn Clock>) -> Arc<Self> {
        let app = build_demo_graph().expect("shipped demo config is valid");
        let session = GuiSession::new(Arc::new(app));
        let data = Arc::new(Mutex::new(DemoData::seeded()));
        let feed = Arc::new(Feed::new());
        register_local_tools(&session, &data, &feed);
        let sink = feed.clone();
        session.subscribe(Arc::new(move |t: &GuiTransition| {
            sink.push(UpdateBody::Screen {
                screen_id: t.to.clone(),
                link: t.link.clone(),
                screen_changed: t.changes_screen(),
            });
        }));
        let mcp = McpServer::for_session(session.clone(), clock.clone());
        let assistant = Assistant::new(session.clone(), client, config, clock);
        Arc::new(Self {
            session,
            assistant,
            mcp,
            data,
            feed,
            history: Mutex::new(Vec::new()),
        })
    }

    pub fn session(&self) -> &Arc<GuiSession> {
        &self.session
    }

    pub fn assistant(&self) -> &Assistant {
        &self.assistant
    }

    pub fn mcp(&self) -> &Arc<McpServer> {
        &self.mcp
    }

    pub fn feed(&self) -> &Arc<Feed> {
        &self.feed
    }

    pub fn data(&self) -> DemoData {
        self.data.lock().clone()
    }

    pub fn state(&self) -> StateView {
        StateView {
            view: self.session.snapshot(),
            screen_text: self.session.screen_text(),
            link: self.session.current_link(),
            data: self.data(),
        }
    }

    pub fn history_items(&self) -> Vec<UiHistoryItem> {
        self.history.lock().clone()
    }

    pub fn conversation(&self) -> Vec<ConversationEntry> {
        self.assistant.history()
    }

    /// Runs one utterance and publishes its feedback. Blocks on the model.
    pub fn utterance(&self, text: &str) -> AssistantTurn {
        let turn = self.assistant.handle_utterance(text);
        let mut items = vec![UiHistoryItem {
            kind: HistoryKind::User,
            text: turn.utterance.clone(),
            link: None,
        }];
        let (speech, targets) = match &turn.feedback {
            Some(f) => (f.speech_text.clone(), f.highlight_targets.clone()),
            None => (turn.assistant_text.clone().or_else(|| turn.result.clone()).unwrap_or_default(), Vec::new()),
        };
        match turn.feedback.as_ref().and_then(|f| f.history_entry.clone()) {
            Some(link) if turn.error.is_none() => items.push(UiHistoryItem {
                kind: HistoryKind::GuiAction,
                text: speech.clone(),
                link: Some(link),
            }),
            _ if !speech.is_empty() => items.push(UiHistoryItem {
                kind: HistoryKind::AssistantText,
                text: speech.clone(),
                link: None,
            }),
            _ => {}
        }
        self.publish(speech, targets, items);
        turn
    }

    /// Replays a history link. Rejected links leave the state untouched.
    pub fn replay(&self, link: &str) -> Result<ReplayOutcome, DispatchError> {
        let out = self.session.replay(link)?;
        let t = &out.transition;
        let screen = self.session.app().catalog.get(&t.to);
        let speech = screen.map(|s| s.navigation_phrase(&self.session.snapshot())).unwrap_or_default();
        let targets = vec![format!("nav:{}", t.to)];
        let item = UiHistoryItem {
            kind: HistoryKind::GuiAction,
            text: speech.clone(),
            link: Some(t.link.clone()),
        };
        self.publish(speech, targets, vec![item]);
        Ok(ReplayOutcome {
            view: self.session.snapshot(),
            screen_text: out.result.text,
            link: t.link.clone(),
        })
    }

    fn publish(&self, speech_text: String, highlight_targets: Vec<String>, items: Vec<UiHistoryItem>) {
        self.history.lock().extend(items.iter().cloned());
        self.feed.push(UpdateBody::Feedback {
            speech_text,
            highlight_targets,
            history_append: items,
        });
    }
}

fn local_tool<F>(name: &str, description: &str, params: Vec<ParameterSpec>, handler: F) -> BoundTool
where
    F: Fn(&langbar_core::ToolCall) -> Result<String, ToolError> + Send + Sync + 'static,
{
    let mut spec = ToolSpec::new(name, description);
    for p in params {
        spec = spec.with_param(p);
    }
    BoundTool::new(spec, "demo", move |call| {
        Ok(ToolOutcome {
            result: ToolResult::new(handler(call)?),
            transition: None,
        })
    })
}

fn field_json(view: &ViewContext) -> std::collections::BTreeMap<String, Value> {
    view.parameter_values.iter().map(|(k, v)| (k.clone(), v.to_json())).collect()
}

fn register_local_tools(session: &Arc<GuiSession>, data: &Arc<Mutex<DemoData>>, feed: &Arc<Feed>) {
    let weak = Arc::downgrade(session);
    let view = move || weak.upgrade().map(|s| s.snapshot()).ok_or_else(|| ToolError::new("session closed"));

    let (d, v) = (data.clone(), view.clone());
    session.add_local_tool(
        "transfer",
        local_tool("confirm_transfer", "Execute the transfer shown on screen", vec![], move |_| {
            let view = v()?;
            let destination = match view.value("destination") {
                Some(langbar_core::ParamValue::Text(t)) => t.clone(),
                _ => return Err(param_error("destination", "no recipient filled in")),
            };
            let amount = view
                .value("amount")
                .and_then(|a| a.to_json().as_f64())
                .filter(|a| *a > 0.0)
                .ok_or_else(|| param_error("amount", "no positive amount filled in"))?;
            let mut data = d.lock();
            let to = data
                .contact(&destination)
                .ok_or_else(|| param_error("destination", &format!("unknown contact `{destination}`")))?
                .name
                .clone();
            let checking = &mut data.accounts[0];
            if checking.balance < amount {
                return Err(param_error("amount", "insufficient balance"));
            }
            checking.balance -= amount;
            Ok(format!("Transferred {amount} euros to {to}. New balance {:.2}.", checking.balance))
        }),
    );

    for screen in REPORT_SCREENS {
        let (d, v, f) = (data.clone(), view.clone(), feed.clone());
        session.add_local_tool(
            screen,
            local_tool("submit_report", "File the form shown on screen as a new incident", vec![], move |_| {
                let view = v()?;
                if view.parameter_values.is_empty() {
                    return Err(ToolError::new("the form is empty"));
                }
                let mut data = d.lock();
                let id = data.next_incident_id();
                data.incidents.push(Incident {
                    id,
                    kind: view.screen_id.clone(),
                    status: IncidentStatus::Open,
                    fields: field_json(&view),
                    resolution: None,
                });
                f.push(UpdateBody::Incidents {
                    incidents: data.incidents.clone(),
                });
                Ok(format!("Incident #{id} filed."))
            }),
        );
    }

    let (d, v, f) = (data.clone(), view.clone(), feed.clone());
    session.add_local_tool(
        "close_incident",
        local_tool("confirm_close", "Close the incident shown on screen", vec![], move |_| {
            let view = v()?;
            let id = match view.value("incident_id") {
                Some(langbar_core::ParamValue::Integer(i)) => *i,
                _ => return Err(param_error("incident_id", "no incident selected")),
            };
            let mut data = d.lock();
            let incident = data
                .incidents
                .iter_mut()
                .find(|i| i.id as i64 == id)
                .ok_or_else(|| param_error("incident_id", &format!("no incident #{id}")))?;
            incident.status = IncidentStatus::Closed;
            incident.resolution = view.value("resolution").map(|r| r.to_string());
            f.push(UpdateBody::Incidents {
                incidents: data.incidents.clone(),
            });
            Ok(format!("Incident #{id} closed."))
        }),
    );

    let (d, v) = (data.clone(), view);
    session.add_local_tool(
        "show_incidents",
        local_tool(
            "list_incidents",
            "Read out the incidents matching the filter on screen",
            vec![ParameterSpec::new("limit", "Maximum number of incidents", ParamKind::Integer)],
            move |call| {
                let view = v()?;
                let status = view.value("status").map(|s| s.to_string()).unwrap_or_else(|| "all".into());
                let location = view.value("location").map(|s| s.to_string().to_lowercase());
                let limit = call.arguments.get("limit").and_then(Value::as_u64).unwrap_or(u64::MAX) as usize;
                let data = d.lock();
                let lines: Vec<String> = data
                    .incidents
                    .iter()
                    .filter(|i| match status.as_str() {
                        "open" => i.status == IncidentStatus::Open,
                        "closed" => i.status == IncidentStatus::Closed,
                        _ => true,
                    })
                    .filter(|i| {
                        location.as_ref().is_none_or(|l| {
                            i.fields.get("location").and_then(Value::as_str).is_some_and(|x| x.to_lowercase().contains(l))
                        })
                    })
                    .take(limit)
                    .map(|i| format!("#{} {} ({:?})", i.id, i.kind, i.status).to_lowercase())
                    .collect();
                Ok(if lines.is_empty() {
                    "No matching incidents.".into()
                } else {
                    lines.join("\n")
                })
            },
        ),
    );
}

fn param_error(parameter: &str, message: &str) -> ToolError {
    ToolError {
        parameter: Some(parameter.to_string()),
        message: message.to_string(),
    }
}
