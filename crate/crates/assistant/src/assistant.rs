use std::sync::Arc;

use langbar_core::{
    plan_feedback, repair_call, Clock, CommandMatch, FeedbackPlan, GuiSession, GuiTransition, Origin, RepairLog,
    ToolCall, ToolSpec, TransitionKind,
};
use langbar_mcp::McpServer;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::backend::{Backend, BackendMode, EmbeddedBackend, McpBackend};
use crate::client::{ModelClient, ModelError};
use crate::history::{ConversationEntry, EntryKind, History, HistoryPolicy};
use crate::prompt::{Language, PromptBundle, OUTPUT_CONTRACT};
use crate::wire::{ChatMessage, ToolDef};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssistantConfig {
    /// Chat-completions URL; unused when a client is supplied directly.
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default)]
    pub history_policy: HistoryPolicy,
    #[serde(default)]
    pub two_phase: bool,
    #[serde(default = "enabled")]
    pub fastpath: bool,
    #[serde(default)]
    pub language: Language,
    /// Overrides the language's built-in system prompt.
    #[serde(default)]
    pub system_prompt: Option<String>,
    #[serde(default)]
    pub mode: BackendMode,
}

fn default_model() -> String {
    "mock".into()
}

fn enabled() -> bool {
    true
}

impl Default for AssistantConfig {
    fn default() -> Self {
        serde_json::from_value(json!({})).expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssistantError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("model chose unknown tool `{0}`")]
    UnknownTool(String),
    #[error("model returned no tool call")]
    NoToolCall,
}

/// Record of one utterance and what came of it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssistantTurn {
    pub utterance: String,
    /// Set when a keyword pattern handled the utterance without the model.
    pub fastpath: Option<CommandMatch>,
    /// The call as returned by the model.
    pub raw_call: Option<ToolCall>,
    /// The call after repair, as dispatched.
    pub tool_call: Option<ToolCall>,
    pub repairs: RepairLog,
    pub result: Option<String>,
    pub feedback: Option<FeedbackPlan>,
    pub assistant_text: Option<String>,
    pub error: Option<String>,
    pub model_requests: usize,
}

impl AssistantTurn {
    fn new(utterance: &str) -> Self {
        Self {
            utterance: utterance.to_string(),
            fastpath: None,
            raw_call: None,
            tool_call: None,
            repairs: RepairLog::default(),
            result: None,
            feedback: None,
            assistant_text: None,
            error: None,
            model_requests: 0,
        }
    }

    /// True when the turn changed or addressed the GUI.
    pub fn touched_gui(&self) -> bool {
        self.feedback.is_some() && self.error.is_none()
    }
}

/// Turns utterances into GUI actions for one session.
pub struct Assistant {
    session: Arc<GuiSession>,
    client: Arc<dyn ModelClient>,
    backend: Box<dyn Backend>,
    config: AssistantConfig,
    clock: Arc<dyn Clock>,
    history: Mutex<History>,
    pending: Arc<Mutex<Vec<GuiTransition>>>,
    turn: Mutex<()>,
}

impl Assistant {
    pub fn new(
        session: Arc<GuiSession>,
        client: Arc<dyn ModelClient>,
        config: AssistantConfig,
        clock: Arc<dyn Clock>,
    ) -> Self {
        let backend: Box<dyn Backend> = match config.mode {
            BackendMode::Embedded => Box::new(EmbeddedBackend::new(session.clone())),
            BackendMode::Mcp => {
                let server = McpServer::for_session(session.clone(), clock.clone());
                Box::new(McpBackend::connect(server).expect("in-process endpoint answers initialize"))
            }
        };
        Self::with_backend(session, client, backend, config, clock)
    }

    pub fn with_backend(
        session: Arc<GuiSession>,
        client: Arc<dyn ModelClient>,
        backend: Box<dyn Backend>,
        config: AssistantConfig,
        clock: Arc<dyn Clock>,
    ) -> Self {
        let pending = Arc::new(Mutex::new(Vec::new()));
        let sink = pending.clone();
        session.subscribe(Arc::new(move |t: &GuiTransition| sink.lock().push(t.clone())));
        Self {
            session,
            client,
            backend,
            history: Mutex::new(History::new(config.history_policy)),
            config,
            clock,
            pending,
            turn: Mutex::new(()),
        }
    }

    pub fn session(&self) -> &Arc<GuiSession> {
        &self.session
    }

    pub fn client(&self) -> &Arc<dyn ModelClient> {
        &self.client
    }

    pub fn config(&self) -> &AssistantConfig {
        &self.config
    }

    pub fn system_prompt(&self) -> &str {
        self.config
            .system_prompt
            .as_deref()
            .unwrap_or_else(|| self.config.language.system_prompt())
    }

    /// Conversation entries, including GUI changes made outside a turn.
    pub fn history(&self) -> Vec<ConversationEntry> {
        self.sync_transitions();
        self.history.lock().entries().to_vec()
    }

    fn sync_transitions(&self) {
        let pending: Vec<GuiTransition> = self.pending.lock().drain(..).collect();
        let mut history = self.history.lock();
        for t in pending.iter().filter(|t| t.kind == TransitionKind::Navigation) {
            history.on_gui_transition(&t.to, Some(t.link.clone()), self.clock.now_ms());
        }
    }

    /// Assembles the prompt for `text` on top of the recorded history.
    pub fn prompt_for(&self, text: &str) -> PromptBundle {
        let mut entries = self.history.lock().entries().to_vec();
        entries.push(ConversationEntry {
            kind: EntryKind::UserText,
            payload: json!(text),
            timestamp: self.clock.now_ms(),
            link: None,
        });
        self.bundle(entries)
    }

    fn bundle(&self, history: Vec<ConversationEntry>) -> PromptBundle {
        PromptBundle {
            system_prompt: self.system_prompt().to_string(),
            history,
            tools: self.backend.tools(),
            screen_parameters: self.session.snapshot(),
            screen_text: self.session.screen_text(),
            output_contract: OUTPUT_CONTRACT.to_string(),
        }
    }

    /// Handles one utterance end to end. Failures are reported in the turn.
    pub fn handle_utterance(&self, text: &str) -> AssistantTurn {
        let _one_at_a_time = self.turn.lock();
        self.sync_transitions();
        let text = text.trim();
        let mut turn = AssistantTurn::new(text);
        let now = self.clock.now_ms();
        self.history.lock().push(EntryKind::UserText, json!(text), now);

        if self.config.fastpath {
            if let Some(m) = self.session.app().fastpath.match_user_input(text) {
                turn.fastpath = Some(m.clone());
                match self.session.run_command(&m, Origin::Assistant) {
                    Ok(outcome) => {
                        turn.result = Some(outcome.result.text);
                        turn.feedback = outcome
                            .transition
                            .as_ref()
                            .map(|t| plan_feedback(&ToolCall::new(t.to.clone()), t, &self.session.app().catalog));
                    }
                    Err(e) => self.fail(&mut turn, e.message, None),
                }
                self.sync_transitions();
                return turn;
            }
        }

        let bundle = self.bundle(self.history.lock().entries().to_vec());
        let before = self.client.log().count();
        let reply = if self.config.two_phase {
            self.two_phase(&bundle).map(Reply::Call)
        } else {
            self.single_call(&bundle)
        };
        turn.model_requests = self.client.log().count() - before;
        match reply {
            Ok(Reply::Call(raw)) => {
                turn.raw_call = Some(raw.clone());
                self.execute(&mut turn, raw, &bundle.tools);
            }
            Ok(Reply::Text(reply)) => {
                self.history.lock().push(EntryKind::AssistantText, json!(reply), self.clock.now_ms());
                turn.assistant_text = Some(reply);
            }
            Err(e) => self.fail(&mut turn, format!("The assistant is unavailable: {e}"), None),
        }
        self.sync_transitions();
        turn
    }

    fn fail(&self, turn: &mut AssistantTurn, message: String, parameter: Option<&str>) {
        self.history
            .lock()
            .push(EntryKind::AssistantText, json!(message), self.clock.now_ms());
        turn.feedback = Some(FeedbackPlan {
            speech_text: message.clone(),
            highlight_targets: parameter.map(|p| vec![format!("field:{p}")]).unwrap_or_default(),
            history_entry: None,
        });
        turn.assistant_text = Some(message.clone());
        turn.error = Some(message);
    }

    /// Repairs and runs a model call, filling in the turn.
    fn execute(&self, turn: &mut AssistantTurn, raw: ToolCall, tools: &[ToolSpec]) {
        let Some(spec) = tools.iter().find(|t| t.name == raw.name) else {
            self.fail(turn, format!("There is no tool named `{}`.", raw.name), None);
            return;
        };
        let (call, log) = repair_call(&raw, spec, &self.session.app().synonyms_for(&raw.name));
        turn.repairs = log;
        turn.tool_call = Some(call.clone());
        let unrepairable = turn.repairs.unrepairable().next().map(str::to_string);
        if let Some(p) = unrepairable {
            self.fail(turn, format!("I could not use the value given for `{p}`."), Some(&p));
            return;
        }
        let id = self.history.lock().push_call(&call, self.clock.now_ms());
        let mark = self.pending.lock().len();
        match self.backend.call(&call) {
            Ok(text) => {
                let transition = self.pending.lock().get(mark..).and_then(|t| t.last().cloned());
                let feedback = transition
                    .as_ref()
                    .map(|t| plan_feedback(&call, t, &self.session.app().catalog));
                let link = feedback.as_ref().and_then(|f| f.history_entry.clone());
                self.history
                    .lock()
                    .push_result(&id, &text, false, link, self.clock.now_ms());
                turn.result = Some(text);
                turn.feedback = feedback;
            }
            Err(e) => {
                self.history
                    .lock()
                    .push_result(&id, &e.message, true, None, self.clock.now_ms());
                let message = match &e.parameter {
                    Some(p) => format!("I could not use the value given for `{p}`: {}", e.message),
                    None => e.message.clone(),
                };
                self.fail(turn, message, e.parameter.as_deref());
            }
        }
    }

    fn single_call(&self, bundle: &PromptBundle) -> Result<Reply, AssistantError> {
        let response = self.client.complete(&bundle.to_request(&self.config.model))?;
        Ok(match response.first_tool_call()? {
            Some(call) => Reply::Call(call),
            None => Reply::Text(response.text().unwrap_or_default().to_string()),
        })
    }

    /// Picks a tool from names and descriptions, then asks for the chosen
    /// tool's arguments. Does not record anything.
    pub fn two_phase_call(&self, text: &str) -> Result<ToolCall, AssistantError> {
        self.two_phase(&self.prompt_for(text))
    }

    fn two_phase(&self, bundle: &PromptBundle) -> Result<ToolCall, AssistantError> {
        let model = &self.config.model;
        let messages = bundle.messages();
        let name = match bundle.tools.as_slice() {
            [] => return Err(AssistantError::NoToolCall),
            [only] => only.name.clone(),
            tools => {
                let names_only: Vec<ToolDef> = tools.iter().map(ToolDef::name_only).collect();
                let mut selection = messages.clone();
                let mut attempt = 0;
                loop {
                    let request = crate::wire::ChatRequest::new(model.as_str(), selection.clone()).with_tools(names_only.clone());
                    let response = self.client.complete(&request)?;
                    let picked = match response.first_tool_call()? {
                        Some(c) => c.name,
                        None => response.text().unwrap_or_default().trim().to_string(),
                    };
                    if tools.iter().any(|t| t.name == picked) {
                        break picked;
                    }
                    attempt += 1;
                    if attempt == 2 {
                        return Err(AssistantError::UnknownTool(picked));
                    }
                    let names: Vec<&str> = tools.iter().map(|t| t.name.as_str()).collect();
                    selection.push(ChatMessage::assistant(picked.clone()));
                    selection.push(ChatMessage::user(format!(
                        "`{picked}` is not an available tool. Choose one of: {}.",
                        names.join(", ")
                    )));
                }
            }
        };
        let spec = bundle.tools.iter().find(|t| t.name == name).expect("selected from list");
        let request = crate::wire::ChatRequest::new(model.as_str(), messages)
            .with_tools(vec![ToolDef::from_spec(spec)])
            .force(&name);
        let response = self.client.complete(&request)?;
        let mut call = response.first_tool_call()?.ok_or(AssistantError::NoToolCall)?;
        call.name = name;
        Ok(call)
    }

    /// Speech text for `call` against the current screen, without running it.
    pub fn verbalize(&self, call: &ToolCall) -> String {
        let app = self.session.app();
        let active = self.session.snapshot();
        let target = if self.session.is_self_tool(&call.name) {
            ToolCall {
                name: active.screen_id.clone(),
                arguments: call.arguments.clone(),
            }
        } else {
            call.clone()
        };
        let resolved = app
            .graph
            .build_deeplink(&target)
            .and_then(|link| app.graph.resolve(&link).map(|r| (link, r)));
        let Ok((link, resolved)) = resolved else {
            return plan_feedback(call, &unresolved(call), &app.catalog).speech_text;
        };
        let screen = app.catalog.get(&resolved.route);
        let mut new_instance = false;
        let mut applied = Vec::new();
        for (n, v) in resolved.values {
            if screen.is_some_and(|s| s.is_flag(&n)) {
                new_instance = v.as_bool() == Some(true);
            } else {
                applied.push((n, v));
            }
        }
        let kind = if resolved.route != active.screen_id {
            TransitionKind::Navigation
        } else if applied.is_empty() && !new_instance {
            TransitionKind::Reentry
        } else {
            TransitionKind::ParameterEdit
        };
        let transition = GuiTransition {
            kind,
            origin: Origin::Assistant,
            from: Some(active.screen_id),
            to: resolved.route,
            path: resolved.path,
            applied,
            new_instance,
            link: link.to_string(),
        };
        plan_feedback(&target, &transition, &app.catalog).speech_text
    }
}

enum Reply {
    Call(ToolCall),
    Text(String),
}

fn unresolved(call: &ToolCall) -> GuiTransition {
    GuiTransition {
        kind: TransitionKind::Reentry,
        origin: Origin::Assistant,
        from: None,
        to: call.name.clone(),
        path: Vec::new(),
        applied: Vec::new(),
        new_instance: false,
        link: String::new(),
    }
}
