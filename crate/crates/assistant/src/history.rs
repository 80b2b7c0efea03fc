use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::wire::{ChatMessage, WireToolCall};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    UserText,
    AssistantText,
    ToolCall,
    ToolResult,
    GuiTransition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversationEntry {
    pub kind: EntryKind,
    /// Text for user/assistant/transition entries; an object for tool
    /// calls (`id`, `name`, `arguments`) and results (`id`, `text`,
    /// `is_error`).
    pub payload: Value,
    pub timestamp: u64,
    /// Deep link reproducing the screen state this entry led to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<String>,
}

impl ConversationEntry {
    fn to_message(&self) -> Option<ChatMessage> {
        let text = || self.payload.as_str().unwrap_or_default().to_string();
        match self.kind {
            EntryKind::UserText => Some(ChatMessage::user(text())),
            EntryKind::AssistantText => Some(ChatMessage::assistant(text())),
            EntryKind::ToolCall => {
                let call = langbar_core::ToolCall::with_args(
                    self.payload["name"].as_str().unwrap_or_default(),
                    self.payload["arguments"].clone(),
                );
                let id = self.payload["id"].as_str().unwrap_or_default();
                Some(ChatMessage::tool_calls(vec![WireToolCall::from_call(id, &call)]))
            }
            EntryKind::ToolResult => Some(ChatMessage::tool_result(
                self.payload["id"].as_str().unwrap_or_default(),
                self.payload["text"].as_str().unwrap_or_default(),
            )),
            EntryKind::GuiTransition => Some(ChatMessage::system(format!("The screen changed to {}.", text()))),
        }
    }
}

/// Renders entries as chat messages.
pub fn to_messages(entries: &[ConversationEntry]) -> Vec<ChatMessage> {
    entries.iter().filter_map(ConversationEntry::to_message).collect()
}

/// What happens to earlier entries when a new screen opens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistoryPolicy {
    #[default]
    KeepAll,
    ClearOnScreenChange,
    KeepLastN(usize),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct History {
    policy: HistoryPolicy,
    entries: Vec<ConversationEntry>,
    next_call: u64,
}

impl History {
    pub fn new(policy: HistoryPolicy) -> Self {
        Self {
            policy,
            entries: Vec::new(),
            next_call: 0,
        }
    }

    pub fn policy(&self) -> HistoryPolicy {
        self.policy
    }

    pub fn entries(&self) -> &[ConversationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, kind: EntryKind, payload: Value, timestamp: u64) {
        self.entries.push(ConversationEntry {
            kind,
            payload,
            timestamp,
            link: None,
        });
    }

    /// Records a tool call and returns its id.
    pub fn push_call(&mut self, call: &langbar_core::ToolCall, timestamp: u64) -> String {
        let id = format!("call_{}", self.next_call);
        self.next_call += 1;
        self.push(
            EntryKind::ToolCall,
            json!({"id": id, "name": call.name, "arguments": call.arguments}),
            timestamp,
        );
        id
    }

    pub fn push_result(&mut self, id: &str, text: &str, is_error: bool, link: Option<String>, timestamp: u64) {
        self.entries.push(ConversationEntry {
            kind: EntryKind::ToolResult,
            payload: json!({"id": id, "text": text, "is_error": is_error}),
            timestamp,
            link,
        });
    }

    /// Trims per policy, then appends the new screen.
    pub fn on_gui_transition(&mut self, screen_id: &str, link: Option<String>, timestamp: u64) {
        match self.policy {
            HistoryPolicy::KeepAll => {}
            HistoryPolicy::ClearOnScreenChange => self.entries.clear(),
            HistoryPolicy::KeepLastN(n) => {
                let drop = self.entries.len().saturating_sub(n);
                self.entries.drain(..drop);
                // a result without its call would be an orphan
                while self.entries.first().is_some_and(|e| e.kind == EntryKind::ToolResult) {
                    self.entries.remove(0);
                }
            }
        }
        self.entries.push(ConversationEntry {
            kind: EntryKind::GuiTransition,
            payload: Value::String(screen_id.to_string()),
            timestamp,
            link,
        });
    }

    pub fn to_messages(&self) -> Vec<ChatMessage> {
        to_messages(&self.entries)
    }
}
