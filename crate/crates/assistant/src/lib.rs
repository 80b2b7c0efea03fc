//! Conversation orchestration for a GUI with a language bar.
//!
//! An [`Assistant`] takes a transcribed utterance, tries the keyword fast
//! path, and otherwise asks a chat-with-tools model for a tool call. The
//! call is repaired against its schema, run against the GUI session
//! (in-process or through the MCP endpoint) and turned into spoken and
//! graphical feedback.

pub mod assistant;
pub mod backend;
pub mod client;
pub mod history;
pub mod prompt;
pub mod wire;

pub use assistant::{Assistant, AssistantConfig, AssistantError, AssistantTurn};
pub use backend::{Backend, BackendMode, EmbeddedBackend, McpBackend, RpcChannel};
pub use client::{CallLog, HttpClient, ModelClient, ModelError, ScriptedClient, ScriptedReply};
pub use history::{ConversationEntry, EntryKind, History, HistoryPolicy};
pub use prompt::{Language, PromptBundle, EN_SYSTEM_PROMPT, NL_SYSTEM_PROMPT, OUTPUT_CONTRACT};
pub use wire::{ChatMessage, ChatRequest, ChatResponse, ToolDef, WireToolCall};
