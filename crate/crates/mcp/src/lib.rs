//! Model Context Protocol endpoint for a GUI session.
//!
//! [`McpServer`] publishes the session's current tools, runs tool calls
//! against the GUI and exposes recent GUI events as the read-only resource
//! `gui://last-gui-events`. Transports: line-delimited stdio ([`stdio`])
//! and streamable HTTP ([`http`]).
//!
//! Sampling and prompts are not supported.

pub mod http;
pub mod registry;
pub mod server;
pub mod stdio;

pub use registry::{GuiEvent, GuiEventKind, SessionRegistry, ToolSet, DEFAULT_EVENT_CAPACITY};
pub use server::{McpServer, Notifier, GUI_EVENTS_URI, LIST_CHANGED, MAX_RESULT_BYTES, PROTOCOL_VERSION};
