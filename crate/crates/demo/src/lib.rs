//! Reference backend for the language bar: a small banking app (transfers,
//! credit card, offices map) and a data-center incident desk.
//!
//! [`DemoAppState`] owns the GUI session, the assistant and the MCP
//! endpoint. [`api::router`] serves the JSON API a browser UI consumes:
//!
//! | method | path | |
//! |---|---|---|
//! | POST | `/utterance` | `{"text"}` → assistant turn |
//! | POST | `/deeplink` | `{"link"}` → replayed state, 4xx if rejected |
//! | GET | `/state` | active view, screen text, link, fake data |
//! | GET | `/history` | history panel items and conversation entries |
//! | GET | `/events` | server-sent [`UiUpdate`]s, `?since=<seq>` to resume |
//! | POST/GET | `/mcp` | MCP streamable HTTP |

pub mod api;
pub mod app;
pub mod data;
pub mod state;

pub use app::{build_demo_graph, DEMO_CONFIG, DEMO_ROUTE_COUNT};
pub use data::{Account, Contact, DemoData, Incident, IncidentStatus};
pub use state::{DemoAppState, Feed, HistoryKind, ReplayOutcome, StateView, UiHistoryItem, UiUpdate, UpdateBody};
