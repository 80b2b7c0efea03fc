//! Core of the LangBar framework: exposes a GUI's navigation graph and
//! per-view capabilities as tools for a language model, and routes the
//! model's tool calls back into the GUI.
//!
//! * [`routegraph`] — documented routes, navigation tools and deep links
//! * [`viewmodel`] — screen state, tool ordering, screen text and feedback
//! * [`gui`] — a live session binding tools to the router and ViewModels
//! * [`sap`] — schema-aligned repair of model tool calls
//! * [`fastpath`] — regex command matching that bypasses the model

pub mod clock;
pub mod config;
pub mod error;
pub mod fastpath;
pub mod gui;
pub mod routegraph;
pub mod sap;
pub mod tool;
pub mod viewmodel;

pub use clock::{Clock, SteppingClock, SystemClock};
pub use config::{AppConfig, AppModel};
pub use error::{CompositionError, ConfigError, DispatchError, ToolError, ValueError};
pub use fastpath::{CommandMatch, CommandPattern, FastPath};
pub use gui::GuiSession;
pub use routegraph::{DeepLink, DispatchOutcome, DocumentedRoute, RouteGraph};
pub use sap::{levenshtein, repair_call, RepairLog, RepairRule, SynonymTable};
pub use tool::{ParamKind, ParamValue, ParameterSpec, ToolCall, ToolResult, ToolSpec};
pub use viewmodel::{
    apply_parameters, compose_hierarchy, compose_tools, plan_feedback, BoundTool, FeedbackPlan, GuiTransition,
    Origin, Provenance, ScreenCatalog, ScreenMeta, ToolOutcome, TransitionKind, ViewContext, ViewModelNode,
};
