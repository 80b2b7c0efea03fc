//! A live GUI session: the router, the active ViewModels and the tools
//! bound to them.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::Mutex;

use crate::config::AppModel;
use crate::error::{DispatchError, ToolError};
use crate::fastpath::{CommandMatch, MATCH_TOOL_NAME};
use crate::routegraph::{DeepLink, DispatchOutcome};
use crate::tool::{ParamValue, ToolCall, ToolResult};
use crate::viewmodel::{
    apply_parameters_with, compose_tools, self_tool_name, BoundTool, GuiTransition, Origin, Provenance,
    ToolOutcome, TransitionKind, ViewContext, ViewModelRegistry,
};

pub type TransitionListener = Arc<dyn Fn(&GuiTransition) + Send + Sync>;

/// Built-in command ids understood by [`GuiSession::execute_command`].
pub const COMMAND_BACK: &str = "back";
pub const COMMAND_FORWARD: &str = "forward";

/// One user's GUI. Mutations are serialized; listeners run after the
/// state change is complete and see it in full.
pub struct GuiSession {
    app: Arc<AppModel>,
    registry: Mutex<ViewModelRegistry>,
    mutation: Mutex<()>,
    listeners: Mutex<Vec<TransitionListener>>,
    local_tools: Mutex<HashMap<String, Vec<BoundTool>>>,
}

impl std::fmt::Debug for GuiSession {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GuiSession")
            .field("active", &self.snapshot().screen_id)
            .finish()
    }
}

impl GuiSession {
    pub fn new(app: Arc<AppModel>) -> Arc<Self> {
        let initial = ViewContext::new(app.initial_screen.clone());
        let registry = ViewModelRegistry::new(app.catalog.clone(), initial);
        Arc::new(Self {
            app,
            registry: Mutex::new(registry),
            mutation: Mutex::new(()),
            listeners: Mutex::new(Vec::new()),
            local_tools: Mutex::new(HashMap::new()),
        })
    }

    pub fn app(&self) -> &Arc<AppModel> {
        &self.app
    }

    pub fn subscribe(&self, listener: TransitionListener) {
        self.listeners.lock().push(listener);
    }

    /// Registers an extra tool offered only while `screen` is active.
    pub fn add_local_tool(&self, screen: &str, tool: BoundTool) {
        self.local_tools.lock().entry(screen.to_string()).or_default().push(tool);
    }

    pub fn snapshot(&self) -> ViewContext {
        self.registry.lock().active().clone()
    }

    pub fn screen_text(&self) -> String {
        self.registry.lock().screen_text()
    }

    /// Canonical link of the active screen's current state.
    pub fn current_link(&self) -> String {
        let reg = self.registry.lock();
        self.app.graph.state_link(reg.active(), &self.app.catalog)
    }

    pub fn depth(&self) -> usize {
        self.registry.lock().depth()
    }

    fn mutate<F>(&self, f: F) -> Result<DispatchOutcome, DispatchError>
    where
        F: FnOnce(&mut ViewModelRegistry) -> Result<DispatchOutcome, DispatchError>,
    {
        let _serial = self.mutation.lock();
        let outcome = {
            let mut reg = self.registry.lock();
            f(&mut reg)?
        };
        let listeners: Vec<TransitionListener> = self.listeners.lock().clone();
        for l in listeners {
            l(&outcome.transition);
        }
        Ok(outcome)
    }

    pub fn dispatch_link(&self, link: &DeepLink, origin: Origin) -> Result<DispatchOutcome, DispatchError> {
        let graph = self.app.graph.clone();
        self.mutate(|reg| graph.dispatch(link, reg, origin))
    }

    /// Routes a (repaired) tool call through the router.
    pub fn dispatch_call(&self, call: &ToolCall, origin: Origin) -> Result<DispatchOutcome, DispatchError> {
        let link = self.app.graph.build_deeplink(call)?;
        self.dispatch_link(&link, origin)
    }

    /// Replays a canonical deep-link text from the history.
    pub fn replay(&self, text: &str) -> Result<DispatchOutcome, DispatchError> {
        let link: DeepLink = text.parse()?;
        let graph = self.app.graph.clone();
        self.mutate(|reg| graph.restore(&link, reg))
    }

    /// Sets one field of the active screen from GUI input.
    pub fn edit_field(&self, name: &str, text: &str) -> Result<DispatchOutcome, DispatchError> {
        let graph = self.app.graph.clone();
        let catalog = self.app.catalog.clone();
        self.mutate(|reg| {
            let active = reg.active().clone();
            let screen = catalog
                .get(&active.screen_id)
                .ok_or_else(|| DispatchError::UnknownRoute(active.screen_id.clone()))?;
            let spec = screen.route.param(name).ok_or_else(|| crate::error::ValueError::UnknownParameter {
                parameter: name.to_string(),
            })?;
            let value = ParamValue::parse(spec, text)?;
            let applied = vec![(name.to_string(), value)];
            reg.replace_active(apply_parameters_with(&active, &applied, false, Provenance::FromGuiInput));
            Ok(graph.outcome(
                reg,
                TransitionKind::ParameterEdit,
                Origin::User,
                Some(active.screen_id.clone()),
                applied,
                false,
            ))
        })
    }

    /// Applies a call to the active screen without navigating; fails if
    /// `screen` is no longer active.
    pub fn edit_active(&self, screen: &str, call: &ToolCall) -> Result<DispatchOutcome, DispatchError> {
        let graph = self.app.graph.clone();
        let catalog = self.app.catalog.clone();
        self.mutate(|reg| {
            let active = reg.active().clone();
            if active.screen_id != screen {
                return Err(DispatchError::InactiveScreen(screen.to_string()));
            }
            let link = graph.build_deeplink(&ToolCall {
                name: screen.to_string(),
                arguments: call.arguments.clone(),
            })?;
            let resolved = graph.resolve(&link)?;
            let meta = catalog.get(screen).ok_or_else(|| DispatchError::UnknownRoute(screen.to_string()))?;
            let mut new_instance = false;
            let mut applied = Vec::new();
            for (n, v) in resolved.values {
                if meta.is_flag(&n) {
                    new_instance = v.as_bool() == Some(true);
                } else {
                    applied.push((n, v));
                }
            }
            let kind = if applied.is_empty() && !new_instance {
                TransitionKind::Reentry
            } else {
                reg.replace_active(apply_parameters_with(&active, &applied, new_instance, Provenance::FromUserSpeech));
                TransitionKind::ParameterEdit
            };
            Ok(graph.outcome(reg, kind, Origin::Assistant, Some(active.screen_id), applied, new_instance))
        })
    }

    /// Executes a navigation command. Returns `Ok(None)` when the command
    /// had nothing to do (e.g. back on the first screen).
    pub fn execute_command(&self, command_id: &str, origin: Origin) -> Result<Option<DispatchOutcome>, ToolError> {
        let graph = self.app.graph.clone();
        let moved = match command_id {
            COMMAND_BACK => self.mutate(|reg| {
                let from = reg.active().screen_id.clone();
                if !reg.back() {
                    return Err(DispatchError::InactiveScreen(from));
                }
                Ok(graph.outcome(reg, TransitionKind::Navigation, origin, Some(from), Vec::new(), false))
            }),
            COMMAND_FORWARD => self.mutate(|reg| {
                let from = reg.active().screen_id.clone();
                if !reg.forward() {
                    return Err(DispatchError::InactiveScreen(from));
                }
                Ok(graph.outcome(reg, TransitionKind::Navigation, origin, Some(from), Vec::new(), false))
            }),
            other => return Err(ToolError::new(format!("unknown command `{other}`"))),
        };
        Ok(moved.ok())
    }

    /// Runs a keyword match: executes the command and reports the outcome.
    pub fn run_command(&self, matched: &CommandMatch, origin: Origin) -> Result<ToolOutcome, ToolError> {
        let outcome = self.execute_command(&matched.command_id, origin)?;
        Ok(match outcome {
            Some(o) => ToolOutcome {
                result: o.result,
                transition: Some(o.transition),
            },
            None => ToolOutcome {
                result: ToolResult::new(self.screen_text()),
                transition: None,
            },
        })
    }

    /// One tool per route, each bound to this session's router.
    pub fn router_tools(self: &Arc<Self>) -> Vec<BoundTool> {
        self.app
            .graph
            .to_tools()
            .into_iter()
            .map(|spec| {
                let session = Arc::clone(self);
                BoundTool::new(spec, "router", move |call: &ToolCall| {
                    let o = session.dispatch_call(call, Origin::Assistant)?;
                    Ok(ToolOutcome {
                        result: o.result,
                        transition: Some(o.transition),
                    })
                })
            })
            .collect()
    }

    /// Tools local to the active screen: its self tool (when enabled) and
    /// registered extras.
    pub fn local_tools(self: &Arc<Self>) -> Vec<BoundTool> {
        let (screen, spec) = {
            let reg = self.registry.lock();
            (reg.active().screen_id.clone(), reg.self_tool_spec())
        };
        let mut out = Vec::new();
        if let Some(spec) = spec {
            let session = Arc::clone(self);
            let target = screen.clone();
            out.push(BoundTool::new(spec, screen.clone(), move |call: &ToolCall| {
                let o = session.edit_active(&target, call)?;
                Ok(ToolOutcome {
                    result: o.result,
                    transition: Some(o.transition),
                })
            }));
        }
        if let Some(extra) = self.local_tools.lock().get(&screen) {
            out.extend(extra.iter().cloned());
        }
        out
    }

    /// The ordered tool list for the active screen.
    pub fn tools(self: &Arc<Self>) -> Vec<BoundTool> {
        let active = self.snapshot();
        compose_tools(&active, self.router_tools(), self.local_tools())
    }

    /// Tools as published to an external assistant: [`Self::tools`] plus
    /// the keyword matcher when patterns are configured.
    pub fn published_tools(self: &Arc<Self>) -> Vec<BoundTool> {
        let mut tools = self.tools();
        if let Some(spec) = self.app.fastpath.as_tool() {
            let session = Arc::clone(self);
            tools.push(BoundTool::new(spec, "fastpath", move |call: &ToolCall| {
                match session.app.fastpath.call_tool(call)? {
                    Some(m) => session.run_command(&m, Origin::Assistant),
                    None => Ok(ToolOutcome {
                        result: ToolResult::new("no match"),
                        transition: None,
                    }),
                }
            }));
        }
        tools
    }

    pub fn is_self_tool(&self, name: &str) -> bool {
        name == self_tool_name(&self.snapshot().screen_id)
    }

    pub fn is_match_tool(name: &str) -> bool {
        name == MATCH_TOOL_NAME
    }
}
