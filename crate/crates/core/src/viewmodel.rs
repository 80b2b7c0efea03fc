//! Multimodal ViewModels: per-screen state, tool ordering and composition,
//! textual screen rendering and feedback planning.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CompositionError, ConfigError, ToolError};
use crate::routegraph::{DocumentedRoute, RouteGraph};
use crate::tool::{ParamKind, ParamValue, ToolCall, ToolResult, ToolSpec};

/// Where a field value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    FromUserSpeech,
    FromGuiInput,
    FromStorage,
}

/// State of one screen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewContext {
    pub screen_id: String,
    pub parameter_values: BTreeMap<String, ParamValue>,
    pub dirty_flags: BTreeMap<String, Provenance>,
}

impl ViewContext {
    pub fn new(screen_id: impl Into<String>) -> Self {
        Self {
            screen_id: screen_id.into(),
            parameter_values: BTreeMap::new(),
            dirty_flags: BTreeMap::new(),
        }
    }

    pub fn value(&self, name: &str) -> Option<&ParamValue> {
        self.parameter_values.get(name)
    }
}

/// Applies tool-call arguments to a screen.
///
/// With `is_new_instance` the screen starts from its defaults (a fresh
/// instance, e.g. a second transfer); otherwise the arguments are merged
/// over the current values (a correction or continuation). Applied values
/// are marked as coming from speech.
pub fn apply_parameters(ctx: &ViewContext, args: &[(String, ParamValue)], is_new_instance: bool) -> ViewContext {
    apply_parameters_with(ctx, args, is_new_instance, Provenance::FromUserSpeech)
}

pub fn apply_parameters_with(
    ctx: &ViewContext,
    args: &[(String, ParamValue)],
    is_new_instance: bool,
    provenance: Provenance,
) -> ViewContext {
    let mut next = if is_new_instance {
        ViewContext::new(ctx.screen_id.clone())
    } else {
        ctx.clone()
    };
    for (name, value) in args {
        next.parameter_values.insert(name.clone(), value.clone());
        next.dirty_flags.insert(name.clone(), provenance);
    }
    next
}

/// Presentation settings for one screen, from the app config.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenMeta {
    /// Display title; defaults to the route name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    /// Navigation phrases with `{param}` placeholders. The first template
    /// whose placeholders are all filled is used.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub speech: Vec<String>,
    /// Boolean parameter that marks a call as a new instance rather than a
    /// correction of the current one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_instance_flag: Option<String>,
    /// Expose an `edit_<screen>` tool that reports filled and empty fields.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub self_tool: bool,
}

/// A route together with its presentation settings.
#[derive(Debug, Clone)]
pub struct Screen {
    pub route: DocumentedRoute,
    pub path: Vec<String>,
    pub meta: ScreenMeta,
}

impl Screen {
    pub fn id(&self) -> &str {
        &self.route.name
    }

    pub fn title(&self) -> &str {
        self.meta.title.as_deref().unwrap_or(&self.route.name)
    }

    pub fn is_flag(&self, param: &str) -> bool {
        self.meta.new_instance_flag.as_deref() == Some(param)
    }

    /// Deterministic, line-oriented rendering of what the user sees:
    /// title, one `name: value` line per filled field in declaration
    /// order, then the available actions.
    pub fn screen_text(&self, ctx: &ViewContext) -> String {
        let mut out = String::new();
        out.push_str(self.title());
        out.push('\n');
        let mut filled = 0;
        for p in &self.route.parameters {
            if let Some(v) = ctx.parameter_values.get(&p.name) {
                out.push_str(&format!("{}: {}\n", p.name, v));
                filled += 1;
            }
        }
        if filled == 0 {
            out.push_str("no fields filled\n");
        }
        let mut actions: Vec<String> = Vec::new();
        for p in &self.route.parameters {
            if self.is_flag(&p.name) {
                actions.push(format!("start new {}", self.route.name));
                continue;
            }
            actions.push(match &p.kind {
                ParamKind::Enum(members) => format!("choose {} ({})", p.name, members.join(", ")),
                ParamKind::Boolean => format!("toggle {}", p.name),
                _ => format!("set {}", p.name),
            });
        }
        actions.extend(self.route.children.iter().map(|c| format!("open {}", c.name)));
        if actions.is_empty() {
            out.push_str("actions: none");
        } else {
            out.push_str("actions: ");
            out.push_str(&actions.join(", "));
        }
        out
    }

    /// Navigation phrase for the screen given its current values.
    pub fn navigation_phrase(&self, ctx: &ViewContext) -> String {
        for template in &self.meta.speech {
            if let Some(s) = fill_template(template, ctx) {
                return s;
            }
        }
        format!("Showing {}", self.title())
    }

    fn self_tool_spec(&self, ctx: &ViewContext) -> ToolSpec {
        let (filled, empty): (Vec<_>, Vec<_>) = self
            .route
            .parameters
            .iter()
            .filter(|p| !self.is_flag(&p.name))
            .partition(|p| ctx.parameter_values.contains_key(&p.name));
        let filled: Vec<String> = filled
            .iter()
            .map(|p| format!("{}={}", p.name, ctx.parameter_values[&p.name]))
            .collect();
        let empty: Vec<&str> = empty.iter().map(|p| p.name.as_str()).collect();
        let list = |v: &[String]| if v.is_empty() { "none".to_string() } else { v.join(", ") };
        ToolSpec {
            name: self_tool_name(self.id()),
            description: format!(
                "Edit fields on the currently visible {} screen. Filled: {}. Empty: {}.",
                self.title(),
                list(&filled),
                list(&empty.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
            ),
            parameters: self.route.parameters.clone(),
        }
    }
}

pub fn self_tool_name(screen: &str) -> String {
    format!("edit_{screen}")
}

fn fill_template(template: &str, ctx: &ViewContext) -> Option<String> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let end = rest[start..].find('}')? + start;
        let key = &rest[start + 1..end];
        out.push_str(&ctx.parameter_values.get(key)?.to_string());
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    Some(out)
}

/// All screens of an app, keyed by route name.
#[derive(Debug, Clone)]
pub struct ScreenCatalog {
    screens: HashMap<String, Screen>,
}

impl ScreenCatalog {
    pub fn new(graph: &RouteGraph, metas: &BTreeMap<String, ScreenMeta>) -> Result<Self, ConfigError> {
        for (name, meta) in metas {
            let route = graph
                .route(name)
                .ok_or_else(|| ConfigError::invalid(format!("screens/{name}"), "no route with this name"))?;
            if let Some(flag) = &meta.new_instance_flag {
                match route.param(flag) {
                    Some(p) if p.kind == ParamKind::Boolean => {}
                    _ => {
                        return Err(ConfigError::invalid(
                            format!("screens/{name}/new_instance_flag"),
                            format!("`{flag}` is not a boolean parameter of the route"),
                        ))
                    }
                }
            }
        }
        let screens = graph
            .names()
            .iter()
            .map(|name| {
                let route = graph.route(name).expect("indexed");
                let screen = Screen {
                    route: route.clone(),
                    path: graph.path(name).expect("indexed").to_vec(),
                    meta: metas.get(name).cloned().unwrap_or_default(),
                };
                (name.clone(), screen)
            })
            .collect();
        Ok(Self { screens })
    }

    pub fn get(&self, id: &str) -> Option<&Screen> {
        self.screens.get(id)
    }
}

/// How a GUI change came about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Assistant,
    User,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    /// A different screen became active.
    Navigation,
    /// Fields on the active screen changed.
    ParameterEdit,
    /// The active screen was addressed without changes.
    Reentry,
}

/// Record of one GUI change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuiTransition {
    pub kind: TransitionKind,
    pub origin: Origin,
    pub from: Option<String>,
    pub to: String,
    pub path: Vec<String>,
    /// Values applied by this transition, in declaration order.
    pub applied: Vec<(String, ParamValue)>,
    pub new_instance: bool,
    /// Canonical deep link reproducing the resulting screen state.
    pub link: String,
}

impl GuiTransition {
    pub fn changes_screen(&self) -> bool {
        self.kind == TransitionKind::Navigation
    }

    pub fn changes_state(&self) -> bool {
        self.kind != TransitionKind::Reentry
    }
}

/// What a tool invocation produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ToolOutcome {
    pub result: ToolResult,
    pub transition: Option<GuiTransition>,
}

pub type ToolHandler = Arc<dyn Fn(&ToolCall) -> Result<ToolOutcome, ToolError> + Send + Sync>;

/// A tool description plus the handler that already knows its target.
#[derive(Clone)]
pub struct BoundTool {
    pub spec: ToolSpec,
    /// Name of the ViewModel (or `router`) that owns the tool.
    pub owner: String,
    handler: ToolHandler,
}

impl BoundTool {
    pub fn new<F>(spec: ToolSpec, owner: impl Into<String>, handler: F) -> Self
    where
        F: Fn(&ToolCall) -> Result<ToolOutcome, ToolError> + Send + Sync + 'static,
    {
        Self {
            spec,
            owner: owner.into(),
            handler: Arc::new(handler),
        }
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn invoke(&self, call: &ToolCall) -> Result<ToolOutcome, ToolError> {
        (self.handler)(call)
    }
}

impl fmt::Debug for BoundTool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundTool")
            .field("name", &self.spec.name)
            .field("owner", &self.owner)
            .finish()
    }
}

/// Orders the tools for the active screen: the screen's own router tool
/// first, then view-local tools, then the remaining router tools in their
/// original order. A local tool shadows a router tool of the same name.
pub fn compose_tools(active: &ViewContext, router_tools: Vec<BoundTool>, local_tools: Vec<BoundTool>) -> Vec<BoundTool> {
    let mut current = None;
    let mut rest = Vec::with_capacity(router_tools.len());
    for tool in router_tools {
        if local_tools.iter().any(|l| l.name() == tool.name()) {
            continue;
        }
        if current.is_none() && tool.name() == active.screen_id {
            current = Some(tool);
        } else {
            rest.push(tool);
        }
    }
    let mut out = Vec::with_capacity(rest.len() + local_tools.len() + 1);
    out.extend(current);
    out.extend(local_tools);
    out.extend(rest);
    out
}

/// A ViewModel in a desktop-style hierarchy (workspace, window, panel).
#[derive(Debug, Clone)]
pub struct ViewModelNode {
    pub owner: String,
    /// Higher values are listed earlier among siblings.
    pub priority: i32,
    pub tools: Vec<BoundTool>,
    pub children: Vec<ViewModelNode>,
}

impl ViewModelNode {
    pub fn new(owner: impl Into<String>) -> Self {
        Self {
            owner: owner.into(),
            priority: 0,
            tools: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn with_priority(mut self, priority: i32) -> Self {
        self.priority = priority;
        self
    }

    pub fn with_tool(mut self, tool: BoundTool) -> Self {
        self.tools.push(tool);
        self
    }

    pub fn with_child(mut self, child: ViewModelNode) -> Self {
        self.children.push(child);
        self
    }
}

/// Collects the tools of a ViewModel tree: depth first, a node's own tools
/// before its children's, siblings by descending priority (stable).
pub fn compose_hierarchy(node: &ViewModelNode) -> Result<Vec<BoundTool>, CompositionError> {
    fn walk(node: &ViewModelNode, out: &mut Vec<BoundTool>, owners: &mut HashMap<String, String>) -> Result<(), CompositionError> {
        for tool in &node.tools {
            if let Some(first) = owners.get(tool.name()) {
                return Err(CompositionError {
                    name: tool.name().to_string(),
                    first_owner: first.clone(),
                    second_owner: node.owner.clone(),
                });
            }
            owners.insert(tool.name().to_string(), node.owner.clone());
            out.push(tool.clone());
        }
        let mut children: Vec<&ViewModelNode> = node.children.iter().collect();
        children.sort_by_key(|c| std::cmp::Reverse(c.priority));
        for child in children {
            walk(child, out, owners)?;
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(node, &mut out, &mut HashMap::new())?;
    Ok(out)
}

/// Spoken and graphical feedback for one tool call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackPlan {
    pub speech_text: String,
    pub highlight_targets: Vec<String>,
    pub history_entry: Option<String>,
}

/// Verbalizes a transition and picks the GUI elements to highlight.
///
/// Highlight ids use the `nav:<route>`, `field:<param>` and
/// `option:<member>` namespaces.
pub fn plan_feedback(call: &ToolCall, outcome: &GuiTransition, catalog: &ScreenCatalog) -> FeedbackPlan {
    let Some(screen) = catalog.get(&outcome.to) else {
        return FeedbackPlan {
            speech_text: format!("Done: {}", call.name),
            highlight_targets: Vec::new(),
            history_entry: None,
        };
    };
    let state = ViewContext {
        screen_id: outcome.to.clone(),
        parameter_values: outcome.applied.iter().cloned().collect(),
        dirty_flags: BTreeMap::new(),
    };
    let element_ids = || {
        outcome
            .applied
            .iter()
            .filter(|(name, _)| !screen.is_flag(name))
            .map(|(name, value)| match screen.route.param(name).map(|p| &p.kind) {
                Some(ParamKind::Enum(_)) => format!("option:{value}"),
                _ => format!("field:{name}"),
            })
    };
    match outcome.kind {
        TransitionKind::Navigation => FeedbackPlan {
            speech_text: screen.navigation_phrase(&state),
            highlight_targets: outcome
                .path
                .iter()
                .map(|seg| format!("nav:{seg}"))
                .chain(element_ids())
                .collect(),
            history_entry: Some(outcome.link.clone()),
        },
        TransitionKind::ParameterEdit => {
            let edits: Vec<String> = outcome
                .applied
                .iter()
                .filter(|(name, _)| !screen.is_flag(name))
                .map(|(name, value)| format!("{name} to {value}"))
                .collect();
            let speech_text = if edits.is_empty() {
                screen.navigation_phrase(&state)
            } else {
                format!("Set {}", edits.join(", "))
            };
            FeedbackPlan {
                speech_text,
                highlight_targets: element_ids().collect(),
                history_entry: Some(outcome.link.clone()),
            }
        }
        TransitionKind::Reentry => FeedbackPlan {
            speech_text: screen.navigation_phrase(&state),
            highlight_targets: Vec::new(),
            history_entry: None,
        },
    }
}

/// Navigation stack of live screen ViewModels. Only the top is active.
#[derive(Debug, Clone)]
pub struct ViewModelRegistry {
    catalog: Arc<ScreenCatalog>,
    stack: Vec<ViewContext>,
    forward: Vec<ViewContext>,
}

impl ViewModelRegistry {
    pub fn new(catalog: Arc<ScreenCatalog>, initial: ViewContext) -> Self {
        Self {
            catalog,
            stack: vec![initial],
            forward: Vec::new(),
        }
    }

    pub fn catalog(&self) -> &Arc<ScreenCatalog> {
        &self.catalog
    }

    pub fn active(&self) -> &ViewContext {
        self.stack.last().expect("stack is never empty")
    }

    pub fn depth(&self) -> usize {
        self.stack.len()
    }

    /// Replaces the active context in place.
    pub fn replace_active(&mut self, ctx: ViewContext) {
        *self.stack.last_mut().expect("stack is never empty") = ctx;
    }

    /// Pushes a new active context; the forward history is discarded.
    pub fn push(&mut self, ctx: ViewContext) {
        self.forward.clear();
        self.stack.push(ctx);
    }

    pub fn back(&mut self) -> bool {
        if self.stack.len() > 1 {
            let top = self.stack.pop().expect("len > 1");
            self.forward.push(top);
            true
        } else {
            false
        }
    }

    pub fn forward(&mut self) -> bool {
        match self.forward.pop() {
            Some(ctx) => {
                self.stack.push(ctx);
                true
            }
            None => false,
        }
    }

    pub fn screen_text(&self) -> String {
        let ctx = self.active();
        match self.catalog.get(&ctx.screen_id) {
            Some(screen) => screen.screen_text(ctx),
            None => ctx.screen_id.clone(),
        }
    }

    pub(crate) fn self_tool_spec(&self) -> Option<ToolSpec> {
        let ctx = self.active();
        let screen = self.catalog.get(&ctx.screen_id)?;
        screen.meta.self_tool.then(|| screen.self_tool_spec(ctx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tool::ParameterSpec;
    use std::collections::HashSet;

    fn value_args(pairs: &[(&str, ParamValue)]) -> Vec<(String, ParamValue)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    fn transfer_ctx(dest: &str, amount: f64) -> ViewContext {
        apply_parameters(
            &ViewContext::new("transfer"),
            &value_args(&[
                ("destination", ParamValue::Text(dest.into())),
                ("amount", ParamValue::Number(amount)),
            ]),
            false,
        )
    }

    fn dummy(name: &str, owner: &str) -> BoundTool {
        BoundTool::new(ToolSpec::new(name, name), owner, |_| {
            Ok(ToolOutcome {
                result: ToolResult::new(""),
                transition: None,
            })
        })
    }

    fn names(tools: &[BoundTool]) -> Vec<&str> {
        tools.iter().map(BoundTool::name).collect()
    }

    #[test]
    fn correction_merges() {
        let s = transfer_ctx("Robert", 50.0);
        let next = apply_parameters(&s, &value_args(&[("amount", ParamValue::Number(40.0))]), false);
        assert_eq!(next.value("destination"), Some(&ParamValue::Text("Robert".into())));
        assert_eq!(next.value("amount"), Some(&ParamValue::Number(40.0)));
    }

    #[test]
    fn new_instance_resets() {
        let s = transfer_ctx("Robert", 40.0);
        let next = apply_parameters(
            &s,
            &value_args(&[
                ("destination", ParamValue::Text("Mary".into())),
                ("amount", ParamValue::Number(50.0)),
            ]),
            true,
        );
        assert_eq!(next, transfer_ctx("Mary", 50.0));
    }

    #[test]
    fn empty_merge_is_identity() {
        let s = transfer_ctx("Robert", 40.0);
        assert_eq!(apply_parameters(&s, &[], false), s);
    }

    fn screen(route: DocumentedRoute, title: &str) -> Screen {
        Screen {
            path: vec![route.name.clone()],
            route,
            meta: ScreenMeta {
                title: Some(title.into()),
                ..Default::default()
            },
        }
    }

    fn transfer_route() -> DocumentedRoute {
        DocumentedRoute::new("transfer", "Transfer money")
            .with_param(ParameterSpec::new("destination", "", ParamKind::String))
            .with_param(ParameterSpec::new("amount", "", ParamKind::Number))
    }

    #[test]
    fn screen_text_examples() {
        let card = screen(
            DocumentedRoute::new("creditcard", "Show your credit card")
                .with_param(ParameterSpec::new("limit", "", ParamKind::Integer))
                .with_param(ParameterSpec::new(
                    "action",
                    "",
                    ParamKind::Enum(vec!["replace".into(), "cancel".into()]),
                )),
            "Credit Card",
        );
        let ctx = apply_parameters(
            &ViewContext::new("creditcard"),
            &value_args(&[("limit", ParamValue::Integer(9000))]),
            false,
        );
        let text = card.screen_text(&ctx);
        assert_eq!(
            text,
            "Credit Card\nlimit: 9000\nactions: set limit, choose action (replace, cancel)"
        );
        let empty = card.screen_text(&ViewContext::new("creditcard"));
        assert_eq!(
            empty,
            "Credit Card\nno fields filled\nactions: set limit, choose action (replace, cancel)"
        );

        let t = screen(transfer_route(), "Transfer");
        // inserted amount first; declaration order still wins
        let ctx = apply_parameters(
            &ViewContext::new("transfer"),
            &value_args(&[
                ("amount", ParamValue::Number(50.0)),
                ("destination", ParamValue::Text("Mary".into())),
            ]),
            false,
        );
        let text = t.screen_text(&ctx);
        let d = text.find("destination: Mary").unwrap();
        let a = text.find("amount: 50").unwrap();
        assert!(d < a);
        assert_eq!(text, t.screen_text(&ctx.clone()));
    }

    #[test]
    fn current_screen_tool_first() {
        let router: Vec<_> = ["home", "transfer", "creditcard", "map", "split_payment", "incidents"]
            .iter()
            .map(|n| dummy(n, "router"))
            .collect();
        let out = compose_tools(&ViewContext::new("creditcard"), router.clone(), vec![]);
        assert_eq!(names(&out), ["creditcard", "home", "transfer", "map", "split_payment", "incidents"]);
        let mut sorted_in: Vec<_> = names(&router);
        let mut sorted_out: Vec<_> = names(&out);
        sorted_in.sort();
        sorted_out.sort();
        assert_eq!(sorted_in, sorted_out);

        let out = compose_tools(
            &ViewContext::new("transfer"),
            router,
            vec![dummy("edit_transfer", "transfer"), dummy("map", "transfer")],
        );
        assert_eq!(
            names(&out),
            ["transfer", "edit_transfer", "map", "home", "creditcard", "split_payment", "incidents"]
        );
    }

    fn workspace() -> ViewModelNode {
        let mut ws = ViewModelNode::new("workspace").with_tool(dummy("open_file", "workspace"));
        for w in 0..2 {
            let owner = format!("window{w}");
            let mut window = ViewModelNode::new(owner.clone()).with_tool(dummy(&format!("close_{owner}"), &owner));
            for p in 0..3 {
                let panel = format!("panel{w}{p}");
                window = window.with_child(
                    ViewModelNode::new(panel.clone())
                        .with_tool(dummy(&format!("{panel}_refresh"), &panel))
                        .with_tool(dummy(&format!("{panel}_filter"), &panel)),
                );
            }
            ws = ws.with_child(window);
        }
        ws
    }

    /// Recursive multiset oracle over node tool names.
    fn all_names(node: &ViewModelNode, out: &mut Vec<String>) {
        out.extend(node.tools.iter().map(|t| t.name().to_string()));
        for c in &node.children {
            all_names(c, out);
        }
    }

    #[test]
    fn hierarchy_contains_every_tool_once() {
        let ws = workspace();
        let composed = compose_hierarchy(&ws).unwrap();
        let mut expected = Vec::new();
        all_names(&ws, &mut expected);
        assert_eq!(composed.len(), expected.len());
        let got: HashSet<_> = names(&composed).into_iter().map(str::to_string).collect();
        assert_eq!(got, expected.into_iter().collect::<HashSet<_>>());
        assert_eq!(composed[0].name(), "open_file");

        let with_router = compose_tools(&ViewContext::new("none"), composed.clone(), vec![]);
        assert_eq!(with_router.len(), composed.len());
    }

    #[test]
    fn hierarchy_degenerate_and_ordering() {
        let leaf = ViewModelNode::new("panel").with_tool(dummy("a", "panel")).with_tool(dummy("b", "panel"));
        assert_eq!(names(&compose_hierarchy(&leaf).unwrap()), ["a", "b"]);

        let tree = ViewModelNode::new("workspace")
            .with_tool(dummy("ws", "workspace"))
            .with_child(
                ViewModelNode::new("window")
                    .with_tool(dummy("win", "window"))
                    .with_child(ViewModelNode::new("panel").with_tool(dummy("pan", "panel"))),
            );
        assert_eq!(names(&compose_hierarchy(&tree).unwrap()), ["ws", "win", "pan"]);

        let prioritized = ViewModelNode::new("ws")
            .with_child(ViewModelNode::new("rare").with_tool(dummy("rare", "rare")))
            .with_child(ViewModelNode::new("frequent").with_priority(5).with_tool(dummy("frequent", "frequent")));
        assert_eq!(names(&compose_hierarchy(&prioritized).unwrap()), ["frequent", "rare"]);
    }

    #[test]
    fn hierarchy_collision_names_both_owners() {
        let tree = ViewModelNode::new("window")
            .with_child(ViewModelNode::new("left").with_tool(dummy("refresh", "left")))
            .with_child(ViewModelNode::new("right").with_tool(dummy("refresh", "right")));
        let err = compose_hierarchy(&tree).unwrap_err();
        assert_eq!(err.first_owner, "left");
        assert_eq!(err.second_owner, "right");
        assert!(err.to_string().contains("refresh"));
    }

    #[test]
    fn template_filling() {
        let ctx = apply_parameters(
            &ViewContext::new("map"),
            &value_args(&[("show", ParamValue::Text("offices".into()))]),
            false,
        );
        assert_eq!(fill_template("Showing {show} on the map", &ctx).unwrap(), "Showing offices on the map");
        assert_eq!(fill_template("Showing {missing}", &ctx), None);
        assert_eq!(fill_template("Showing the map", &ctx).unwrap(), "Showing the map");
    }
}
