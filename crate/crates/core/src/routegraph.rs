//! The GUI tree router.
//!
//! A tree of [`DocumentedRoute`]s is the single source of truth for both
//! navigation (deep links into views) and the navigation tools offered to a
//! language model: every documented route becomes one tool whose name is the
//! route name and whose parameters are the route's parameters.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, DispatchError, ValueError};
use crate::tool::{ParamKind, ParamValue, ParameterSpec, ToolCall, ToolResult, ToolSpec};
use crate::viewmodel::{
    apply_parameters_with, GuiTransition, Origin, Provenance, ScreenCatalog, TransitionKind, ViewContext,
    ViewModelRegistry,
};

/// Scheme prefix of the canonical deep-link text form.
pub const LINK_SCHEME: &str = "app://";

const QUERY_ENCODE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.').remove(b'~');

/// A navigable view with its documentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentedRoute {
    pub name: String,
    pub description: String,
    #[serde(default)]
    pub parameters: Vec<ParameterSpec>,
    #[serde(default)]
    pub children: Vec<DocumentedRoute>,
}

impl DocumentedRoute {
    pub fn new(name: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            parameters: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn with_param(mut self, param: ParameterSpec) -> Self {
        self.parameters.push(param);
        self
    }

    pub fn with_child(mut self, child: DocumentedRoute) -> Self {
        self.children.push(child);
        self
    }

    pub fn param(&self, name: &str) -> Option<&ParameterSpec> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn tool_spec(&self) -> ToolSpec {
        ToolSpec {
            name: self.name.clone(),
            description: self.description.clone(),
            parameters: self.parameters.clone(),
        }
    }
}

/// A reference to a view plus the values to fill into it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeepLink {
    pub path: Vec<String>,
    pub query: BTreeMap<String, String>,
}

impl DeepLink {
    pub fn target(&self) -> Option<&str> {
        self.path.last().map(String::as_str)
    }
}

impl fmt::Display for DeepLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{LINK_SCHEME}{}", self.path.join("/"))?;
        for (i, (k, v)) in self.query.iter().enumerate() {
            let sep = if i == 0 { '?' } else { '&' };
            write!(
                f,
                "{sep}{}={}",
                utf8_percent_encode(k, QUERY_ENCODE),
                utf8_percent_encode(v, QUERY_ENCODE)
            )?;
        }
        Ok(())
    }
}

impl FromStr for DeepLink {
    type Err = DispatchError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let malformed = |reason: &str| DispatchError::MalformedLink {
            link: text.to_string(),
            reason: reason.to_string(),
        };
        let rest = text
            .strip_prefix(LINK_SCHEME)
            .ok_or_else(|| malformed("expected `app://` scheme"))?;
        let (path, query) = match rest.split_once('?') {
            Some((p, q)) => (p, Some(q)),
            None => (rest, None),
        };
        if path.is_empty() {
            return Err(malformed("empty path"));
        }
        let path: Vec<String> = path.split('/').map(str::to_string).collect();
        if path.iter().any(String::is_empty) {
            return Err(malformed("empty path segment"));
        }
        let mut map = BTreeMap::new();
        if let Some(query) = query.filter(|q| !q.is_empty()) {
            for pair in query.split('&') {
                let (k, v) = pair.split_once('=').ok_or_else(|| malformed("query pair without `=`"))?;
                let k = percent_decode_str(k)
                    .decode_utf8()
                    .map_err(|_| malformed("query key is not UTF-8"))?;
                let v = percent_decode_str(v)
                    .decode_utf8()
                    .map_err(|_| malformed("query value is not UTF-8"))?;
                if map.insert(k.into_owned(), v.into_owned()).is_some() {
                    return Err(malformed("repeated query key"));
                }
            }
        }
        Ok(DeepLink { path, query: map })
    }
}

/// A deep link checked against the graph with every value parsed.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedLink {
    pub route: String,
    pub path: Vec<String>,
    /// Parsed values in the route's declaration order.
    pub values: Vec<(String, ParamValue)>,
}

/// Emits one tool per documented route in pre-order.
///
/// Fails when two routes anywhere in the tree share a name, since tool
/// lookup is by name only.
pub fn to_tools(roots: &[DocumentedRoute]) -> Result<Vec<ToolSpec>, ConfigError> {
    let mut seen: HashMap<&str, String> = HashMap::new();
    let mut tools = Vec::new();
    let mut stack: Vec<(&DocumentedRoute, String)> =
        roots.iter().rev().map(|r| (r, r.name.clone())).collect();
    while let Some((route, path)) = stack.pop() {
        if let Some(first) = seen.get(route.name.as_str()) {
            return Err(ConfigError::DuplicateName {
                name: route.name.clone(),
                first: first.clone(),
                second: path,
            });
        }
        seen.insert(&route.name, path.clone());
        tools.push(route.tool_spec());
        for child in route.children.iter().rev() {
            stack.push((child, format!("{path}/{}", child.name)));
        }
    }
    Ok(tools)
}

fn valid_identifier(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn validate_route(route: &DocumentedRoute, path: &str) -> Result<(), ConfigError> {
    if !valid_identifier(&route.name) {
        return Err(ConfigError::invalid(
            path,
            format!("route name `{}` is not a valid identifier", route.name),
        ));
    }
    if route.description.trim().is_empty() {
        return Err(ConfigError::invalid(path, "description must not be empty"));
    }
    let mut names = HashSet::new();
    for p in &route.parameters {
        let ppath = format!("{path}/parameters/{}", p.name);
        if !valid_identifier(&p.name) {
            return Err(ConfigError::invalid(ppath, "parameter name is not a valid identifier"));
        }
        if !names.insert(p.name.as_str()) {
            return Err(ConfigError::invalid(ppath, "duplicate parameter name"));
        }
        match &p.kind {
            ParamKind::Enum(members) if members.is_empty() => {
                return Err(ConfigError::invalid(ppath, "enumeration must not be empty"));
            }
            ParamKind::EnumArray(_) => {
                return Err(ConfigError::invalid(ppath, "array parameters are not allowed on routes"));
            }
            _ => {}
        }
    }
    let mut siblings = HashSet::new();
    for child in &route.children {
        if !siblings.insert(child.name.as_str()) {
            return Err(ConfigError::invalid(
                format!("{path}/{}", child.name),
                "duplicate sibling route name",
            ));
        }
        validate_route(child, &format!("{path}/{}", child.name))?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct RouteEntry {
    path: Vec<String>,
    /// Index path through `roots` / `children`.
    indices: Vec<usize>,
}

/// Immutable, validated route tree with a name index.
#[derive(Debug, Clone)]
pub struct RouteGraph {
    roots: Vec<DocumentedRoute>,
    index: HashMap<String, RouteEntry>,
    order: Vec<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RouteDocument {
    Many(Vec<DocumentedRoute>),
    One(DocumentedRoute),
}

impl RouteGraph {
    pub fn new(roots: Vec<DocumentedRoute>) -> Result<Self, ConfigError> {
        if roots.is_empty() {
            return Err(ConfigError::invalid("routes", "route graph must not be empty"));
        }
        let mut top = HashSet::new();
        for r in &roots {
            if !top.insert(r.name.as_str()) {
                return Err(ConfigError::invalid(r.name.clone(), "duplicate sibling route name"));
            }
            validate_route(r, &r.name)?;
        }
        let order = to_tools(&roots)?.into_iter().map(|t| t.name).collect();

        let mut index = HashMap::new();
        fn walk(
            routes: &[DocumentedRoute],
            path: &mut Vec<String>,
            indices: &mut Vec<usize>,
            index: &mut HashMap<String, RouteEntry>,
        ) {
            for (i, r) in routes.iter().enumerate() {
                path.push(r.name.clone());
                indices.push(i);
                index.insert(
                    r.name.clone(),
                    RouteEntry {
                        path: path.clone(),
                        indices: indices.clone(),
                    },
                );
                walk(&r.children, path, indices, index);
                path.pop();
                indices.pop();
            }
        }
        walk(&roots, &mut Vec::new(), &mut Vec::new(), &mut index);
        Ok(Self { roots, index, order })
    }

    /// Loads a route document: either one route object or an array of them.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let doc: RouteDocument = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        match doc {
            RouteDocument::Many(v) => Self::new(v),
            RouteDocument::One(r) => Self::new(vec![r]),
        }
    }

    pub fn roots(&self) -> &[DocumentedRoute] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Route names in pre-order.
    pub fn names(&self) -> &[String] {
        &self.order
    }

    pub fn route(&self, name: &str) -> Option<&DocumentedRoute> {
        let entry = self.index.get(name)?;
        let (first, rest) = entry.indices.split_first()?;
        let mut route = &self.roots[*first];
        for i in rest {
            route = &route.children[*i];
        }
        Some(route)
    }

    pub fn path(&self, name: &str) -> Option<&[String]> {
        self.index.get(name).map(|e| e.path.as_slice())
    }

    pub fn to_tools(&self) -> Vec<ToolSpec> {
        self.order
            .iter()
            .filter_map(|n| self.route(n))
            .map(DocumentedRoute::tool_spec)
            .collect()
    }

    /// Translates a (repaired) tool call into a deep link.
    pub fn build_deeplink(&self, call: &ToolCall) -> Result<DeepLink, DispatchError> {
        let route = self
            .route(&call.name)
            .ok_or_else(|| DispatchError::UnknownRoute(call.name.clone()))?;
        let mut query = BTreeMap::new();
        for (name, value) in &call.arguments {
            let spec = route.param(name).ok_or_else(|| ValueError::UnknownParameter {
                parameter: name.clone(),
            })?;
            let value = ParamValue::from_json(spec, value)?;
            query.insert(name.clone(), value.to_string());
        }
        Ok(DeepLink {
            path: self.path(&call.name).unwrap_or_default().to_vec(),
            query,
        })
    }

    /// Builds the canonical link for a set of already-typed values.
    pub fn link_for(&self, route: &str, values: &[(String, ParamValue)]) -> Option<DeepLink> {
        Some(DeepLink {
            path: self.path(route)?.to_vec(),
            query: values.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
        })
    }

    /// Checks a link against the graph and parses every value. Nothing is
    /// returned unless all values parse, so callers can apply atomically.
    pub fn resolve(&self, link: &DeepLink) -> Result<ResolvedLink, DispatchError> {
        let target = link.target().ok_or_else(|| DispatchError::MalformedLink {
            link: link.to_string(),
            reason: "empty path".into(),
        })?;
        let expected = self
            .path(target)
            .ok_or_else(|| DispatchError::UnknownRoute(target.to_string()))?;
        if expected != link.path.as_slice() {
            return Err(DispatchError::MalformedLink {
                link: link.to_string(),
                reason: format!("path does not match route location `{}`", expected.join("/")),
            });
        }
        let route = self.route(target).expect("indexed route");
        for key in link.query.keys() {
            if route.param(key).is_none() {
                return Err(ValueError::UnknownParameter { parameter: key.clone() }.into());
            }
        }
        let mut values = Vec::with_capacity(link.query.len());
        for spec in &route.parameters {
            if let Some(text) = link.query.get(&spec.name) {
                values.push((spec.name.clone(), ParamValue::parse(spec, text)?));
            }
        }
        Ok(ResolvedLink {
            route: target.to_string(),
            path: expected.to_vec(),
            values,
        })
    }
}

/// Result of executing a deep link against the live ViewModels.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchOutcome {
    pub result: ToolResult,
    pub transition: GuiTransition,
}

impl RouteGraph {
    /// Activates the link's target screen and fills in its parameters.
    ///
    /// All values are parsed before anything is touched; on error the
    /// registry is unchanged. Addressing a screen other than the active one
    /// creates a fresh ViewModel for it. Addressing the active screen merges
    /// the values, unless the screen's new-instance flag is set to `true`,
    /// in which case the screen starts over.
    pub fn dispatch(
        &self,
        link: &DeepLink,
        registry: &mut ViewModelRegistry,
        origin: Origin,
    ) -> Result<DispatchOutcome, DispatchError> {
        let resolved = self.resolve(link)?;
        let catalog = registry.catalog().clone();
        let screen = catalog
            .get(&resolved.route)
            .ok_or_else(|| DispatchError::UnknownRoute(resolved.route.clone()))?;
        let provenance = match origin {
            Origin::Assistant => Provenance::FromUserSpeech,
            Origin::User => Provenance::FromGuiInput,
        };
        let mut new_instance = false;
        let mut applied = Vec::with_capacity(resolved.values.len());
        for (name, value) in resolved.values {
            if screen.is_flag(&name) {
                new_instance = value.as_bool() == Some(true);
            } else {
                applied.push((name, value));
            }
        }

        let from = registry.active().screen_id.clone();
        let kind = if from != resolved.route {
            let ctx = apply_parameters_with(&ViewContext::new(resolved.route.clone()), &applied, true, provenance);
            registry.push(ctx);
            TransitionKind::Navigation
        } else if applied.is_empty() && !new_instance {
            TransitionKind::Reentry
        } else {
            let ctx = apply_parameters_with(registry.active(), &applied, new_instance, provenance);
            registry.replace_active(ctx);
            TransitionKind::ParameterEdit
        };
        Ok(self.outcome(registry, kind, origin, Some(from), applied, new_instance))
    }

    /// Reproduces a screen state from a history link: the target screen is
    /// rebuilt from exactly the link's values.
    pub fn restore(&self, link: &DeepLink, registry: &mut ViewModelRegistry) -> Result<DispatchOutcome, DispatchError> {
        let resolved = self.resolve(link)?;
        let catalog = registry.catalog().clone();
        let screen = catalog
            .get(&resolved.route)
            .ok_or_else(|| DispatchError::UnknownRoute(resolved.route.clone()))?;
        let applied: Vec<_> = resolved.values.into_iter().filter(|(n, _)| !screen.is_flag(n)).collect();
        let from = registry.active().screen_id.clone();
        let ctx = apply_parameters_with(
            &ViewContext::new(resolved.route.clone()),
            &applied,
            true,
            Provenance::FromGuiInput,
        );
        let kind = if from == resolved.route {
            registry.replace_active(ctx);
            TransitionKind::ParameterEdit
        } else {
            registry.push(ctx);
            TransitionKind::Navigation
        };
        Ok(self.outcome(registry, kind, Origin::User, Some(from), applied, true))
    }

    /// Canonical link of the active screen's full state.
    pub fn state_link(&self, ctx: &ViewContext, catalog: &ScreenCatalog) -> String {
        let values: Vec<(String, ParamValue)> = match catalog.get(&ctx.screen_id) {
            Some(screen) => screen
                .route
                .parameters
                .iter()
                .filter_map(|p| ctx.parameter_values.get(&p.name).map(|v| (p.name.clone(), v.clone())))
                .collect(),
            None => ctx.parameter_values.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        };
        self.link_for(&ctx.screen_id, &values)
            .map(|l| l.to_string())
            .unwrap_or_else(|| format!("{LINK_SCHEME}{}", ctx.screen_id))
    }

    pub(crate) fn outcome(
        &self,
        registry: &ViewModelRegistry,
        kind: TransitionKind,
        origin: Origin,
        from: Option<String>,
        applied: Vec<(String, ParamValue)>,
        new_instance: bool,
    ) -> DispatchOutcome {
        let active = registry.active();
        let transition = GuiTransition {
            kind,
            origin,
            from,
            to: active.screen_id.clone(),
            path: self.path(&active.screen_id).map(<[String]>::to_vec).unwrap_or_default(),
            applied,
            new_instance,
            link: self.state_link(active, registry.catalog()),
        };
        DispatchOutcome {
            result: ToolResult::new(registry.screen_text()),
            transition,
        }
    }
}
