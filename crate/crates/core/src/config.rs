//! Declarative app configuration: routes, screen presentation, synonym
//! tables and command patterns in one JSON document.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::fastpath::{CommandPattern, FastPath};
use crate::routegraph::{DocumentedRoute, RouteGraph};
use crate::sap::SynonymTable;
use crate::tool::ParamKind;
use crate::viewmodel::{ScreenCatalog, ScreenMeta};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppConfig {
    pub initial_screen: String,
    pub routes: Vec<DocumentedRoute>,
    #[serde(default)]
    pub screens: BTreeMap<String, ScreenMeta>,
    /// Tool name → synonym table for that tool's enumerations.
    #[serde(default)]
    pub synonyms: BTreeMap<String, SynonymTable>,
    #[serde(default)]
    pub fastpath: Vec<CommandPattern>,
}

/// A validated app model shared by sessions.
#[derive(Debug, Clone)]
pub struct AppModel {
    pub graph: Arc<RouteGraph>,
    pub catalog: Arc<ScreenCatalog>,
    pub synonyms: BTreeMap<String, SynonymTable>,
    pub fastpath: FastPath,
    pub initial_screen: String,
}

impl AppModel {
    pub fn from_config(config: AppConfig) -> Result<Self, ConfigError> {
        let graph = RouteGraph::new(config.routes)?;
        if graph.route(&config.initial_screen).is_none() {
            return Err(ConfigError::invalid(
                "initial_screen",
                format!("no route named `{}`", config.initial_screen),
            ));
        }
        let catalog = ScreenCatalog::new(&graph, &config.screens)?;
        for (tool, table) in &config.synonyms {
            let path = format!("synonyms/{tool}");
            let route = graph
                .route(tool)
                .ok_or_else(|| ConfigError::invalid(&path, "no tool with this name"))?;
            table.validate(&path)?;
            for member in table.members() {
                let declared = route.parameters.iter().any(|p| match &p.kind {
                    ParamKind::Enum(m) => m.iter().any(|x| x == member),
                    _ => false,
                });
                if !declared {
                    return Err(ConfigError::invalid(
                        format!("{path}/{member}"),
                        "not a member of any enumeration of this tool",
                    ));
                }
            }
        }
        let fastpath = FastPath::new(config.fastpath)?;
        Ok(Self {
            graph: Arc::new(graph),
            catalog: Arc::new(catalog),
            synonyms: config.synonyms,
            fastpath,
            initial_screen: config.initial_screen,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: AppConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Self::from_config(config)
    }

    pub fn synonyms_for(&self, tool: &str) -> SynonymTable {
        self.synonyms.get(tool).cloned().unwrap_or_default()
    }
}
