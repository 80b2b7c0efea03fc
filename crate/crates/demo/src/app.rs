use langbar_core::{AppModel, ConfigError};

/// The shipped demo configuration.
pub const DEMO_CONFIG: &str = include_str!("../config/demo.json");

/// Number of routes declared in [`DEMO_CONFIG`].
pub const DEMO_ROUTE_COUNT: usize = 12;

/// Banking screens, the incident desk, synonym tables and keyword commands.
pub fn build_demo_graph() -> Result<AppModel, ConfigError> {
    AppModel::from_json(DEMO_CONFIG)
}
