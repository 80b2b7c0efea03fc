use thiserror::Error;

/// A value did not fit the parameter it was given for.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("unknown parameter `{parameter}`")]
    UnknownParameter { parameter: String },
    #[error("parameter `{parameter}` expects {expected}, got {found}")]
    TypeMismatch {
        parameter: String,
        expected: &'static str,
        found: String,
    },
    #[error("parameter `{parameter}`: `{value}` is not one of {members:?}")]
    NotInEnum {
        parameter: String,
        value: String,
        members: Vec<String>,
    },
    #[error("required parameter `{parameter}` is missing")]
    MissingRequired { parameter: String },
}

impl ValueError {
    pub fn parameter(&self) -> &str {
        match self {
            ValueError::UnknownParameter { parameter }
            | ValueError::TypeMismatch { parameter, .. }
            | ValueError::NotInEnum { parameter, .. }
            | ValueError::MissingRequired { parameter } => parameter,
        }
    }
}

/// Invalid declarative configuration. Messages carry a path such as
/// `routes/incidents/record_incident/parameters/severity`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("duplicate tool name `{name}` at `{first}` and `{second}`")]
    DuplicateName {
        name: String,
        first: String,
        second: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("malformed document: {0}")]
    Parse(String),
}

impl ConfigError {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Failure to turn a tool call or deep link into a GUI change.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DispatchError {
    #[error("unknown route `{0}`")]
    UnknownRoute(String),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error("malformed deep link `{link}`: {reason}")]
    MalformedLink { link: String, reason: String },
    #[error("screen `{0}` is not active")]
    InactiveScreen(String),
}

impl DispatchError {
    /// Name of the offending parameter, when the failure is parameter-level.
    pub fn parameter(&self) -> Option<&str> {
        match self {
            DispatchError::Value(v) => Some(v.parameter()),
            _ => None,
        }
    }
}

/// Two tools with the same name in one composed list.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("tool `{name}` is exposed by both `{first_owner}` and `{second_owner}`")]
pub struct CompositionError {
    pub name: String,
    pub first_owner: String,
    pub second_owner: String,
}

/// Error returned by a bound tool handler.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ToolError {
    pub parameter: Option<String>,
    pub message: String,
}

impl ToolError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            parameter: None,
            message: message.into(),
        }
    }
}

impl From<DispatchError> for ToolError {
    fn from(e: DispatchError) -> Self {
        ToolError {
            parameter: e.parameter().map(str::to_string),
            message: e.to_string(),
        }
    }
}

impl From<ValueError> for ToolError {
    fn from(e: ValueError) -> Self {
        DispatchError::from(e).into()
    }
}
