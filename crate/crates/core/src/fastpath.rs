//! Direct keyword matching of short commands after transcription.
//!
//! Patterns are matched against the whole trimmed utterance, so a back
//! pattern fires on "go back" but not on "backpack". A matched command
//! skips the language model entirely. The same matcher is also offered as
//! a `match_user_input` tool for assistants that do not bypass it.

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{ConfigError, ToolError};
use crate::tool::{ParamKind, ParameterSpec, ToolCall, ToolSpec};

pub const MATCH_TOOL_NAME: &str = "match_user_input";

/// A configured command pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandPattern {
    pub pattern: String,
    pub command_id: String,
    #[serde(default)]
    pub description: String,
}

impl CommandPattern {
    pub fn new(pattern: impl Into<String>, command_id: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            pattern: pattern.into(),
            command_id: command_id.into(),
            description: description.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandMatch {
    pub command_id: String,
    pub matched_text: String,
}

#[derive(Debug, Clone)]
struct Compiled {
    source: CommandPattern,
    anchored: Regex,
}

/// Compiled, ordered set of command patterns.
#[derive(Debug, Clone, Default)]
pub struct FastPath {
    patterns: Vec<Compiled>,
}

impl FastPath {
    pub fn new(patterns: Vec<CommandPattern>) -> Result<Self, ConfigError> {
        let mut compiled = Vec::with_capacity(patterns.len());
        for (i, p) in patterns.into_iter().enumerate() {
            let anchored = Regex::new(&format!("^(?:{})$", p.pattern))
                .map_err(|e| ConfigError::invalid(format!("fastpath/{i}"), e.to_string()))?;
            compiled.push(Compiled { source: p, anchored });
        }
        Ok(Self { patterns: compiled })
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> impl Iterator<Item = &CommandPattern> {
        self.patterns.iter().map(|c| &c.source)
    }

    /// First pattern in list order that covers the whole trimmed input.
    pub fn match_user_input(&self, text: &str) -> Option<CommandMatch> {
        self.match_among(text, |_| true)
    }

    fn match_among(&self, text: &str, allowed: impl Fn(&str) -> bool) -> Option<CommandMatch> {
        let text = text.trim();
        if text.is_empty() {
            return None;
        }
        self.patterns
            .iter()
            .filter(|c| allowed(&c.source.pattern))
            .find(|c| c.anchored.is_match(text))
            .map(|c| CommandMatch {
                command_id: c.source.command_id.clone(),
                matched_text: text.to_string(),
            })
    }

    /// The matcher as a tool, or `None` when no patterns are registered.
    pub fn as_tool(&self) -> Option<ToolSpec> {
        if self.patterns.is_empty() {
            return None;
        }
        let members = self.patterns.iter().map(|c| c.source.pattern.clone()).collect();
        Some(ToolSpec {
            name: MATCH_TOOL_NAME.into(),
            description: "Check user input against specified regular expressions and return matched input.".into(),
            parameters: vec![
                ParameterSpec::new("user_input", "", ParamKind::String).required(),
                ParameterSpec::new("regexps", "regular expressions for matching.", ParamKind::EnumArray(members))
                    .required(),
            ],
        })
    }

    /// Executes a `match_user_input` tool call. Only the listed (and
    /// registered) patterns take part, in registration order.
    pub fn call_tool(&self, call: &ToolCall) -> Result<Option<CommandMatch>, ToolError> {
        let spec = self.as_tool().ok_or_else(|| ToolError::new("no command patterns registered"))?;
        spec.validate(&call.arguments).map_err(ToolError::from)?;
        let input = call.arguments["user_input"].as_str().unwrap_or_default();
        let listed: Vec<&str> = match &call.arguments["regexps"] {
            Value::Array(items) => items.iter().filter_map(Value::as_str).collect(),
            _ => Vec::new(),
        };
        Ok(self.match_among(input, |p| listed.contains(&p)))
    }
}
