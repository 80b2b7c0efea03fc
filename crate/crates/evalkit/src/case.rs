use std::collections::BTreeMap;
use std::path::Path;

use langbar_assistant::Language;
use langbar_core::{ParamKind, ToolCall, ToolSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::score::Matcher;

/// One utterance with the tool call it should produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalCase {
    pub id: String,
    pub language: Language,
    pub utterance: String,
    /// Offered to the model in this order.
    pub tools: Vec<ToolSpec>,
    pub ideal: ToolCall,
    #[serde(default)]
    pub matchers: BTreeMap<String, Matcher>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

impl EvalCase {
    pub fn tool(&self, name: &str) -> Option<&ToolSpec> {
        self.tools.iter().find(|t| t.name == name)
    }

    pub fn validate(&self) -> Result<(), String> {
        let tool = self
            .tool(&self.ideal.name)
            .ok_or_else(|| format!("{}: ideal names unknown tool `{}`", self.id, self.ideal.name))?;
        tool.validate(&self.ideal.arguments)
            .map_err(|e| format!("{}: ideal does not validate: {e}", self.id))?;
        for (param, matcher) in &self.matchers {
            let spec = tool
                .param(param)
                .ok_or_else(|| format!("{}: matcher for unknown parameter `{param}`", self.id))?;
            if matches!(matcher, Matcher::NumericRange(..)) && !spec.kind.is_numeric() {
                return Err(format!("{}: numeric_range on non-numeric `{param}`", self.id));
            }
            if matches!(matcher, Matcher::EnumStrict) && !matches!(spec.kind, ParamKind::Enum(_)) {
                return Err(format!("{}: enum_strict on non-enum `{param}`", self.id));
            }
        }
        Ok(())
    }
}

/// Parses line-delimited cases. Blank lines are skipped.
pub fn parse_jsonl(text: &str) -> Result<Vec<EvalCase>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| DatasetError::Line { line: i + 1, message };
        let case: EvalCase = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        case.validate().map_err(err)?;
        out.push(case);
    }
    Ok(out)
}

pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Vec<EvalCase>, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_jsonl(&text)
}
