//! Chat-completions request and response shapes.
//!
//! Tool call arguments travel as a JSON-encoded string, as the endpoint
//! convention requires.

use langbar_core::{ToolCall, ToolSpec};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::client::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    #[serde(default)]
    pub content: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tool_calls: Vec<WireToolCall>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_call_id: Option<String>,
}

impl ChatMessage {
    pub fn new(role: &str, content: impl Into<String>) -> Self {
        Self {
            role: role.to_string(),
            content: Some(content.into()),
            tool_calls: Vec::new(),
            tool_call_id: None,
        }
    }

    pub fn system(content: impl Into<String>) -> Self {
        Self::new("system", content)
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self::new("user", content)
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self::new("assistant", content)
    }

    pub fn tool_calls(calls: Vec<WireToolCall>) -> Self {
        Self {
            role: "assistant".into(),
            content: None,
            tool_calls: calls,
            tool_call_id: None,
        }
    }

    pub fn tool_result(id: impl Into<String>, content: impl Into<String>) -> Self {
        Self {
            role: "tool".into(),
            content: Some(content.into()),
            tool_calls: Vec::new(),
            tool_call_id: Some(id.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireToolCall {
    #[serde(default)]
    pub id: String,
    #[serde(rename = "type", default = "function_type")]
    pub kind: String,
    pub function: WireFunctionCall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireFunctionCall {
    pub name: String,
    /// JSON text. Some servers send an object instead; both are accepted.
    #[serde(default)]
    pub arguments: Value,
}

fn function_type() -> String {
    "function".into()
}

impl WireToolCall {
    pub fn from_call(id: impl Into<String>, call: &ToolCall) -> Self {
        Self {
            id: id.into(),
            kind: function_type(),
            function: WireFunctionCall {
                name: call.name.clone(),
                arguments: Value::String(Value::Object(call.arguments.clone()).to_string()),
            },
        }
    }

    pub fn to_call(&self) -> Result<ToolCall, ModelError> {
        let arguments = match &self.function.arguments {
            Value::Null => Map::new(),
            Value::Object(m) => m.clone(),
            Value::String(s) if s.trim().is_empty() => Map::new(),
            Value::String(s) => match serde_json::from_str::<Value>(s) {
                Ok(Value::Object(m)) => m,
                _ => return Err(ModelError::Malformed(format!("arguments of `{}` are not a JSON object", self.function.name))),
            },
            _ => return Err(ModelError::Malformed(format!("arguments of `{}` are not a JSON object", self.function.name))),
        };
        Ok(ToolCall {
            name: self.function.name.clone(),
            arguments,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolDef {
    #[serde(rename = "type")]
    pub kind: String,
    pub function: FunctionDef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionDef {
    pub name: String,
    pub description: String,
    pub parameters: Value,
}

impl ToolDef {
    pub fn from_spec(spec: &ToolSpec) -> Self {
        Self {
            kind: function_type(),
            function: FunctionDef {
                name: spec.name.clone(),
                description: spec.description.clone(),
                parameters: spec.input_schema(),
            },
        }
    }

    /// Name and description only, with an empty parameter object.
    pub fn name_only(spec: &ToolSpec) -> Self {
        Self {
            kind: function_type(),
            function: FunctionDef {
                name: spec.name.clone(),
                description: spec.description.clone(),
                parameters: serde_json::json!({"type": "object", "properties": {}}),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tools: Vec<ToolDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_choice: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
}

impl ChatRequest {
    pub fn new(model: impl Into<String>, messages: Vec<ChatMessage>) -> Self {
        Self {
            model: model.into(),
            messages,
            tools: Vec::new(),
            tool_choice: None,
            temperature: None,
        }
    }

    pub fn with_tools(mut self, tools: Vec<ToolDef>) -> Self {
        self.tools = tools;
        self
    }

    /// Forces a call to `name`.
    pub fn force(mut self, name: &str) -> Self {
        self.tool_choice = Some(serde_json::json!({"type": "function", "function": {"name": name}}));
        self
    }

    /// Text of the last user message.
    pub fn last_user_text(&self) -> Option<&str> {
        self.messages
            .iter()
            .rev()
            .find(|m| m.role == "user")
            .and_then(|m| m.content.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatChoice {
    #[serde(default)]
    pub index: u32,
    pub message: ChatMessage,
    #[serde(default)]
    pub finish_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    #[serde(default)]
    pub id: String,
    #[serde(default)]
    pub model: String,
    pub choices: Vec<ChatChoice>,
}

impl ChatResponse {
    pub fn from_message(message: ChatMessage) -> Self {
        let finish = if message.tool_calls.is_empty() { "stop" } else { "tool_calls" };
        Self {
            id: String::new(),
            model: String::new(),
            choices: vec![ChatChoice {
                index: 0,
                message,
                finish_reason: Some(finish.into()),
            }],
        }
    }

    pub fn message(&self) -> Option<&ChatMessage> {
        self.choices.first().map(|c| &c.message)
    }

    /// Every tool call of the first choice, in order.
    pub fn tool_calls(&self) -> Result<Vec<ToolCall>, ModelError> {
        self.message()
            .map(|m| m.tool_calls.iter().map(WireToolCall::to_call).collect())
            .unwrap_or_else(|| Ok(Vec::new()))
    }

    pub fn first_tool_call(&self) -> Result<Option<ToolCall>, ModelError> {
        match self.message().and_then(|m| m.tool_calls.first()) {
            Some(c) => c.to_call().map(Some),
            None => Ok(None),
        }
    }

    pub fn text(&self) -> Option<&str> {
        self.message().and_then(|m| m.content.as_deref())
    }
}
