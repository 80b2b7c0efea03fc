//! Tool descriptions, tool calls and typed parameter values.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::ValueError;

/// Kind of value a parameter accepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamKind {
    String,
    Integer,
    Number,
    Boolean,
    Enum(Vec<String>),
    /// Array of strings restricted to the listed members. Only used by
    /// generated tools (the keyword matcher), never by routes.
    EnumArray(Vec<String>),
}

impl ParamKind {
    pub fn type_name(&self) -> &'static str {
        match self {
            ParamKind::String | ParamKind::Enum(_) => "string",
            ParamKind::Integer => "integer",
            ParamKind::Number => "number",
            ParamKind::Boolean => "boolean",
            ParamKind::EnumArray(_) => "array",
        }
    }

    pub fn enum_values(&self) -> Option<&[String]> {
        match self {
            ParamKind::Enum(v) | ParamKind::EnumArray(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ParamKind::Integer | ParamKind::Number)
    }
}

/// One documented parameter of a route or tool.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterSpec {
    pub name: String,
    pub description: String,
    pub kind: ParamKind,
    pub required: bool,
}

impl ParameterSpec {
    pub fn new(name: impl Into<String>, description: impl Into<String>, kind: ParamKind) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            kind,
            required: false,
        }
    }

    pub fn required(mut self) -> Self {
        self.required = true;
        self
    }

    /// JSON-schema fragment for this parameter.
    pub fn json_schema(&self) -> Value {
        let mut obj = Map::new();
        match &self.kind {
            ParamKind::EnumArray(members) => {
                obj.insert("type".into(), json!("array"));
                if !self.description.is_empty() {
                    obj.insert("description".into(), json!(self.description));
                }
                obj.insert("items".into(), json!({"type": "string", "enum": members}));
            }
            kind => {
                obj.insert("type".into(), json!(kind.type_name()));
                if !self.description.is_empty() {
                    obj.insert("description".into(), json!(self.description));
                }
                if let ParamKind::Enum(members) = kind {
                    obj.insert("enum".into(), json!(members));
                }
            }
        }
        Value::Object(obj)
    }
}

#[derive(Serialize, Deserialize)]
struct RawParameter {
    name: String,
    #[serde(default)]
    description: String,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(rename = "enum", default, skip_serializing_if = "Option::is_none")]
    enumeration: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    required: bool,
}

impl Serialize for ParameterSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (kind, enumeration) = match &self.kind {
            ParamKind::Enum(v) => ("string", Some(v.clone())),
            ParamKind::EnumArray(v) => ("array", Some(v.clone())),
            k => (k.type_name(), None),
        };
        RawParameter {
            name: self.name.clone(),
            description: self.description.clone(),
            kind: Some(kind.to_string()),
            enumeration,
            required: self.required,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ParameterSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RawParameter::deserialize(deserializer)?;
        let kind = match (raw.kind.as_deref(), raw.enumeration) {
            (Some("array"), Some(v)) => ParamKind::EnumArray(v),
            (None | Some("string") | Some("enum"), Some(v)) => ParamKind::Enum(v),
            (Some(other), Some(_)) => {
                return Err(D::Error::custom(format!(
                    "parameter `{}`: enumeration not allowed on type `{other}`",
                    raw.name
                )))
            }
            (Some("enum"), None) => {
                return Err(D::Error::custom(format!(
                    "parameter `{}`: type `enum` requires a non-empty `enum` list",
                    raw.name
                )))
            }
            (None | Some("string"), None) => ParamKind::String,
            (Some("integer"), None) => ParamKind::Integer,
            (Some("number"), None) => ParamKind::Number,
            (Some("boolean"), None) => ParamKind::Boolean,
            (Some(other), None) => {
                return Err(D::Error::custom(format!(
                    "parameter `{}`: unknown type `{other}`",
                    raw.name
                )))
            }
        };
        Ok(ParameterSpec {
            name: raw.name,
            description: raw.description,
            kind,
            required: raw.required,
        })
    }
}

/// A callable capability as presented to a language model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolSpec {
    pub name: String,
    pub description: String,
    #[serde(default)]
    pub parameters: Vec<ParameterSpec>,
}

impl ToolSpec {
    pub fn new(name: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            parameters: Vec::new(),
        }
    }

    pub fn with_param(mut self, param: ParameterSpec) -> Self {
        self.parameters.push(param);
        self
    }

    pub fn param(&self, name: &str) -> Option<&ParameterSpec> {
        self.parameters.iter().find(|p| p.name == name)
    }

    /// Object schema with `properties` and `required`, in declaration order.
    pub fn input_schema(&self) -> Value {
        let properties: Map<String, Value> = self
            .parameters
            .iter()
            .map(|p| (p.name.clone(), p.json_schema()))
            .collect();
        let required: Vec<&str> = self
            .parameters
            .iter()
            .filter(|p| p.required)
            .map(|p| p.name.as_str())
            .collect();
        let mut schema = Map::new();
        schema.insert("type".into(), json!("object"));
        schema.insert("properties".into(), Value::Object(properties));
        if !required.is_empty() {
            schema.insert("required".into(), json!(required));
        }
        Value::Object(schema)
    }

    /// Checks an argument map against this schema. Used after repair to
    /// decide whether a call conforms.
    pub fn validate(&self, args: &Map<String, Value>) -> Result<(), ValueError> {
        for (name, value) in args {
            let spec = self.param(name).ok_or_else(|| ValueError::UnknownParameter {
                parameter: name.clone(),
            })?;
            ParamValue::from_json(spec, value)?;
        }
        for p in self.parameters.iter().filter(|p| p.required) {
            if !args.contains_key(&p.name) {
                return Err(ValueError::MissingRequired {
                    parameter: p.name.clone(),
                });
            }
        }
        Ok(())
    }
}

/// A structured invocation of a tool produced by a model (or replayed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub name: String,
    #[serde(default, alias = "properties", alias = "parameters")]
    pub arguments: Map<String, Value>,
}

impl ToolCall {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            arguments: Map::new(),
        }
    }

    pub fn arg(mut self, name: impl Into<String>, value: impl Into<Value>) -> Self {
        self.arguments.insert(name.into(), value.into());
        self
    }

    /// Builds a call from a JSON object literal of arguments.
    pub fn with_args(name: impl Into<String>, args: Value) -> Self {
        let arguments = match args {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Self {
            name: name.into(),
            arguments,
        }
    }
}

/// The textual screen representation returned to the model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolResult {
    pub text: String,
}

impl ToolResult {
    pub fn new(text: impl Into<String>) -> Self {
        Self { text: text.into() }
    }
}

/// A value held by a screen field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Integer(i64),
    Number(f64),
    Text(String),
}

impl ParamValue {
    /// Strict conversion of a JSON argument for the given parameter.
    pub fn from_json(spec: &ParameterSpec, value: &Value) -> Result<Self, ValueError> {
        let mismatch = || ValueError::TypeMismatch {
            parameter: spec.name.clone(),
            expected: spec.kind.type_name(),
            found: value.to_string(),
        };
        match &spec.kind {
            ParamKind::String => value.as_str().map(|s| ParamValue::Text(s.to_string())).ok_or_else(mismatch),
            ParamKind::Integer => match value {
                Value::Number(n) => n
                    .as_i64()
                    .or_else(|| n.as_f64().filter(|f| f.fract() == 0.0 && f.abs() < 9.0e15).map(|f| f as i64))
                    .map(ParamValue::Integer)
                    .ok_or_else(mismatch),
                _ => Err(mismatch()),
            },
            ParamKind::Number => value
                .as_f64()
                .filter(|f| f.is_finite())
                .map(ParamValue::Number)
                .ok_or_else(mismatch),
            ParamKind::Boolean => value.as_bool().map(ParamValue::Bool).ok_or_else(mismatch),
            ParamKind::Enum(members) => {
                let s = value.as_str().ok_or_else(mismatch)?;
                if members.iter().any(|m| m == s) {
                    Ok(ParamValue::Text(s.to_string()))
                } else {
                    Err(ValueError::NotInEnum {
                        parameter: spec.name.clone(),
                        value: s.to_string(),
                        members: members.clone(),
                    })
                }
            }
            ParamKind::EnumArray(members) => {
                let items = value.as_array().ok_or_else(mismatch)?;
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    let s = item.as_str().ok_or_else(mismatch)?;
                    if !members.iter().any(|m| m == s) {
                        return Err(ValueError::NotInEnum {
                            parameter: spec.name.clone(),
                            value: s.to_string(),
                            members: members.clone(),
                        });
                    }
                    out.push(s);
                }
                Ok(ParamValue::Text(out.join(",")))
            }
        }
    }

    /// Parses the string form used in deep-link queries.
    pub fn parse(spec: &ParameterSpec, text: &str) -> Result<Self, ValueError> {
        let mismatch = || ValueError::TypeMismatch {
            parameter: spec.name.clone(),
            expected: spec.kind.type_name(),
            found: text.to_string(),
        };
        match &spec.kind {
            ParamKind::String | ParamKind::EnumArray(_) => Ok(ParamValue::Text(text.to_string())),
            ParamKind::Integer => text.parse::<i64>().map(ParamValue::Integer).map_err(|_| mismatch()),
            ParamKind::Number => text
                .parse::<f64>()
                .ok()
                .filter(|f| f.is_finite())
                .map(ParamValue::Number)
                .ok_or_else(mismatch),
            ParamKind::Boolean => match text {
                "true" => Ok(ParamValue::Bool(true)),
                "false" => Ok(ParamValue::Bool(false)),
                _ => Err(mismatch()),
            },
            ParamKind::Enum(members) => {
                if members.iter().any(|m| m == text) {
                    Ok(ParamValue::Text(text.to_string()))
                } else {
                    Err(ValueError::NotInEnum {
                        parameter: spec.name.clone(),
                        value: text.to_string(),
                        members: members.clone(),
                    })
                }
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ParamValue::Bool(b) => json!(b),
            ParamValue::Integer(i) => json!(i),
            ParamValue::Number(f) => json!(f),
            ParamValue::Text(s) => json!(s),
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            ParamValue::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Integer(i) => write!(f, "{i}"),
            ParamValue::Number(n) => write!(f, "{n}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_document_forms() {
        let p: ParameterSpec = serde_json::from_value(json!({
            "name": "action", "description": "Action to perform on the card",
            "enum": ["replace", "cancel"]
        }))
        .unwrap();
        assert_eq!(p.kind, ParamKind::Enum(vec!["replace".into(), "cancel".into()]));
        assert!(!p.required);

        let p: ParameterSpec =
            serde_json::from_value(json!({"name": "limit", "description": "New limit for the card", "type": "integer"}))
                .unwrap();
        assert_eq!(p.kind, ParamKind::Integer);

        let err = serde_json::from_value::<ParameterSpec>(json!({"name": "x", "type": "enum"})).unwrap_err();
        assert!(err.to_string().contains("non-empty"));
        let err = serde_json::from_value::<ParameterSpec>(json!({"name": "x", "type": "float"})).unwrap_err();
        assert!(err.to_string().contains("unknown type"));
    }

    #[test]
    fn schema_rendering_keeps_enum() {
        let spec = ToolSpec::new("creditcard", "Show your credit card")
            .with_param(ParameterSpec::new("limit", "New limit for the card", ParamKind::Integer))
            .with_param(ParameterSpec::new(
                "action",
                "Action to perform on the card",
                ParamKind::Enum(vec!["replace".into(), "cancel".into()]),
            ));
        let schema = spec.input_schema();
        assert_eq!(schema["properties"]["action"]["enum"], json!(["replace", "cancel"]));
        assert_eq!(schema["properties"]["limit"]["type"], "integer");
        assert!(schema.get("required").is_none());
    }

    #[test]
    fn value_rendering() {
        assert_eq!(ParamValue::Integer(9000).to_string(), "9000");
        assert_eq!(ParamValue::Bool(true).to_string(), "true");
        assert_eq!(ParamValue::Number(1.5).to_string(), "1.5");
        assert_eq!(ParamValue::Number(50.0).to_string(), "50");
    }

    #[test]
    fn strict_json_conversion() {
        let limit = ParameterSpec::new("limit", "", ParamKind::Integer);
        assert_eq!(ParamValue::from_json(&limit, &json!(9000)).unwrap(), ParamValue::Integer(9000));
        assert!(ParamValue::from_json(&limit, &json!("9000")).is_err());
        assert!(ParamValue::from_json(&limit, &json!(1.5)).is_err());
        let height = ParameterSpec::new("fire_height_m", "", ParamKind::Number);
        assert!(ParamValue::from_json(&height, &json!("1.0")).is_err());
    }

    #[test]
    fn call_accepts_properties_alias() {
        let call: ToolCall = serde_json::from_value(json!({
            "name": "transfer",
            "properties": {"isNewTransfer": true, "destination": "Mary", "amount": 50}
        }))
        .unwrap();
        assert_eq!(call.arguments.len(), 3);
        let keys: Vec<_> = call.arguments.keys().cloned().collect();
        assert_eq!(keys, ["isNewTransfer", "destination", "amount"]);
    }
}
