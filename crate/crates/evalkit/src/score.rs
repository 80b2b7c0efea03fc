use std::collections::{BTreeMap, BTreeSet};

use langbar_core::{ParamKind, ToolCall, ToolSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// How a parameter value is compared with the ideal one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matcher {
    /// Equal JSON values; numbers compare numerically.
    Exact,
    /// Equal to the ideal literal and a member of the declared enum.
    EnumStrict,
    /// A number within the closed range.
    NumericRange(f64, f64),
}

impl Matcher {
    pub fn matches(&self, ideal: &Value, actual: &Value, enum_values: Option<&[String]>) -> bool {
        match self {
            Matcher::Exact => values_equal(ideal, actual),
            Matcher::EnumStrict => {
                actual == ideal
                    && actual
                        .as_str()
                        .is_some_and(|s| enum_values.is_some_and(|e| e.iter().any(|m| m == s)))
            }
            Matcher::NumericRange(lo, hi) => actual.as_f64().is_some_and(|v| *lo <= v && v <= *hi),
        }
    }
}

fn values_equal(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => x.as_f64() == y.as_f64(),
        _ => a == b,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchKind {
    Name,
    Value,
    Omitted,
    Hallucinated,
    NoCall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    /// `name` for the function name slot, otherwise the parameter.
    pub slot: String,
    pub kind: MismatchKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub matched: usize,
    pub slots: usize,
    pub mismatches: Vec<Mismatch>,
}

impl Score {
    pub fn accuracy(&self) -> f64 {
        self.matched as f64 / self.slots as f64
    }

    /// Score of a case with no usable tool call.
    pub fn no_call(ideal: &ToolCall) -> Self {
        Self {
            matched: 0,
            slots: 1 + ideal.arguments.len(),
            mismatches: vec![Mismatch {
                slot: "no_call".into(),
                kind: MismatchKind::NoCall,
                expected: Some(Value::String(ideal.name.clone())),
                actual: None,
            }],
        }
    }
}

/// Scores `actual` against `ideal` slot by slot.
///
/// Slots are the function name plus every parameter named by either call.
/// A parameter present on one side only is a mismatch. A wrong function
/// name costs only the name slot. Parameters without an explicit matcher
/// use [`Matcher::EnumStrict`] when the ideal tool declares an enum for
/// them and [`Matcher::Exact`] otherwise.
pub fn score_call(ideal: &ToolCall, actual: &ToolCall, matchers: &BTreeMap<String, Matcher>, tools: &[ToolSpec]) -> Score {
    let tool = tools.iter().find(|t| t.name == ideal.name);
    let mut mismatches = Vec::new();
    let mut matched = 0;
    if actual.name == ideal.name {
        matched += 1;
    } else {
        mismatches.push(Mismatch {
            slot: "name".into(),
            kind: MismatchKind::Name,
            expected: Some(Value::String(ideal.name.clone())),
            actual: Some(Value::String(actual.name.clone())),
        });
    }
    let keys: BTreeSet<&String> = ideal.arguments.keys().chain(actual.arguments.keys()).collect();
    for key in &keys {
        let expected = ideal.arguments.get(*key);
        let got = actual.arguments.get(*key);
        let kind = match (expected, got) {
            (Some(e), Some(a)) => {
                let enum_values = tool.and_then(|t| t.param(key)).and_then(|p| match &p.kind {
                    ParamKind::Enum(v) => Some(v.as_slice()),
                    _ => None,
                });
                let matcher = matchers.get(*key).copied().unwrap_or(if enum_values.is_some() {
                    Matcher::EnumStrict
                } else {
                    Matcher::Exact
                });
                if matcher.matches(e, a, enum_values) {
                    matched += 1;
                    continue;
                }
                MismatchKind::Value
            }
            (Some(_), None) => MismatchKind::Omitted,
            (None, Some(_)) => MismatchKind::Hallucinated,
            (None, None) => unreachable!("key comes from one of the calls"),
        };
        mismatches.push(Mismatch {
            slot: key.to_string(),
            kind,
            expected: expected.cloned(),
            actual: got.cloned(),
        });
    }
    Score {
        matched,
        slots: 1 + keys.len(),
        mismatches,
    }
}
