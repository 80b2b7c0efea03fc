//! Schema-aligned repair of model tool calls.
//!
//! Small models regularly produce calls that are almost right: numbers in
//! quotes, `null` for parameters the user never mentioned, or enumeration
//! values copied from the user's wording ("power cell" where the schema
//! says "battery"). Knowing the schema, most of these can be repaired
//! deterministically. Every change is recorded in a [`RepairLog`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::error::ConfigError;
use crate::tool::{ParamKind, ParamValue, ToolCall, ToolSpec};

/// Which rule changed (or failed to change) a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairRule {
    NumberCoercion,
    NullDrop,
    EnumExactCase,
    EnumArticle,
    EnumSynonym,
    EnumPlural,
    EnumLevenshtein,
    /// The value does not conform and no rule applies.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairEntry {
    pub parameter: String,
    pub original: Value,
    /// `None` when the parameter was dropped.
    pub repaired: Option<Value>,
    pub rule: RepairRule,
}

impl RepairEntry {
    pub fn is_unrepairable(&self) -> bool {
        self.rule == RepairRule::None
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RepairLog {
    pub entries: Vec<RepairEntry>,
}

impl RepairLog {
    /// True when at least one parameter could not be made to conform.
    pub fn flagged(&self) -> bool {
        self.entries.iter().any(RepairEntry::is_unrepairable)
    }

    pub fn unrepairable(&self) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(|e| e.is_unrepairable())
            .map(|e| e.parameter.as_str())
    }

    pub fn changed(&self) -> usize {
        self.entries.iter().filter(|e| !e.is_unrepairable()).count()
    }
}

/// Synonym phrases per enumeration member.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SynonymTable(BTreeMap<String, Vec<String>>);

impl SynonymTable {
    /// Builds a table; phrases are stored lowercase and a phrase may not
    /// name two members.
    pub fn new<I, M, P>(entries: I) -> Result<Self, ConfigError>
    where
        I: IntoIterator<Item = (M, Vec<P>)>,
        M: Into<String>,
        P: AsRef<str>,
    {
        let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (member, phrases) in entries {
            let member = member.into();
            let list = map.entry(member).or_default();
            list.extend(phrases.iter().map(|p| normalize(p.as_ref())));
        }
        let table = SynonymTable(map);
        table.validate("synonyms")?;
        Ok(table)
    }

    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
        for (member, phrases) in &self.0 {
            for phrase in phrases {
                if phrase != &phrase.to_lowercase() {
                    return Err(ConfigError::invalid(
                        format!("{path}/{member}"),
                        format!("synonym `{phrase}` must be lowercase"),
                    ));
                }
                if let Some(other) = owner.insert(phrase, member) {
                    if other != member {
                        return Err(ConfigError::invalid(
                            format!("{path}/{member}"),
                            format!("synonym `{phrase}` also maps to `{other}`"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn phrases(&self, member: &str) -> &[String] {
        self.0.get(member).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn members(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Unit-cost edit distance (insert, delete, substitute) over case-folded
/// characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().flat_map(char::to_lowercase).collect();
    let b: Vec<char> = b.chars().flat_map(char::to_lowercase).collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Largest distance accepted when matching against `candidate`.
pub fn levenshtein_threshold(candidate: &str) -> usize {
    (candidate.chars().count() / 4).max(1)
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn strip_article(s: &str) -> &str {
    for article in ["the ", "an ", "a "] {
        if let Some(rest) = s.strip_prefix(article) {
            return rest.trim_start();
        }
    }
    s
}

/// Folds a plural last word to its singular using a handful of English rules.
pub fn singularize(s: &str) -> String {
    let (head, word) = match s.rsplit_once(' ') {
        Some((h, w)) => (Some(h), w),
        None => (None, s),
    };
    let single = if word.len() > 3 && word.ends_with("ies") {
        format!("{}y", &word[..word.len() - 3])
    } else if ["ches", "shes", "sses", "xes", "zes"].iter().any(|e| word.ends_with(e)) {
        word[..word.len() - 2].to_string()
    } else if word.len() > 1 && word.ends_with('s') && !word.ends_with("ss") {
        word[..word.len() - 1].to_string()
    } else {
        word.to_string()
    };
    match head {
        Some(h) => format!("{h} {single}"),
        None => single,
    }
}

fn unique<'a>(mut hits: impl Iterator<Item = &'a String>) -> Option<&'a String> {
    let first = hits.next()?;
    if hits.all(|h| h == first) {
        Some(first)
    } else {
        None
    }
}

/// Runs the enumeration pipeline in its fixed order.
fn coerce_enum(value: &str, members: &[String], synonyms: &SynonymTable) -> Option<(String, RepairRule)> {
    let folded = normalize(value);
    if let Some(m) = unique(members.iter().filter(|m| normalize(m) == folded)) {
        return Some((m.clone(), RepairRule::EnumExactCase));
    }
    let bare = strip_article(&folded);
    if bare != folded {
        if let Some(m) = unique(members.iter().filter(|m| normalize(m) == bare)) {
            return Some((m.clone(), RepairRule::EnumArticle));
        }
    }
    if let Some(m) = unique(
        members
            .iter()
            .filter(|m| synonyms.phrases(m).iter().any(|p| p == bare || *p == folded)),
    ) {
        return Some((m.clone(), RepairRule::EnumSynonym));
    }
    let single = singularize(bare);
    if let Some(m) = unique(members.iter().filter(|m| {
        let nm = normalize(m);
        nm == single
            || singularize(&nm) == single
            || synonyms.phrases(m).iter().any(|p| *p == single || singularize(p) == single)
    })) {
        return Some((m.clone(), RepairRule::EnumPlural));
    }
    let near = members.iter().filter(|m| {
        let nm = normalize(m);
        std::iter::once(nm.as_str())
            .chain(synonyms.phrases(m).iter().map(String::as_str))
            .any(|cand| levenshtein(bare, cand) <= levenshtein_threshold(cand))
    });
    unique(near).map(|m| (m.clone(), RepairRule::EnumLevenshtein))
}

fn number_from_text(text: &str, integer: bool) -> Option<Value> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Ok(i) = t.parse::<i64>() {
        return Some(Value::from(i));
    }
    let f = t.parse::<f64>().ok().filter(|f| f.is_finite())?;
    if integer {
        (f.fract() == 0.0 && f.abs() < 9.0e15).then(|| Value::from(f as i64))
    } else {
        Number::from_f64(f).map(Value::Number)
    }
}

fn is_null(value: &Value) -> bool {
    match value {
        Value::Null => true,
        Value::String(s) => s.trim().eq_ignore_ascii_case("null"),
        _ => false,
    }
}

/// Repairs one value; `Ok(None)` means the value already conforms.
fn repair_value(kind: &ParamKind, value: &Value, synonyms: &SynonymTable) -> Result<Option<(Value, RepairRule)>, ()> {
    match (kind, value) {
        (ParamKind::Integer, Value::String(s)) => number_from_text(s, true)
            .map(|v| Some((v, RepairRule::NumberCoercion)))
            .ok_or(()),
        (ParamKind::Integer, Value::Number(n)) if n.as_i64().is_none() => n
            .as_f64()
            .filter(|f| f.fract() == 0.0 && f.abs() < 9.0e15)
            .map(|f| Some((Value::from(f as i64), RepairRule::NumberCoercion)))
            .ok_or(()),
        (ParamKind::Number, Value::String(s)) => number_from_text(s, false)
            .map(|v| Some((v, RepairRule::NumberCoercion)))
            .ok_or(()),
        (ParamKind::String, Value::Number(n)) => Ok(Some((Value::String(n.to_string()), RepairRule::NumberCoercion))),
        (ParamKind::Enum(members), Value::String(s)) => {
            if members.iter().any(|m| m == s) {
                return Ok(None);
            }
            coerce_enum(s, members, synonyms)
                .map(|(m, rule)| Some((Value::String(m), rule)))
                .ok_or(())
        }
        (ParamKind::Enum(members), Value::Number(n)) => {
            let text = n.to_string();
            if members.contains(&text) {
                return Ok(Some((Value::String(text), RepairRule::NumberCoercion)));
            }
            coerce_enum(&text, members, synonyms)
                .map(|(m, rule)| Some((Value::String(m), rule)))
                .ok_or(())
        }
        (kind, value) => {
            let probe = crate::tool::ParameterSpec::new("_", "", kind.clone());
            ParamValue::from_json(&probe, value).map(|_| None).map_err(|_| ())
        }
    }
}

/// Repairs a call against its schema.
///
/// Per parameter: `null` (or the text "null") is dropped; numeric text is
/// turned into a number for numeric parameters and bare numbers into text
/// for string parameters; enumeration values go through exact, case-fold,
/// article, synonym, plural and edit-distance matching, in that order.
/// Conforming values pass through unchanged. Parameters that cannot be made
/// to conform (including ones the schema does not declare) are kept as is
/// and logged with [`RepairRule::None`].
pub fn repair_call(call: &ToolCall, schema: &ToolSpec, synonyms: &SynonymTable) -> (ToolCall, RepairLog) {
    let mut out = ToolCall::new(call.name.clone());
    let mut log = RepairLog::default();
    for (name, value) in &call.arguments {
        if is_null(value) {
            log.entries.push(RepairEntry {
                parameter: name.clone(),
                original: value.clone(),
                repaired: None,
                rule: RepairRule::NullDrop,
            });
            continue;
        }
        let outcome = match schema.param(name) {
            Some(spec) => repair_value(&spec.kind, value, synonyms),
            None => Err(()),
        };
        match outcome {
            Ok(None) => {
                out.arguments.insert(name.clone(), value.clone());
            }
            Ok(Some((repaired, rule))) => {
                log.entries.push(RepairEntry {
                    parameter: name.clone(),
                    original: value.clone(),
                    repaired: Some(repaired.clone()),
                    rule,
                });
                out.arguments.insert(name.clone(), repaired);
            }
            Err(()) => {
                log.entries.push(RepairEntry {
                    parameter: name.clone(),
                    original: value.clone(),
                    repaired: Some(value.clone()),
                    rule: RepairRule::None,
                });
                out.arguments.insert(name.clone(), value.clone());
            }
        }
    }
    (out, log)
}
