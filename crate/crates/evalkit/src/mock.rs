//! Scripted model stand-ins for running a suite offline.

use std::path::Path;

use langbar_assistant::{ScriptedClient, ScriptedReply};
use serde::Deserialize;

use crate::case::EvalCase;

#[derive(Debug, Deserialize)]
struct ScriptLine {
    utterance: String,
    reply: ScriptedReply,
}

/// Replies with each case's ideal call.
pub fn ideal_echo(cases: &[EvalCase]) -> ScriptedClient {
    ScriptedClient::keyed(
        cases
            .iter()
            .map(|c| (c.utterance.clone(), ScriptedReply::Call(c.ideal.clone()))),
    )
}

/// Parses a mock script: one `{"utterance": ..., "reply": ...}` per line.
pub fn parse_script(text: &str) -> Result<Vec<(String, ScriptedReply)>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<ScriptLine>(l)
                .map(|s| (s.utterance, s.reply))
                .map_err(|e| format!("line {}: {e}", i + 1))
        })
        .collect()
}

pub fn load_script(path: impl AsRef<Path>) -> Result<Vec<(String, ScriptedReply)>, String> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_script(&text).map_err(|e| format!("{}: {e}", path.display()))
}
