#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Runs the demo binary in stdio MCP mode on the recorded client script.
pub fn stdio_transcript() -> String {
    let input = std::fs::read(golden("mcp_session.in.jsonl")).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_langbar-demo"))
        .arg("--stdio")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&input).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

/// Zeroes every `timestamp` value, including inside embedded JSON text.
pub fn normalize_timestamps(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(i) = rest.find("timestamp") {
        let after = &rest[i + "timestamp".len()..];
        let sep = after.find(|c: char| c.is_ascii_digit()).filter(|&j| {
            let s = &after[..j];
            s == "\":" || s == "\\\":"
        });
        match sep {
            Some(j) => {
                out.push_str(&rest[..i + "timestamp".len() + j]);
                out.push('0');
                let digits = after[j..].find(|c: char| !c.is_ascii_digit()).unwrap_or(after.len() - j);
                rest = &after[j + digits..];
            }
            None => {
                out.push_str(&rest[..i + "timestamp".len()]);
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}
