use std::fmt::Write as _;
use std::str::FromStr;

use langbar_assistant::Language;

use crate::suite::AccuracyReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(format!("unknown format `{other}` (expected text, csv or md)")),
        }
    }
}

/// Header and rows: model, size, then accuracy (%) and latency (s) per
/// language, plus the repaired accuracy when any report has it.
pub fn table(reports: &[AccuracyReport]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut languages: Vec<Language> = reports
        .iter()
        .flat_map(|r| r.summaries.iter().map(|s| s.language))
        .collect();
    languages.sort();
    languages.dedup();
    let sap = reports.iter().any(|r| r.summaries.iter().any(|s| s.mean_accuracy_sap.is_some()));

    let mut header = vec!["model".to_string(), "size".to_string()];
    for l in &languages {
        header.push(format!("accuracy_{l} (%)"));
        if sap {
            header.push(format!("accuracy_sap_{l} (%)"));
        }
        header.push(format!("latency_{l} (s)"));
    }
    let rows = reports
        .iter()
        .map(|r| {
            let mut row = vec![r.model.clone(), r.size.clone()];
            for l in &languages {
                let s = r.summary(*l);
                row.push(s.map(|s| format!("{:.1}", s.mean_accuracy * 100.0)).unwrap_or_default());
                if sap {
                    row.push(
                        s.and_then(|s| s.mean_accuracy_sap)
                            .map(|a| format!("{:.1}", a * 100.0))
                            .unwrap_or_default(),
                    );
                }
                row.push(
                    s.and_then(|s| s.mean_latency_s)
                        .map(|t| format!("{t:.2}"))
                        .unwrap_or_default(),
                );
            }
            row
        })
        .collect();
    (header, rows)
}

pub fn render_report(reports: &[AccuracyReport], format: Format) -> String {
    let (header, rows) = table(reports);
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).expect("in-memory write");
            for r in &rows {
                w.write_record(r).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
        }
        Format::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let rule: Vec<&str> = header
                .iter()
                .enumerate()
                .map(|(i, _)| if i < 2 { "---" } else { "---:" })
                .collect();
            let _ = writeln!(out, "| {} |", rule.join(" | "));
            for r in &rows {
                let _ = writeln!(out, "| {} |", r.join(" | "));
            }
            out
        }
        Format::Text => {
            let widths: Vec<usize> = (0..header.len())
                .map(|i| {
                    rows.iter()
                        .map(|r| r[i].len())
                        .chain([header[i].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        if i < 2 {
                            format!("{c:<w$}", w = widths[i])
                        } else {
                            format!("{c:>w$}", w = widths[i])
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            let mut out = line(&header) + "\n";
            for r in &rows {
                out += &line(r);
                out.push('\n');
            }
            out
        }
    }
}
