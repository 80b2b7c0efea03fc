use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use langbar_assistant::{HttpClient, Language, ModelClient, ScriptedClient};
use langbar_core::SynonymTable;
use langbar_evalkit::{load_jsonl, mock, render_report, run_suite, EvalCase, Format, RunConfig};

#[derive(Parser)]
#[command(name = "evalkit", version, about = "Score a model's tool calls against ideal responses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run datasets against an endpoint or a mock and print the table.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Parser)]
struct RunArgs {
    /// Line-delimited case file; repeat for several languages.
    #[arg(long, required = true)]
    dataset: Vec<PathBuf>,
    /// Chat-completions URL.
    #[arg(long, conflicts_with = "mock", required_unless_present = "mock")]
    endpoint: Option<String>,
    /// Mock script file(s), or `ideal` to echo every ideal call.
    #[arg(long)]
    mock: Vec<String>,
    #[arg(long, default_value = "mock")]
    model: String,
    /// Size label shown in the table.
    #[arg(long, default_value = "")]
    size: String,
    /// Only run cases in this language.
    #[arg(long)]
    language: Option<Language>,
    /// File with a system prompt replacing the built-in one.
    #[arg(long)]
    system_prompt: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "off")]
    sap: Switch,
    /// JSON object mapping tool names to synonym tables, used by --sap.
    #[arg(long)]
    synonyms: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long, default_value = "text")]
    format: Format,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-case results as JSON.
    #[arg(long)]
    details: Option<PathBuf>,
    #[arg(long, default_value_t = 120)]
    timeout_s: u64,
}

fn run(args: RunArgs) -> Result<(), String> {
    let mut cases: Vec<EvalCase> = Vec::new();
    for path in &args.dataset {
        cases.extend(load_jsonl(path).map_err(|e| format!("{}: {e}", path.display()))?);
    }
    if let Some(lang) = args.language {
        cases.retain(|c| c.language == lang);
    }
    if cases.is_empty() {
        return Err("no cases to run".into());
    }
    let client: Arc<dyn ModelClient> = match &args.endpoint {
        Some(url) => {
            let client = HttpClient::new(url, Duration::from_secs(args.timeout_s)).map_err(|e| e.to_string())?;
            Arc::new(match std::env::var("EVALKIT_API_KEY") {
                Ok(key) => client.with_api_key(key),
                Err(_) => client,
            })
        }
        None if args.mock.iter().any(|m| m == "ideal") => Arc::new(mock::ideal_echo(&cases)),
        None => {
            let mut replies = Vec::new();
            for m in &args.mock {
                replies.extend(mock::load_script(m)?);
            }
            Arc::new(ScriptedClient::keyed(replies))
        }
    };
    let system_prompt = match &args.system_prompt {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?),
        None => None,
    };
    let synonyms: BTreeMap<String, SynonymTable> = match &args.synonyms {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => BTreeMap::new(),
    };
    let config = RunConfig {
        model: args.model,
        size: args.size,
        system_prompt,
        sap: matches!(args.sap, Switch::On),
        synonyms,
        parallel: args.parallel.max(1),
    };
    let report = run_suite(&cases, client.as_ref(), &config);
    let table = render_report(std::slice::from_ref(&report), args.format);
    match &args.out {
        Some(p) => std::fs::write(p, &table).map_err(|e| format!("{}: {e}", p.display()))?,
        None => print!("{table}"),
    }
    if let Some(p) = &args.details {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(p, json).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("evalkit: {e}");
            ExitCode::FAILURE
        }
    }
}
