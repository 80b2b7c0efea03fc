use std::io;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use clap::Parser;
use langbar_assistant::{AssistantConfig, HttpClient, HistoryPolicy, Language, ModelClient, ScriptedClient, ScriptedReply};
use langbar_core::SystemClock;
use langbar_demo::{api, DemoAppState};

#[derive(Parser)]
#[command(about = "Language-bar demo backend")]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Serve MCP over stdin/stdout instead of HTTP.
    #[arg(long)]
    stdio: bool,
    /// Chat-completions URL; the key is read from `LANGBAR_API_KEY`.
    /// Without it utterances other than keyword
    /// commands get a canned reply.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long, default_value = "mock")]
    model: String,
    #[arg(long)]
    two_phase: bool,
    #[arg(long, default_value = "en")]
    language: Language,
    /// Keep only the last N history entries in prompts.
    #[arg(long)]
    keep_last: Option<usize>,
    #[arg(long, default_value_t = 60)]
    timeout_s: u64,
}

fn main() -> io::Result<()> {
    let args = Args::parse();
    let client: Arc<dyn ModelClient> = match &args.endpoint {
        Some(url) => {
            let mut c = HttpClient::new(url.clone(), Duration::from_secs(args.timeout_s)).map_err(io::Error::other)?;
            if let Ok(key) = std::env::var("LANGBAR_API_KEY") {
                c = c.with_api_key(key);
            }
            Arc::new(c)
        }
        None => Arc::new(ScriptedClient::from_fn(|_| {
            ScriptedReply::Text("No language model is configured for this demo.".into())
        })),
    };
    let config = AssistantConfig {
        endpoint: args.endpoint.clone(),
        model: args.model.clone(),
        two_phase: args.two_phase,
        language: args.language,
        history_policy: args.keep_last.map_or(HistoryPolicy::KeepAll, HistoryPolicy::KeepLastN),
        ..AssistantConfig::default()
    };
    let state = DemoAppState::new(client, config, Arc::new(SystemClock));
    if args.stdio {
        return langbar_mcp::stdio::serve(state.mcp(), io::stdin().lock(), io::stdout());
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(args.addr).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, api::router(state)).await
    })
}
