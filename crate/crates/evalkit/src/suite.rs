use std::collections::BTreeMap;
use std::time::Instant;

use langbar_assistant::{ChatMessage, ChatRequest, Language, ModelClient, ToolDef};
use langbar_core::{repair_call, SynonymTable, ToolCall};
use serde::{Deserialize, Serialize};

use crate::case::EvalCase;
use crate::score::{score_call, Mismatch, Score};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: String,
    /// Model size label for the report, e.g. `8B`.
    pub size: String,
    /// Overrides the per-language system prompt.
    pub system_prompt: Option<String>,
    /// Also score each call after schema-aligned repair.
    pub sap: bool,
    pub synonyms: BTreeMap<String, SynonymTable>,
    /// Cases in flight at once. 1 runs sequentially.
    pub parallel: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: "mock".into(),
            size: String::new(),
            system_prompt: None,
            sap: false,
            synonyms: BTreeMap::new(),
            parallel: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    pub language: Language,
    pub accuracy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_sap: Option<f64>,
    /// Seconds spent in the model request; absent for errored cases.
    pub latency_s: Option<f64>,
    pub errored: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub call: Option<ToolCall>,
    pub mismatches: Vec<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub language: Language,
    pub cases: usize,
    pub errored: usize,
    pub mean_accuracy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_accuracy_sap: Option<f64>,
    /// Mean over cases that did not error.
    pub mean_latency_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub model: String,
    pub size: String,
    pub cases: Vec<CaseResult>,
    /// One per language, in language order.
    pub summaries: Vec<Summary>,
}

impl AccuracyReport {
    pub fn summary(&self, language: Language) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.language == language)
    }

    fn summarize(cases: &[CaseResult]) -> Vec<Summary> {
        let mut by_language: BTreeMap<Language, Vec<&CaseResult>> = BTreeMap::new();
        for c in cases {
            by_language.entry(c.language).or_default().push(c);
        }
        by_language
            .into_iter()
            .map(|(language, cs)| {
                let n = cs.len() as f64;
                let latencies: Vec<f64> = cs.iter().filter_map(|c| c.latency_s).collect();
                let sap: Option<Vec<f64>> = cs.iter().map(|c| c.accuracy_sap).collect();
                Summary {
                    language,
                    cases: cs.len(),
                    errored: cs.iter().filter(|c| c.errored).count(),
                    mean_accuracy: cs.iter().map(|c| c.accuracy).sum::<f64>() / n,
                    mean_accuracy_sap: sap.map(|v| v.iter().sum::<f64>() / n),
                    mean_latency_s: (!latencies.is_empty())
                        .then(|| latencies.iter().sum::<f64>() / latencies.len() as f64),
                }
            })
            .collect()
    }
}

/// The request sent for one case: system prompt, the utterance, and the
/// case's tools in dataset order.
pub fn case_request(case: &EvalCase, config: &RunConfig) -> ChatRequest {
    let prompt = config
        .system_prompt
        .clone()
        .unwrap_or_else(|| case.language.system_prompt().to_string());
    let mut request = ChatRequest::new(
        config.model.clone(),
        vec![ChatMessage::system(prompt), ChatMessage::user(case.utterance.clone())],
    )
    .with_tools(case.tools.iter().map(ToolDef::from_spec).collect());
    request.temperature = Some(0.0);
    request
}

/// Runs and scores one case. The first returned tool call is scored.
pub fn run_case(case: &EvalCase, client: &dyn ModelClient, config: &RunConfig) -> CaseResult {
    let request = case_request(case, config);
    let start = Instant::now();
    let response = client.complete(&request);
    let latency = start.elapsed().as_secs_f64();
    let errored = |error: String| CaseResult {
        id: case.id.clone(),
        language: case.language,
        accuracy: 0.0,
        accuracy_sap: config.sap.then_some(0.0),
        latency_s: None,
        errored: true,
        error: Some(error),
        call: None,
        mismatches: Score::no_call(&case.ideal).mismatches,
    };
    let response = match response {
        Ok(r) => r,
        Err(e) => return errored(e.to_string()),
    };
    let call = match response.first_tool_call() {
        Ok(c) => c,
        Err(e) => return errored(e.to_string()),
    };
    let (score, sap) = match &call {
        None => (Score::no_call(&case.ideal), config.sap.then_some(0.0)),
        Some(call) => {
            let score = score_call(&case.ideal, call, &case.matchers, &case.tools);
            let sap = config.sap.then(|| match case.tool(&call.name) {
                Some(spec) => {
                    let synonyms = config.synonyms.get(&call.name).cloned().unwrap_or_default();
                    let (repaired, _) = repair_call(call, spec, &synonyms);
                    score_call(&case.ideal, &repaired, &case.matchers, &case.tools).accuracy()
                }
                None => score.accuracy(),
            });
            (score, sap)
        }
    };
    CaseResult {
        id: case.id.clone(),
        language: case.language,
        accuracy: score.accuracy(),
        accuracy_sap: sap,
        latency_s: Some(latency),
        errored: false,
        error: None,
        call,
        mismatches: score.mismatches,
    }
}

/// Runs every case and aggregates per language. Results keep dataset
/// order whatever the parallelism.
pub fn run_suite(cases: &[EvalCase], client: &dyn ModelClient, config: &RunConfig) -> AccuracyReport {
    let results = if config.parallel > 1 {
        run_parallel(cases, client, config)
    } else {
        run_sequential(cases, client, config)
    };
    AccuracyReport {
        model: config.model.clone(),
        size: config.size.clone(),
        summaries: AccuracyReport::summarize(&results),
        cases: results,
    }
}

pub fn run_sequential(cases: &[EvalCase], client: &dyn ModelClient, config: &RunConfig) -> Vec<CaseResult> {
    cases.iter().map(|c| run_case(c, client, config)).collect()
}

#[cfg(feature = "parallel")]
pub fn run_parallel(cases: &[EvalCase], client: &dyn ModelClient, config: &RunConfig) -> Vec<CaseResult> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallel)
        .build()
        .expect("thread pool");
    pool.install(|| cases.par_iter().map(|c| run_case(c, client, config)).collect())
}

#[cfg(not(feature = "parallel"))]
pub fn run_parallel(cases: &[EvalCase], client: &dyn ModelClient, config: &RunConfig) -> Vec<CaseResult> {
    run_sequential(cases, client, config)
}
