//! Evaluation harness for function calling on GUI tools.
//!
//! Each case pairs an utterance with an ideal tool call. A model response
//! is scored per slot (the function name and every parameter either side
//! mentions), so a call that omits, invents or gets wrong a single
//! parameter still earns partial credit. The suite score is the mean of
//! the per-case accuracies.
//!
//! Cases run concurrently on a rayon pool when the `parallel` feature is
//! enabled (the default) and [`RunConfig::parallel`] is above 1.

pub mod case;
pub mod mock;
pub mod report;
pub mod score;
pub mod suite;

pub use case::{load_jsonl, parse_jsonl, DatasetError, EvalCase};
pub use report::{render_report, table, Format};
pub use score::{score_call, Matcher, Mismatch, MismatchKind, Score};
pub use suite::{run_case, run_suite, AccuracyReport, CaseResult, RunConfig, Summary};
