//! Curation pipeline for knowledge-point hints.
//!
//! Talks to an OpenAI-compatible chat endpoint to solve problems, extract
//! knowledge points, and review them for answer leakage; evaluates hinted
//! prompts into per-run correct counts; and exports hint-augmented training
//! prompts. All endpoint traffic goes through a transport abstraction that
//! can record transcripts and replay them, so every flow also runs offline.

mod answer;
mod config;
mod error;
mod evaluate;
mod export;
mod stages;
mod template;
mod transport;

pub use answer::{answers_match, extract_boxed, AnswerMatcher, BoxedAnswerMatcher};
pub use config::EndpointConfig;
pub use error::{PipelineError, PipelineResult};
pub use evaluate::{hinted_prompt, Evaluator};
pub use export::{
    export_training_data, ExportOutcome, ExportSummary, SkippedProblem, TrainingRecord,
};
pub use stages::{
    curate_problem, extract_kps, generate_solution, verify_leakage, CurationOutcome,
    LeakageVerdict,
};
pub use template::{
    emit_hint_block, emit_prompt, parse_hint_block, render, EXTRACTION_TEMPLATE, LEAKAGE_TEMPLATE,
    PROMPT_SKELETON,
};
pub use transport::{
    send_with_retry, ChatMessage, ChatRequest, ChatTransport, HttpTransport, RecordingTransport,
    ReplayTransport, ScriptedTransport, TranscriptRecord,
};
