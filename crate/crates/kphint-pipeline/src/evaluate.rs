//! Rollout evaluation against a chat endpoint, with bounded parallelism,
//! a resumable per-sample raw log, and store write-through.

use crate::answer::{AnswerMatcher, BoxedAnswerMatcher};
use crate::config::EndpointConfig;
use crate::error::{PipelineError, PipelineResult};
use crate::template::{emit_hint_block, emit_prompt};
use crate::transport::{send_with_retry, ChatRequest, ChatTransport};
use kphint_core::{Configuration, KnowledgePoint, Problem};
use kphint_store::{read_records, to_line, RolloutProvider, RolloutRecord, Store, StoreError};
use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;
use std::thread;

/// Renders the full training-style prompt for one configuration: the
/// problem statement, a hint block over the selected KPs, and the closing
/// instruction.
pub fn hinted_prompt(
    problem: &Problem,
    kps: &[KnowledgePoint],
    config: &Configuration,
) -> PipelineResult<String> {
    let mut chosen = Vec::with_capacity(config.indices().len());
    for &index in config.indices() {
        let kp = kps
            .iter()
            .find(|k| k.index == index)
            .ok_or_else(|| PipelineError::MissingKp {
                problem_id: problem.id.to_string(),
                index,
            })?;
        chosen.push(kp.clone());
    }
    let hint = emit_hint_block(&chosen)?;
    Ok(emit_prompt(problem, &hint))
}

/// Samples and scores rollouts for (problem, configuration) cells.
///
/// Requests run with bounded parallelism; scoring and persistence stay on
/// the calling thread in (run, sample) order. Each scored sample is
/// appended to the raw log before the next chunk dispatches, so an
/// interrupted evaluation resumes from the first missing cursor.
pub struct Evaluator<'a> {
    store: &'a Store,
    transport: &'a dyn ChatTransport,
    endpoint: EndpointConfig,
    matcher: Box<dyn AnswerMatcher + 'a>,
    parallelism: usize,
    raw_log: Option<PathBuf>,
}

impl<'a> Evaluator<'a> {
    pub fn new(store: &'a Store, transport: &'a dyn ChatTransport, endpoint: EndpointConfig) -> Self {
        Evaluator {
            store,
            transport,
            endpoint,
            matcher: Box::new(BoxedAnswerMatcher),
            parallelism: 4,
            raw_log: None,
        }
    }

    /// Caps in-flight endpoint requests; clamped to at least 1.
    pub fn with_parallelism(mut self, parallelism: usize) -> Self {
        self.parallelism = parallelism.max(1);
        self
    }

    /// Enables the per-sample raw log used for resumption.
    pub fn with_raw_log(mut self, path: impl Into<PathBuf>) -> Self {
        self.raw_log = Some(path.into());
        self
    }

    pub fn with_matcher(mut self, matcher: impl AnswerMatcher + 'a) -> Self {
        self.matcher = Box::new(matcher);
        self
    }

    /// Returns per-run correct counts for the cell, reusing the store cache
    /// when present and persisting fresh counts through the store.
    pub fn evaluate_config(
        &self,
        problem_id: &str,
        config: &Configuration,
    ) -> PipelineResult<Vec<u32>> {
        if let Some(counts) = self.store.counts(problem_id, config) {
            return Ok(counts);
        }
        let counts =
            self.run_rollouts(problem_id, config, self.store.runs(), self.store.samples_per_run())?;
        self.store.insert_counts(problem_id, config, counts.clone())?;
        Ok(counts)
    }

    fn run_rollouts(
        &self,
        problem_id: &str,
        config: &Configuration,
        runs: u32,
        samples_per_run: u32,
    ) -> PipelineResult<Vec<u32>> {
        let problem = self
            .store
            .problem(problem_id)
            .ok_or_else(|| PipelineError::UnknownProblem {
                id: problem_id.to_string(),
            })?;
        let kps = self.store.kps(problem_id);
        let prompt = hinted_prompt(&problem, &kps, config)?;

        let mut scored: HashMap<(u32, u32), bool> = HashMap::new();
        if let Some(path) = &self.raw_log {
            if path.exists() {
                for (_, record) in read_records::<RolloutRecord>(path)? {
                    if record.problem_id == problem_id && record.config == *config {
                        scored.insert((record.run, record.sample), record.correct);
                    }
                }
            }
        }
        let pending: Vec<(u32, u32)> = (0..runs)
            .flat_map(|run| (0..samples_per_run).map(move |sample| (run, sample)))
            .filter(|cursor| !scored.contains_key(cursor))
            .collect();

        let log = match &self.raw_log {
            Some(path) => {
                let file = OpenOptions::new().create(true).append(true).open(path)?;
                Some(Mutex::new(file))
            }
            None => None,
        };

        for chunk in pending.chunks(self.parallelism) {
            let mut results: Vec<(u32, u32, PipelineResult<String>)> = thread::scope(|scope| {
                let handles: Vec<_> = chunk
                    .iter()
                    .map(|&(run, sample)| {
                        let prompt = &prompt;
                        scope.spawn(move || {
                            let tag = format!("{problem_id}|{config}|{run}|{sample}");
                            let request = ChatRequest::user(&self.endpoint, prompt.clone());
                            let reply =
                                send_with_retry(self.transport, &self.endpoint, &tag, &request);
                            (run, sample, reply)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("rollout worker panicked"))
                    .collect()
            });
            results.sort_by_key(|&(run, sample, _)| (run, sample));

            let mut first_failure: Option<(u32, u32, PipelineError)> = None;
            for (run, sample, outcome) in results {
                match outcome {
                    Ok(reply) => {
                        let correct = self.matcher.matches(&reply, &problem.gold_answer);
                        scored.insert((run, sample), correct);
                        if let Some(log) = &log {
                            let record = RolloutRecord {
                                problem_id: problem_id.to_string(),
                                config: config.clone(),
                                run,
                                sample,
                                correct,
                                seed: None,
                            };
                            let mut file = log.lock().unwrap();
                            file.write_all(to_line(&record).as_bytes())?;
                            file.flush()?;
                        }
                    }
                    Err(err) if first_failure.is_none() => {
                        first_failure = Some((run, sample, err));
                    }
                    Err(_) => {}
                }
            }
            if let Some((run, sample, err)) = first_failure {
                return Err(PipelineError::PartialRun {
                    problem_id: problem_id.to_string(),
                    config: config.to_string(),
                    run,
                    sample,
                    message: err.to_string(),
                });
            }
        }

        let mut counts = vec![0u32; runs as usize];
        for (&(run, _), &correct) in &scored {
            if correct {
                counts[run as usize] += 1;
            }
        }
        Ok(counts)
    }
}

impl RolloutProvider for Evaluator<'_> {
    fn evaluate(
        &self,
        problem_id: &str,
        config: &Configuration,
        runs: u32,
        samples_per_run: u32,
    ) -> Result<Vec<u32>, StoreError> {
        self.run_rollouts(problem_id, config, runs, samples_per_run)
            .map_err(|err| match err {
                PipelineError::Store(inner) => inner,
                other => StoreError::ProviderFailure {
                    problem_id: problem_id.to_string(),
                    config: config.clone(),
                    message: other.to_string(),
                },
            })
    }
}
