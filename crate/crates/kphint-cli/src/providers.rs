//! Rollout and prompt-accuracy providers assembled from flags.

use crate::config::CliConfig;
use crate::data::DataDir;
use anyhow::{bail, Result};
use kphint_pipeline::{
    AnswerMatcher, BoxedAnswerMatcher, ChatRequest, ChatTransport, Evaluator, HttpTransport,
    RecordingTransport, ReplayTransport,
};
use kphint_store::{
    PromptAccuracyProvider, RolloutProvider, Store, StoreError, StoreResult,
};
use kphint_synth::{SampleMode, SynthProvider, SyntheticWorld};
use std::path::PathBuf;

/// Where rollouts come from. Exactly one source; the default answers from
/// already-ingested cells only.
#[derive(Debug, Clone, clap::Args)]
pub struct ProviderArgs {
    /// Synthetic world file to evaluate against.
    #[arg(long)]
    pub worlds: Option<PathBuf>,
    /// With --worlds: report exact probabilities instead of sampling.
    #[arg(long)]
    pub exact: bool,
    /// Evaluate through the configured chat endpoint.
    #[arg(long)]
    pub live: bool,
    /// Replay a recorded transcript instead of the network.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// With --live: record the transcript for later replay.
    #[arg(long)]
    pub record: bool,
}

impl ProviderArgs {
    #[cfg(test)]
    pub fn offline() -> Self {
        ProviderArgs {
            worlds: None,
            exact: false,
            live: false,
            transcript: None,
            record: false,
        }
    }

    fn sample_mode(&self) -> SampleMode {
        if self.exact {
            SampleMode::Exact
        } else {
            SampleMode::Sampled
        }
    }

    pub fn load_worlds(path: &PathBuf) -> Result<Vec<SyntheticWorld>> {
        let records: Vec<(usize, SyntheticWorld)> = kphint_store::read_records(path)?;
        Ok(records.into_iter().map(|(_, w)| w).collect())
    }

    /// Chat transport per the source flags; `None` when the command should
    /// run store-only.
    pub fn transport(&self, config: &CliConfig, data: &DataDir) -> Result<Option<Box<dyn ChatTransport>>> {
        if let Some(path) = &self.transcript {
            return Ok(Some(Box::new(ReplayTransport::strict(path)?)));
        }
        if self.live {
            let http = HttpTransport::new(&config.endpoint)?;
            if self.record {
                return Ok(Some(Box::new(RecordingTransport::create(
                    &data.transcript(),
                    http,
                )?)));
            }
            return Ok(Some(Box::new(http)));
        }
        if self.record {
            bail!("--record requires --live");
        }
        Ok(None)
    }

    /// Builds the rollout provider and hands it to `body`. The endpoint
    /// path logs raw per-sample rollouts so interrupted evaluations resume.
    pub fn with_rollout_provider<T>(
        &self,
        config: &CliConfig,
        data: &DataDir,
        store: &Store,
        body: impl FnOnce(&dyn RolloutProvider) -> Result<T>,
    ) -> Result<T> {
        if let Some(path) = &self.worlds {
            let provider = SynthProvider::new(Self::load_worlds(path)?, self.sample_mode());
            return body(&provider);
        }
        match self.transport(config, data)? {
            Some(transport) => {
                let evaluator = Evaluator::new(store, transport.as_ref(), config.endpoint.clone())
                    .with_parallelism(config.parallelism)
                    .with_raw_log(&data.raw_rollouts());
                body(&evaluator)
            }
            None => body(&kphint_store::CacheOnly),
        }
    }
}

/// Measures prompt accuracy by sampling the configured chat endpoint at the
/// store's run geometry and matching replies against the gold answer.
pub struct TransportAccuracyProvider<'a> {
    store: &'a Store,
    transport: Box<dyn ChatTransport>,
    config: CliConfig,
}

impl<'a> TransportAccuracyProvider<'a> {
    pub fn new(store: &'a Store, transport: Box<dyn ChatTransport>, config: CliConfig) -> Self {
        TransportAccuracyProvider {
            store,
            transport,
            config,
        }
    }
}

impl PromptAccuracyProvider for TransportAccuracyProvider<'_> {
    fn prompt_accuracy(&self, problem_id: &str, prompt: &str, hint_text: &str) -> StoreResult<f64> {
        let fail = |message: String| StoreError::ProviderFailure {
            problem_id: problem_id.to_string(),
            config: kphint_core::Configuration::empty(),
            message,
        };
        let problem = self
            .store
            .problem(problem_id)
            .ok_or_else(|| StoreError::UnknownProblem {
                problem_id: problem_id.to_string(),
            })?;
        let matcher = BoxedAnswerMatcher::default();
        let tokens = hint_text.split_whitespace().count();
        let mut correct = 0u64;
        let mut total = 0u64;
        for run in 0..self.config.runs {
            for sample in 0..self.config.samples_per_run {
                let tag = format!("{problem_id}|prefix{tokens}|{run}|{sample}");
                let request = ChatRequest::user(&self.config.endpoint, prompt);
                let reply = kphint_pipeline::send_with_retry(
                    self.transport.as_ref(),
                    &self.config.endpoint,
                    &tag,
                    &request,
                )
                .map_err(|e| fail(e.to_string()))?;
                if matcher.matches(&reply, &problem.gold_answer) {
                    correct += 1;
                }
                total += 1;
            }
        }
        Ok(correct as f64 / total as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kphint_core::Problem;
    use kphint_pipeline::ScriptedTransport;

    fn test_config(root: &std::path::Path) -> CliConfig {
        CliConfig {
            data_dir: root.to_path_buf(),
            runs: 1,
            samples_per_run: 2,
            ..CliConfig::default()
        }
    }

    #[test]
    fn record_without_live_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let config = test_config(dir.path());
        let data = DataDir::new(&config).unwrap();
        let args = ProviderArgs {
            record: true,
            ..ProviderArgs::offline()
        };
        assert!(args.transport(&config, &data).is_err());
    }

    #[test]
    fn offline_args_fall_back_to_the_cache() {
        let dir = tempfile::tempdir().unwrap();
        let config = test_config(dir.path());
        let data = DataDir::new(&config).unwrap();
        let store = Store::new(1, 2).unwrap();
        let args = ProviderArgs::offline();
        let out = args
            .with_rollout_provider(&config, &data, &store, |provider| {
                Ok(provider
                    .evaluate("p", &kphint_core::Configuration::empty(), 1, 2)
                    .is_err())
            })
            .unwrap();
        assert!(out, "cache-only provider cannot evaluate new cells");
    }

    #[test]
    fn transport_accuracy_counts_matching_replies() {
        let store = Store::new(1, 2).unwrap();
        store.put_problem(Problem::new("p1", "Q", "42"));
        let scripted = ScriptedTransport::new();
        scripted.push("p1|prefix0|0|0", r"\boxed{42}");
        scripted.push("p1|prefix0|0|1", r"\boxed{7}");
        let dir = tempfile::tempdir().unwrap();
        let provider = TransportAccuracyProvider::new(
            &store,
            Box::new(scripted),
            test_config(dir.path()),
        );
        let accuracy = provider.prompt_accuracy("p1", "prompt", "").unwrap();
        assert_eq!(accuracy, 0.5);
    }
}
