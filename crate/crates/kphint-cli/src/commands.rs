//! Subcommand implementations. Each returns the process exit code:
//! 0 clean, 1 when any per-problem failure was recorded.

use crate::config::CliConfig;
use crate::data::{read_selections, report_failures, DataDir, FailureRecord};
use crate::providers::{ProviderArgs, TransportAccuracyProvider};
use anyhow::{anyhow, bail, Context, Result};
use kphint_analysis::{
    correct_count_distribution, difficulty_buckets, paradox_stats, prefix_sweep, strategy_jaccard,
    RunMode,
};
use kphint_core::{Configuration, KpStatus, Strategy};
use kphint_pipeline::{curate_problem, export_training_data, BoxedAnswerMatcher};
use kphint_select::{batch_select, SelectParams};
use kphint_store::{
    read_records, to_line, write_records, EvaluationRequest, HeaderRecord, SelectionRecord, Store,
};
use kphint_synth::{
    generate_benchmark, sample_rollouts, GeneratorParams, SampleMode, ThresholdHintProvider,
    ThresholdSpec,
};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::PathBuf;

fn header(config: &CliConfig) -> HeaderRecord {
    HeaderRecord::new(config.hash())
}

/// Persists the store's state files so later commands start from them.
fn save_state(store: &Store, data: &DataDir, config: &CliConfig) -> Result<()> {
    let header = header(config);
    store.write_problems(&data.problems(), Some(&header))?;
    store.write_kps(&data.kps(), Some(&header))?;
    store.write_rollouts(&data.rollouts(), Some(&header))?;
    Ok(())
}

// ---- ingest ---------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct IngestArgs {
    /// Problems file to load.
    #[arg(long)]
    problems: Option<PathBuf>,
    /// Knowledge-points file to load.
    #[arg(long)]
    kps: Option<PathBuf>,
    /// Aggregated rollouts file to load.
    #[arg(long)]
    rollouts: Option<PathBuf>,
    /// Raw per-sample rollouts file to load.
    #[arg(long)]
    raw_rollouts: Option<PathBuf>,
}

pub fn ingest(config: &CliConfig, data: &DataDir, args: &IngestArgs) -> Result<i32> {
    if args.problems.is_none()
        && args.kps.is_none()
        && args.rollouts.is_none()
        && args.raw_rollouts.is_none()
    {
        bail!("ingest needs at least one of --problems, --kps, --rollouts, --raw-rollouts");
    }
    let store = data.open_store(config)?;
    let mut counts = Vec::new();
    if let Some(path) = &args.problems {
        counts.push(format!("{} problems", store.ingest_problems(path)?));
    }
    if let Some(path) = &args.kps {
        counts.push(format!("{} kps", store.ingest_kps(path)?));
    }
    if let Some(path) = &args.rollouts {
        counts.push(format!("{} rollout cells", store.ingest_rollouts(path)?));
    }
    if let Some(path) = &args.raw_rollouts {
        counts.push(format!("{} raw rollouts", store.ingest_raw_rollouts(path)?));
    }
    save_state(&store, data, config)?;
    println!(
        "ingested {}; store now holds {} problems",
        counts.join(", "),
        store.problem_ids().len()
    );
    Ok(0)
}

// ---- evaluate ---------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    provider: ProviderArgs,
    /// Restrict to these problem ids (comma separated).
    #[arg(long, value_delimiter = ',')]
    problems: Option<Vec<String>>,
}

pub fn evaluate(config: &CliConfig, data: &DataDir, args: &EvaluateArgs) -> Result<i32> {
    let store = data.open_store(config)?;
    let mut ids = match &args.problems {
        Some(ids) => ids.clone(),
        None => store.problem_ids(),
    };
    ids.sort();

    let mut failures = Vec::new();
    let mut cells = 0usize;
    let before = store.provider_invocations();
    args.provider
        .with_rollout_provider(config, data, &store, |provider| {
            for id in &ids {
                let table = match store.table(id) {
                    Some(table) => table,
                    None => {
                        failures.push(FailureRecord {
                            problem_id: id.clone(),
                            error: "no knowledge points registered".into(),
                        });
                        continue;
                    }
                };
                for config_cell in table.loo_family() {
                    match store.fetch_or_request(id, &config_cell, provider) {
                        Ok(_) => cells += 1,
                        Err(err) => {
                            failures.push(FailureRecord {
                                problem_id: id.clone(),
                                error: format!("config {config_cell}: {err}"),
                            });
                            break;
                        }
                    }
                }
            }
            Ok(())
        })?;
    let requested = store.provider_invocations() - before;

    save_state(&store, data, config)?;
    println!(
        "evaluated {cells} cells across {} problems ({requested} provider calls)",
        ids.len()
    );
    report_failures(&data.path("evaluate-failures.jsonl"), &header(config), &failures)
}

// ---- select -----------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct SelectArgs {
    #[command(flatten)]
    provider: ProviderArgs,
    /// Selection strategy.
    #[arg(long)]
    strategy: Strategy,
    /// Output path (defaults to selections-<strategy>.jsonl in the data dir).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn select(config: &CliConfig, data: &DataDir, args: &SelectArgs) -> Result<i32> {
    let store = data.open_store(config)?;
    let params = SelectParams {
        epsilon: config.epsilon,
        delta: config.delta,
        enumeration_cap: config.enumeration_cap,
        seed: config.seed,
        ..SelectParams::default()
    };
    let report = args
        .provider
        .with_rollout_provider(config, data, &store, |provider| {
            Ok(batch_select(&store, args.strategy, &params, provider))
        })?;

    let name = args.strategy.cli_name();
    let out = args.out.clone().unwrap_or_else(|| data.selections(name));
    let records = report.outcomes.iter().map(|o| SelectionRecord {
        problem_id: o.problem_id.clone(),
        strategy: o.strategy,
        selected: o.selected.clone(),
        est_accuracy: o.est_accuracy,
        evaluations_requested: o.evaluations_requested,
        notes: o.notes.clone(),
    });
    write_records(&out, Some(&header(config)), records)?;

    let summary_path = data.path(&format!("selections-{name}.summary.json"));
    std::fs::write(&summary_path, serde_json::to_string_pretty(&report.summary)?)
        .with_context(|| format!("writing {}", summary_path.display()))?;
    save_state(&store, data, config)?;

    let accuracy = match report.summary.avg_accuracy {
        Some(a) => format!("{a:.4}"),
        None => "n/a".to_string(),
    };
    println!(
        "{name}: problems {} Avg.#KP {:.2} Avg.Acc {accuracy} evaluations {} failures {}",
        report.summary.problems,
        report.summary.avg_kp,
        report.summary.evaluations,
        report.summary.failures
    );

    let failures: Vec<FailureRecord> = report
        .failures
        .iter()
        .map(|f| FailureRecord {
            problem_id: f.problem_id.clone(),
            error: f.error.clone(),
        })
        .collect();
    report_failures(
        &data.path(&format!("selections-{name}.failures.jsonl")),
        &header(config),
        &failures,
    )
}

// ---- paradox ---------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct ParadoxArgs {
    #[command(flatten)]
    provider: ProviderArgs,
    /// Subset size m (at least 2).
    #[arg(long)]
    m: u32,
}

pub fn paradox(config: &CliConfig, data: &DataDir, args: &ParadoxArgs) -> Result<i32> {
    let store = data.open_store(config)?;
    let report = args
        .provider
        .with_rollout_provider(config, data, &store, |provider| {
            paradox_stats(&store, args.m, provider, config.paradox_subset_cap)
                .map_err(|e| anyhow!(e))
        })?;
    write_records(
        &data.path(&format!("paradox-m{}.jsonl", args.m)),
        Some(&header(config)),
        [&report],
    )?;
    save_state(&store, data, config)?;
    let delta = match report.delta_m {
        Some(d) => format!("{d:.4}"),
        None => "n/a".to_string(),
    };
    println!(
        "p_{} = {:.4} over {} subsets ({} strict), mean shortfall {delta}",
        report.m, report.p_m, report.pairs_examined, report.strict_pairs
    );
    Ok(0)
}

// ---- buckets ---------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct BucketsArgs {
    /// Selections file providing each problem's hinted configuration.
    #[arg(long)]
    selections: PathBuf,
}

fn column(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.6}"),
        None => "nan".to_string(),
    }
}

pub fn buckets(config: &CliConfig, data: &DataDir, args: &BucketsArgs) -> Result<i32> {
    let store = data.open_store(config)?;
    let selections = read_selections(&args.selections)?;
    let report = difficulty_buckets(&store, &selections, &config.bucket_edges)?;
    write_records(&data.path("buckets.jsonl"), Some(&header(config)), [&report])?;

    let mut table = String::from("lo\thi\tn\tmu_wo\tmu_with\tq5\tq25\tq50\tq75\tq95\n");
    for (k, bucket) in report.per_bucket.iter().enumerate() {
        let quantiles = bucket.quantiles.clone().unwrap_or_default();
        let quantile = |i: usize| column(quantiles.get(i).copied());
        table.push_str(&format!(
            "{:.3}\t{:.3}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            report.bucket_edges[k],
            report.bucket_edges[k + 1],
            bucket.n,
            column(bucket.mu_wo),
            column(bucket.mu_with),
            quantile(0),
            quantile(1),
            quantile(2),
            quantile(3),
            quantile(4),
        ));
    }
    std::fs::write(data.path("buckets.txt"), table)?;

    let problems: usize = report.per_bucket.iter().map(|b| b.n).sum();
    println!(
        "{} buckets over {problems} problems",
        report.per_bucket.len()
    );
    Ok(0)
}

// ---- distribution ----------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct DistributionArgs {
    /// Selections file; without it every problem uses the unhinted prompt.
    #[arg(long)]
    selections: Option<PathBuf>,
    /// Run index to histogram (default 0).
    #[arg(long, conflicts_with = "pooled")]
    run: Option<u32>,
    /// Pool counts across all runs instead of using one run.
    #[arg(long)]
    pooled: bool,
}

pub fn distribution(config: &CliConfig, data: &DataDir, args: &DistributionArgs) -> Result<i32> {
    let store = data.open_store(config)?;
    let configs: Vec<(String, Configuration)> = match &args.selections {
        Some(path) => read_selections(path)?
            .into_iter()
            .map(|s| (s.problem_id, s.selected))
            .collect(),
        None => store
            .problem_ids()
            .into_iter()
            .map(|id| (id, Configuration::empty()))
            .collect(),
    };
    let mode = if args.pooled {
        RunMode::Pooled
    } else {
        RunMode::Single(args.run.unwrap_or(0))
    };
    let dist = correct_count_distribution(&store, &configs, mode)?;

    let base = format!("distribution-{}", dist.mode);
    write_records(&data.path(&format!("{base}.jsonl")), Some(&header(config)), [&dist])?;
    let mut table = String::from("count\tfraction\n");
    for (count, fraction) in dist.fractions.iter().enumerate() {
        table.push_str(&format!("{count}\t{fraction:.6}\n"));
    }
    std::fs::write(data.path(&format!("{base}.txt")), table)?;

    println!(
        "{}: {:.2}% at zero correct, {:.2}% fully correct over {} problems",
        dist.mode,
        dist.fractions.first().copied().unwrap_or(0.0) * 100.0,
        dist.fractions.last().copied().unwrap_or(0.0) * 100.0,
        dist.problems
    );
    Ok(0)
}

// ---- jaccard ---------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct JaccardArgs {
    /// First selections file.
    #[arg(long)]
    a: PathBuf,
    /// Second selections file.
    #[arg(long)]
    b: PathBuf,
}

pub fn jaccard(config: &CliConfig, data: &DataDir, args: &JaccardArgs) -> Result<i32> {
    let first = read_selections(&args.a)?;
    let second = read_selections(&args.b)?;
    let similarity = strategy_jaccard(&first, &second)?;
    let record = serde_json::json!({
        "file_a": args.a.display().to_string(),
        "file_b": args.b.display().to_string(),
        "jaccard": similarity,
    });
    write_records(&data.path("jaccard.jsonl"), Some(&header(config)), [record])?;
    println!("jaccard {similarity:.4}");
    Ok(0)
}

// ---- prefix sweep ----------------------------------------------------------

/// One problem's planted accuracy profile in a specs file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecRecord {
    pub problem_id: String,
    #[serde(flatten)]
    pub spec: ThresholdSpec,
}

#[derive(Debug, clap::Args)]
pub struct PrefixSweepArgs {
    #[command(flatten)]
    provider: ProviderArgs,
    /// Problem to sweep.
    #[arg(long)]
    problem: String,
    /// Prefix percentages to test.
    #[arg(long, value_delimiter = ',', default_values_t = [0u32, 10, 20, 30, 40, 50, 60, 70, 80, 90])]
    ratios: Vec<u32>,
    /// Threshold-spec file for a synthetic accuracy profile.
    #[arg(long)]
    specs: Option<PathBuf>,
}

pub fn prefix(config: &CliConfig, data: &DataDir, args: &PrefixSweepArgs) -> Result<i32> {
    let store = data.open_store(config)?;
    let points = if let Some(path) = &args.specs {
        let records: Vec<(usize, SpecRecord)> = read_records(path)?;
        let provider =
            ThresholdHintProvider::new(records.into_iter().map(|(_, r)| (r.problem_id, r.spec)));
        prefix_sweep(&store, &args.problem, &args.ratios, &provider)?
    } else {
        let transport = args
            .provider
            .transport(config, data)?
            .ok_or_else(|| anyhow!("prefix-sweep needs --specs, --transcript, or --live"))?;
        let provider = TransportAccuracyProvider::new(&store, transport, config.clone());
        prefix_sweep(&store, &args.problem, &args.ratios, &provider)?
    };

    let base = format!("prefix-{}", args.problem);
    write_records(
        &data.path(&format!("{base}.jsonl")),
        Some(&header(config)),
        &points,
    )?;
    let mut table = String::from("ratio\taccuracy\n");
    for point in &points {
        table.push_str(&format!("{}\t{:.6}\n", point.ratio, point.accuracy));
    }
    std::fs::write(data.path(&format!("{base}.txt")), table)?;

    let first = points.first().map(|p| p.accuracy).unwrap_or(0.0);
    let last = points.last().map(|p| p.accuracy).unwrap_or(0.0);
    println!(
        "swept {} ratios for {}: accuracy {first:.4} -> {last:.4}",
        points.len(),
        args.problem
    );
    Ok(0)
}

// ---- curate ----------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct CurateArgs {
    #[command(flatten)]
    provider: ProviderArgs,
    /// Solve attempts before giving up on stage 1.
    #[arg(long, default_value_t = 4)]
    max_attempts: u32,
}

pub fn curate(config: &CliConfig, data: &DataDir, args: &CurateArgs) -> Result<i32> {
    let store = data.open_store(config)?;
    let transport = args
        .provider
        .transport(config, data)?
        .ok_or_else(|| anyhow!("curate needs --live or --transcript"))?;
    let matcher = BoxedAnswerMatcher;

    let targets: Vec<String> = store
        .problem_ids()
        .into_iter()
        .filter(|id| {
            let kps = store.kps(id);
            kps.is_empty() || !kps.iter().any(|kp| kp.status == KpStatus::Verified)
        })
        .collect();

    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    for id in &targets {
        match curate_problem(
            &store,
            id,
            transport.as_ref(),
            &config.endpoint,
            &matcher,
            args.max_attempts,
        ) {
            Ok(outcome) => outcomes.push(outcome),
            Err(err) => failures.push(FailureRecord {
                problem_id: id.clone(),
                error: err.to_string(),
            }),
        }
    }

    write_records(&data.path("curation.jsonl"), Some(&header(config)), &outcomes)?;
    save_state(&store, data, config)?;
    let verified: usize = outcomes.iter().map(|o| o.verified).sum();
    let revision: usize = outcomes.iter().map(|o| o.needs_revision).sum();
    println!(
        "curated {} of {} pending problems: {verified} KPs verified, {revision} need revision",
        outcomes.len(),
        targets.len()
    );
    report_failures(&data.path("curate-failures.jsonl"), &header(config), &failures)
}

// ---- export ----------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct ExportArgs {
    /// Selections file naming each problem's hint configuration.
    #[arg(long)]
    selections: PathBuf,
    /// Output path (defaults to export.jsonl in the data dir).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn export(config: &CliConfig, data: &DataDir, args: &ExportArgs) -> Result<i32> {
    let store = data.open_store(config)?;
    let selections = read_selections(&args.selections)?;
    let outcome = export_training_data(&store, &selections, config.injection_threshold)?;

    let out = args.out.clone().unwrap_or_else(|| data.path("export.jsonl"));
    write_records(&out, Some(&header(config)), &outcome.records)?;
    let summary_path = data.path("export.summary.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&outcome.summary)?)
        .with_context(|| format!("writing {}", summary_path.display()))?;
    println!("{}", outcome.summary.display_line());

    let failures: Vec<FailureRecord> = outcome
        .skipped
        .iter()
        .map(|s| FailureRecord {
            problem_id: s.problem_id.clone(),
            error: s.reason.clone(),
        })
        .collect();
    report_failures(&data.path("export-failures.jsonl"), &header(config), &failures)
}

// ---- synth -----------------------------------------------------------------

#[derive(Debug, clap::Subcommand)]
pub enum SynthCommand {
    /// Write a reproducible synthetic benchmark into the data dir.
    Generate(GenerateArgs),
    /// Answer evaluation requests over stdin/stdout, one JSON per line.
    Serve(ServeArgs),
}

#[derive(Debug, clap::Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 100)]
    n_problems: u32,
    #[arg(long, default_value_t = 6)]
    n_kps: u32,
    /// Fraction of problems with a planted negative pairwise interaction.
    #[arg(long, default_value_t = 0.3)]
    paradox_fraction: f64,
    /// Fraction of each problem's KPs with zero effect.
    #[arg(long, default_value_t = 0.3)]
    zero_fraction: f64,
}

pub fn synth_generate(config: &CliConfig, data: &DataDir, args: &GenerateArgs) -> Result<i32> {
    let params = GeneratorParams {
        n_problems: args.n_problems,
        n_kps: args.n_kps,
        paradox_fraction: args.paradox_fraction,
        zero_fraction: args.zero_fraction,
        seed: config.seed,
        ..GeneratorParams::default()
    };
    let bench = generate_benchmark(&params)?;

    let store = Store::new(config.runs, config.samples_per_run)?;
    for (problem, kps) in bench.problems.iter().zip(&bench.kps) {
        store.put_problem(problem.clone());
        store.put_kps(&problem.id, kps.clone())?;
    }
    let header = header(config);
    store.write_problems(&data.problems(), Some(&header))?;
    store.write_kps(&data.kps(), Some(&header))?;
    write_records(&data.worlds(), Some(&header), &bench.worlds)?;
    println!(
        "generated {} problems with {} kps each into {}",
        bench.problems.len(),
        args.n_kps,
        data.path("").display()
    );
    Ok(0)
}

#[derive(Debug, clap::Args)]
pub struct ServeArgs {
    /// World file to serve from (defaults to worlds.jsonl in the data dir).
    #[arg(long)]
    worlds: Option<PathBuf>,
    /// Report exact probabilities instead of sampling.
    #[arg(long)]
    exact: bool,
}

pub fn synth_serve(config: &CliConfig, data: &DataDir, args: &ServeArgs) -> Result<i32> {
    let path = args.worlds.clone().unwrap_or_else(|| data.worlds());
    let worlds = ProviderArgs::load_worlds(&path)?;
    let by_id: std::collections::BTreeMap<&str, &kphint_synth::SyntheticWorld> =
        worlds.iter().map(|w| (w.problem_id.as_str(), w)).collect();
    let mode = if args.exact {
        SampleMode::Exact
    } else {
        SampleMode::Sampled
    };
    let _ = config;

    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match serve_one(&by_id, mode, &line) {
            Ok(record) => record,
            Err(message) => to_line(&serde_json::json!({ "error": message })),
        };
        stdout.write_all(reply.as_bytes())?;
        stdout.flush()?;
    }
    Ok(0)
}

fn serve_one(
    worlds: &std::collections::BTreeMap<&str, &kphint_synth::SyntheticWorld>,
    mode: SampleMode,
    line: &str,
) -> std::result::Result<String, String> {
    let request: EvaluationRequest =
        serde_json::from_str(line).map_err(|e| format!("bad request: {e}"))?;
    let world = worlds
        .get(request.problem_id.as_str())
        .ok_or_else(|| format!("unknown problem {}", request.problem_id))?;
    let counts = sample_rollouts(
        world,
        &request.config,
        request.runs,
        request.samples_per_run,
        mode,
    )
    .map_err(|e| e.to_string())?;
    let record = kphint_store::AggregatedRolloutRecord {
        problem_id: request.problem_id,
        config: request.config,
        run_counts: counts,
        samples_per_run: request.samples_per_run,
    };
    Ok(to_line(&record))
}
