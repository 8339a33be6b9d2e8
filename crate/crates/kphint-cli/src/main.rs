//! `kphint`: curate knowledge-point hints from rollout accuracy estimates.

mod commands;
mod config;
mod data;
mod providers;

use anyhow::Result;
use clap::{Parser, Subcommand};
use commands::{
    BucketsArgs, CurateArgs, DistributionArgs, EvaluateArgs, ExportArgs, IngestArgs, JaccardArgs,
    ParadoxArgs, PrefixSweepArgs, SelectArgs, SynthCommand,
};
use config::ConfigArgs;
use data::DataDir;

#[derive(Debug, Parser)]
#[command(name = "kphint", version, about = "Knowledge-point hint curation toolkit")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load problems, knowledge points, or rollouts into the data dir.
    Ingest(IngestArgs),
    /// Fill the leave-one-out accuracy table for every problem.
    Evaluate(EvaluateArgs),
    /// Pick a hint configuration per problem with one strategy.
    Select(SelectArgs),
    /// Measure how often m-subsets underperform their parts.
    Paradox(ParadoxArgs),
    /// Summarize hint gains by unhinted-difficulty bucket.
    Buckets(BucketsArgs),
    /// Histogram per-run correct counts across problems.
    Distribution(DistributionArgs),
    /// Compare two selection files by mean Jaccard similarity.
    Jaccard(JaccardArgs),
    /// Probe accuracy as a solution prefix grows.
    PrefixSweep(PrefixSweepArgs),
    /// Draft, verify, and filter knowledge points for uncurated problems.
    Curate(CurateArgs),
    /// Emit hint-augmented training prompts from a selections file.
    Export(ExportArgs),
    /// Synthetic benchmark tools.
    Synth {
        #[command(subcommand)]
        command: SynthCommand,
    },
}

fn run(cli: Cli) -> Result<i32> {
    let config = cli.config.resolve()?;
    let data = DataDir::new(&config)?;
    match &cli.command {
        Command::Ingest(args) => commands::ingest(&config, &data, args),
        Command::Evaluate(args) => commands::evaluate(&config, &data, args),
        Command::Select(args) => commands::select(&config, &data, args),
        Command::Paradox(args) => commands::paradox(&config, &data, args),
        Command::Buckets(args) => commands::buckets(&config, &data, args),
        Command::Distribution(args) => commands::distribution(&config, &data, args),
        Command::Jaccard(args) => commands::jaccard(&config, &data, args),
        Command::PrefixSweep(args) => commands::prefix(&config, &data, args),
        Command::Curate(args) => commands::curate(&config, &data, args),
        Command::Export(args) => commands::export(&config, &data, args),
        Command::Synth { command } => match command {
            SynthCommand::Generate(args) => commands::synth_generate(&config, &data, args),
            SynthCommand::Serve(args) => commands::synth_serve(&config, &data, args),
        },
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}
