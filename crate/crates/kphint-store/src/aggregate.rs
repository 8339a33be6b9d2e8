//! Aggregation of raw per-sample rollouts into per-run count tables.

use crate::error::{StoreError, StoreResult};
use crate::schema::RolloutRecord;
use kphint_core::{AccuracyTable, Configuration};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Default)]
struct RunTally {
    samples_seen: BTreeSet<u32>,
    correct: u32,
}

/// Aggregates raw records into one `AccuracyTable` per problem.
///
/// Every configuration present must be covered by complete runs: all of
/// `runs` runs, each with exactly `samples_per_run` samples. Incomplete runs
/// are rejected rather than padded because downstream comparisons assume a
/// fixed per-run denominator.
///
/// `kp_count` supplies the KP universe size per problem; returning `None`
/// infers it from the largest index mentioned by that problem's records.
pub fn aggregate(
    records: &[RolloutRecord],
    runs: u32,
    samples_per_run: u32,
    mut kp_count: impl FnMut(&str) -> Option<u32>,
) -> StoreResult<BTreeMap<String, AccuracyTable>> {
    let mut tallies: BTreeMap<String, BTreeMap<Configuration, BTreeMap<u32, RunTally>>> =
        BTreeMap::new();
    for record in records {
        if record.run >= runs {
            return Err(StoreError::RunOutOfRange {
                problem_id: record.problem_id.clone(),
                config: record.config.clone(),
                run: record.run,
                runs,
            });
        }
        if record.sample >= samples_per_run {
            return Err(StoreError::SampleOutOfRange {
                problem_id: record.problem_id.clone(),
                config: record.config.clone(),
                run: record.run,
                sample: record.sample,
                samples_per_run,
            });
        }
        let tally = tallies
            .entry(record.problem_id.clone())
            .or_default()
            .entry(record.config.clone())
            .or_default()
            .entry(record.run)
            .or_default();
        if !tally.samples_seen.insert(record.sample) {
            return Err(StoreError::DuplicateRecord {
                problem_id: record.problem_id.clone(),
                config: record.config.clone(),
                run: record.run,
                sample: record.sample,
            });
        }
        if record.correct {
            tally.correct += 1;
        }
    }

    let mut tables = BTreeMap::new();
    for (problem_id, configs) in tallies {
        let n_kps = kp_count(&problem_id).unwrap_or_else(|| {
            configs
                .keys()
                .flat_map(|c| c.indices().iter().copied())
                .max()
                .map_or(0, |max| max + 1)
        });
        let mut table = AccuracyTable::new(problem_id.clone(), n_kps, runs, samples_per_run)?;
        for (config, run_tallies) in configs {
            let mut counts = Vec::with_capacity(runs as usize);
            for run in 0..runs {
                let found = run_tallies
                    .get(&run)
                    .map_or(0, |t| t.samples_seen.len() as u32);
                if found != samples_per_run {
                    return Err(StoreError::IncompleteRun {
                        problem_id: problem_id.clone(),
                        config,
                        run,
                        expected: samples_per_run,
                        found,
                    });
                }
                counts.push(run_tallies[&run].correct);
            }
            table.insert_cell(config, counts)?;
        }
        tables.insert(problem_id, table);
    }
    Ok(tables)
}
