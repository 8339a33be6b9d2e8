use kphint_core::{Configuration, CoreError, KnowledgePoint, KpStatus};
use kphint_store::{
    aggregate, CacheOnly, RolloutProvider, RolloutRecord, Store, StoreError, StoreResult,
};
use proptest::prelude::*;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

fn write_file(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

fn problem_line(id: &str) -> String {
    format!("{{\"id\":\"{id}\",\"statement\":\"s\",\"solution\":null,\"answer\":\"1\"}}\n")
}

#[test]
fn ingest_problems_counts_lines() {
    let dir = tempfile::tempdir().unwrap();
    let contents = format!("{}{}{}", problem_line("p1"), problem_line("p2"), problem_line("p3"));
    let path = write_file(&dir, "problems.jsonl", &contents);
    let store = Store::new(8, 32).unwrap();
    assert_eq!(store.ingest_problems(&path).unwrap(), 3);
    assert_eq!(store.problem_ids(), vec!["p1", "p2", "p3"]);
}

#[test]
fn ingest_problems_rejects_duplicate_id_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let contents = format!("{}{}", problem_line("p1"), problem_line("p1"));
    let path = write_file(&dir, "problems.jsonl", &contents);
    let store = Store::new(8, 32).unwrap();
    let err = store.ingest_problems(&path).unwrap_err();
    match err {
        StoreError::DuplicateId { line, id, .. } => {
            assert_eq!(line, 2);
            assert_eq!(id, "p1");
        }
        other => panic!("expected DuplicateId, got {other:?}"),
    }
}

#[test]
fn ingest_problems_empty_file_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(&dir, "problems.jsonl", "");
    let store = Store::new(8, 32).unwrap();
    assert_eq!(store.ingest_problems(&path).unwrap(), 0);
}

#[test]
fn reingest_same_content_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(&dir, "problems.jsonl", &problem_line("p1"));
    let store = Store::new(8, 32).unwrap();
    assert_eq!(store.ingest_problems(&path).unwrap(), 1);
    assert_eq!(store.ingest_problems(&path).unwrap(), 0);
    assert_eq!(store.problem_ids(), vec!["p1"]);

    // Same content under a different name is still a no-op.
    let copy = write_file(&dir, "problems_copy.jsonl", &problem_line("p1"));
    assert_eq!(store.ingest_problems(&copy).unwrap(), 0);
}

#[test]
fn ingest_kps_requires_contiguous_indices() {
    let dir = tempfile::tempdir().unwrap();
    let kp = |idx: u32| {
        format!(
            "{{\"problem_id\":\"p1\",\"index\":{idx},\"knowledge\":\"k\",\"considerations\":\"c\",\"status\":\"verified\"}}\n"
        )
    };
    let store = Store::new(8, 32).unwrap();
    let good = write_file(&dir, "kps.jsonl", &format!("{}{}", kp(0), kp(1)));
    assert_eq!(store.ingest_kps(&good).unwrap(), 2);
    assert_eq!(store.kp_count("p1"), Some(2));

    let store2 = Store::new(8, 32).unwrap();
    let gapped = write_file(&dir, "kps_gap.jsonl", &format!("{}{}", kp(0), kp(2)));
    let err = store2.ingest_kps(&gapped).unwrap_err();
    assert!(matches!(err, StoreError::KpIndexGap { .. }));
}

#[test]
fn ingest_kps_rejects_duplicate_index() {
    let dir = tempfile::tempdir().unwrap();
    let kp = "{\"problem_id\":\"p1\",\"index\":0,\"knowledge\":\"k\",\"considerations\":\"c\",\"status\":\"raw\"}\n";
    let path = write_file(&dir, "kps.jsonl", &format!("{kp}{kp}"));
    let store = Store::new(8, 32).unwrap();
    let err = store.ingest_kps(&path).unwrap_err();
    match err {
        StoreError::DuplicateId { line, id, .. } => {
            assert_eq!(line, 2);
            assert_eq!(id, "p1#0");
        }
        other => panic!("expected DuplicateId, got {other:?}"),
    }
}

#[test]
fn ingest_aggregated_rollouts_fills_table() {
    let dir = tempfile::tempdir().unwrap();
    let line = "{\"problem_id\":\"p1\",\"config\":[0,1],\"run_counts\":[4,4,4,4,4,4,4,4],\"samples_per_run\":32}\n";
    let path = write_file(&dir, "rollouts.jsonl", line);
    let store = Store::new(8, 32).unwrap();
    assert_eq!(store.ingest_rollouts(&path).unwrap(), 1);
    let config = Configuration::canonicalize(&[0, 1], 2).unwrap();
    assert_eq!(store.counts("p1", &config).unwrap(), vec![4; 8]);
    assert_eq!(store.table("p1").unwrap().n_kps, 2);
}

#[test]
fn ingest_rollouts_rejects_geometry_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let wrong_samples =
        "{\"problem_id\":\"p1\",\"config\":[],\"run_counts\":[1,1,1,1,1,1,1,1],\"samples_per_run\":16}\n";
    let path = write_file(&dir, "rollouts.jsonl", wrong_samples);
    let store = Store::new(8, 32).unwrap();
    assert!(matches!(
        store.ingest_rollouts(&path).unwrap_err(),
        StoreError::GeometryMismatch { .. }
    ));

    let wrong_runs =
        "{\"problem_id\":\"p1\",\"config\":[],\"run_counts\":[1,1],\"samples_per_run\":32}\n";
    let path = write_file(&dir, "rollouts2.jsonl", wrong_runs);
    assert!(matches!(
        store.ingest_rollouts(&path).unwrap_err(),
        StoreError::GeometryMismatch { .. }
    ));
}

#[test]
fn conflicting_cell_counts_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let a = "{\"problem_id\":\"p1\",\"config\":[],\"run_counts\":[1,1,1,1,1,1,1,1],\"samples_per_run\":32}\n";
    let b = "{\"problem_id\":\"p1\",\"config\":[],\"run_counts\":[2,1,1,1,1,1,1,1],\"samples_per_run\":32}\n";
    let store = Store::new(8, 32).unwrap();
    let first = write_file(&dir, "a.jsonl", a);
    store.ingest_rollouts(&first).unwrap();

    // Identical duplicate is a no-op; divergent counts are a conflict.
    let dup = write_file(&dir, "dup.jsonl", &format!("{a}"));
    store.ingest_rollouts(&dup).unwrap();
    let conflict = write_file(&dir, "b.jsonl", b);
    assert!(matches!(
        store.ingest_rollouts(&conflict).unwrap_err(),
        StoreError::CellConflict { .. }
    ));
}

#[test]
fn ingest_raw_rollouts_aggregates_complete_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut contents = String::new();
    for run in 0..8 {
        for sample in 0..32 {
            let correct = sample < 4;
            contents.push_str(&format!(
                "{{\"problem_id\":\"p1\",\"config\":[0],\"run\":{run},\"sample\":{sample},\"correct\":{correct}}}\n"
            ));
        }
    }
    let path = write_file(&dir, "raw.jsonl", &contents);
    let store = Store::new(8, 32).unwrap();
    assert_eq!(store.ingest_raw_rollouts(&path).unwrap(), 256);
    let config = Configuration::canonicalize(&[0], 1).unwrap();
    assert_eq!(store.counts("p1", &config).unwrap(), vec![4; 8]);
}

struct CountingProvider {
    calls: AtomicU64,
    delay: Duration,
}

impl CountingProvider {
    fn new() -> Self {
        CountingProvider {
            calls: AtomicU64::new(0),
            delay: Duration::ZERO,
        }
    }

    fn slow() -> Self {
        CountingProvider {
            calls: AtomicU64::new(0),
            delay: Duration::from_millis(50),
        }
    }
}

impl RolloutProvider for CountingProvider {
    fn evaluate(
        &self,
        _problem_id: &str,
        config: &Configuration,
        runs: u32,
        _samples_per_run: u32,
    ) -> StoreResult<Vec<u32>> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        std::thread::sleep(self.delay);
        Ok(vec![config.len() as u32; runs as usize])
    }
}

#[test]
fn cached_config_skips_provider() {
    let store = Store::new(8, 32).unwrap();
    let config = Configuration::empty();
    store.insert_counts("p1", &config, vec![5; 8]).unwrap();
    let provider = CountingProvider::new();
    let counts = store.fetch_or_request("p1", &config, &provider).unwrap();
    assert_eq!(counts, vec![5; 8]);
    assert_eq!(provider.calls.load(Ordering::SeqCst), 0);
    assert_eq!(store.provider_invocations(), 0);
}

#[test]
fn uncached_config_invokes_provider_once_and_persists() {
    let store = Store::new(8, 32).unwrap();
    let config = Configuration::canonicalize(&[0, 2], 3).unwrap();
    let provider = CountingProvider::new();
    let counts = store.fetch_or_request("p1", &config, &provider).unwrap();
    assert_eq!(counts.len(), 8);
    assert!(counts.iter().all(|&c| c <= 32));
    assert_eq!(store.counts("p1", &config).unwrap(), counts);

    let again = store.fetch_or_request("p1", &config, &provider).unwrap();
    assert_eq!(again, counts);
    assert_eq!(provider.calls.load(Ordering::SeqCst), 1);
    assert_eq!(store.provider_invocations(), 1);
}

#[test]
fn cache_only_miss_is_not_evaluated_error() {
    let store = Store::new(8, 32).unwrap();
    let config = Configuration::full(3);
    let err = store.fetch_or_request("p1", &config, &CacheOnly).unwrap_err();
    match err {
        StoreError::Core(CoreError::NotEvaluated { problem_id, configs }) => {
            assert_eq!(problem_id, "p1");
            assert_eq!(configs, vec![config]);
        }
        other => panic!("expected NotEvaluated, got {other:?}"),
    }
}

#[test]
fn concurrent_requests_are_single_flight() {
    let store = Store::new(8, 32).unwrap();
    let config = Configuration::canonicalize(&[1], 2).unwrap();
    let provider = CountingProvider::slow();
    std::thread::scope(|scope| {
        for _ in 0..8 {
            scope.spawn(|| {
                let counts = store.fetch_or_request("p1", &config, &provider).unwrap();
                assert_eq!(counts, vec![1; 8]);
            });
        }
    });
    assert_eq!(provider.calls.load(Ordering::SeqCst), 1);
    assert_eq!(store.provider_invocations(), 1);
}

#[test]
fn write_through_log_resumes_without_reevaluation() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("rollouts.log.jsonl");
    let config = Configuration::canonicalize(&[0], 1).unwrap();

    let store = Store::new(8, 32).unwrap();
    assert_eq!(store.set_write_through(&log).unwrap(), 0);
    let provider = CountingProvider::new();
    let counts = store.fetch_or_request("p1", &config, &provider).unwrap();
    drop(store);

    let resumed = Store::new(8, 32).unwrap();
    assert_eq!(resumed.set_write_through(&log).unwrap(), 1);
    let cached = resumed.fetch_or_request("p1", &config, &CacheOnly).unwrap();
    assert_eq!(cached, counts);
    assert_eq!(resumed.provider_invocations(), 0);
}

#[test]
fn put_kps_validates_order() {
    let store = Store::new(8, 32).unwrap();
    let kp = |index: u32| KnowledgePoint {
        problem_id: "p1".to_string(),
        index,
        knowledge: "k".to_string(),
        considerations: "c".to_string(),
        status: KpStatus::Raw,
    };
    assert!(store.put_kps("p1", vec![kp(0), kp(1)]).is_ok());
    assert!(store.put_kps("p1", vec![kp(1), kp(0)]).is_err());
}

fn records_for(counts: &[(Vec<u32>, [u32; 2])]) -> Vec<RolloutRecord> {
    let mut out = Vec::new();
    for (indices, per_run) in counts {
        let config = Configuration::canonicalize(indices, 8).unwrap();
        for (run, &correct) in per_run.iter().enumerate() {
            for sample in 0..4 {
                out.push(RolloutRecord {
                    problem_id: "p1".to_string(),
                    config: config.clone(),
                    run: run as u32,
                    sample,
                    correct: sample < correct,
                    seed: None,
                });
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn aggregation_is_order_independent(
        a0 in 0u32..=4, a1 in 0u32..=4, b0 in 0u32..=4, b1 in 0u32..=4,
        order in Just(()).prop_perturb(|_, mut rng| {
            let mut idx: Vec<usize> = (0..16).collect();
            for i in (1..idx.len()).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                idx.swap(i, j);
            }
            idx
        })
    ) {
        let records = records_for(&[(vec![], [a0, a1]), (vec![0], [b0, b1])]);
        prop_assert_eq!(records.len(), 16);
        let shuffled: Vec<RolloutRecord> = order.iter().map(|&i| records[i].clone()).collect();
        let base = aggregate(&records, 2, 4, |_| Some(8)).unwrap();
        let permuted = aggregate(&shuffled, 2, 4, |_| Some(8)).unwrap();
        prop_assert_eq!(&base["p1"], &permuted["p1"]);
    }
}
