// SPDX-License-Identifier: Apache-2.0

//! Series runner wiring: stores, checkpoints, ablations, error records.

use mipreopt::harness::{
    compare_reports, report_csv, run_series, run_series_with_state, RunConfig, SeriesState,
    Techniques,
};
use mipreopt::model::random::multi_knapsack;
use mipreopt::model::{load_series, perturb_series, write_series, Component, Series};
use mipreopt::solver::ClockMode;
use std::collections::BTreeSet;
use std::path::Path;

fn det_run(techniques: Techniques) -> RunConfig {
    RunConfig {
        techniques,
        seed: 7,
        clock: ClockMode::Deterministic {
            work_per_second: 1000.0,
        },
        ..RunConfig::default()
    }
}

fn series_in(dir: &Path, kind: Component, count: usize) -> Series {
    let base = multi_knapsack(14, 2, 11);
    let changing: BTreeSet<Component> = [kind].into();
    let insts = perturb_series(&base, &changing, count, 3, 0.1).unwrap();
    let manifest = write_series(dir, "s", 10.0, &changing, &insts).unwrap();
    load_series(manifest).unwrap()
}

fn identical_series(dir: &Path, count: usize) -> Series {
    let base = multi_knapsack(20, 3, 2);
    let insts = vec![base; count];
    let manifest = write_series(dir, "same", 10.0, &[Component::Rhs].into(), &insts).unwrap();
    load_series(manifest).unwrap()
}

#[test]
fn stores_feed_later_instances() {
    let dir = tempfile::tempdir().unwrap();
    let series = identical_series(dir.path(), 3);
    let mut run = det_run(Techniques::ALL);
    run.techniques.tuning = false;
    let report = run_series(&series, &run).unwrap();
    let r = &report.records;
    assert_eq!(r.len(), 3);
    assert_eq!(r[0].rule, "fullstrong");
    assert!(r.iter().skip(1).all(|x| x.rule == "pseudocost"), "{r:?}");
    assert!(!r[0].hint_converted);
    assert!(r[1].hint_converted && r[2].hint_converted);
    assert_eq!(r[1].pb, r[0].pb);
    assert!(report.summary.hint_conversion_rate.unwrap() > 0.99);
}

#[test]
fn resumed_run_equals_uninterrupted() {
    let dir = tempfile::tempdir().unwrap();
    let series = series_in(&dir.path().join("series"), Component::Rhs, 12);
    let full = run_series(&series, &det_run(Techniques::ALL)).unwrap();

    let mut run = det_run(Techniques::ALL);
    run.checkpoint = Some(dir.path().join("ckpt.json"));
    run.stop_after = Some(5);
    let part = run_series(&series, &run).unwrap();
    assert_eq!(part.records.len(), 5);
    let part = run_series(&series, &run).unwrap();
    assert_eq!(part.records.len(), 10);
    run.stop_after = None;
    let resumed = run_series(&series, &run).unwrap();
    assert_eq!(report_csv(&resumed.records), report_csv(&full.records));
    assert_eq!(resumed.summary, full.summary);
    // complete checkpoint: nothing left to do
    let again = run_series(&series, &run).unwrap();
    assert_eq!(again.records, full.records);
}

#[test]
fn checkpoint_of_another_series_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let a = series_in(&dir.path().join("a"), Component::Rhs, 3);
    let b = series_in(&dir.path().join("b"), Component::Rhs, 4);
    let mut run = det_run(Techniques::BASE);
    run.checkpoint = Some(dir.path().join("ckpt.json"));
    run.stop_after = Some(1);
    run_series(&a, &run).unwrap();
    assert!(run_series(&b, &run).is_err());
}

#[test]
fn base_ignores_filled_stores() {
    let dir = tempfile::tempdir().unwrap();
    let series = series_in(&dir.path().join("series"), Component::Objective, 6);

    // a full run leaves populated stores behind in its checkpoint
    let mut donor_run = det_run(Techniques::ALL);
    donor_run.checkpoint = Some(dir.path().join("donor.json"));
    run_series(&series, &donor_run).unwrap();
    let text = std::fs::read_to_string(dir.path().join("donor.json")).unwrap();
    let donor: SeriesState = serde_json::from_str(&text).unwrap();
    assert!(!donor.pool.is_empty());
    assert!(donor.histories.latest.is_some());

    let base_run = det_run(Techniques::BASE);
    let fresh = run_series(&series, &base_run).unwrap();
    let mut filled = SeriesState::new(&series, &base_run);
    filled.pool = donor.pool;
    filled.histories = donor.histories;
    let with_stores = run_series_with_state(&series, &base_run, filled).unwrap();
    assert_eq!(report_csv(&with_stores.records), report_csv(&fresh.records));
    assert!(fresh
        .records
        .iter()
        .all(|r| !r.hint && r.rule == "reliability"));
}

#[test]
fn unreadable_instance_scores_two() {
    let dir = tempfile::tempdir().unwrap();
    let series = series_in(dir.path(), Component::Rhs, 4);
    std::fs::write(series.instance_path(2), "{ not json").unwrap();
    let report = run_series(&series, &det_run(Techniques::ALL)).unwrap();
    let r = &report.records[2];
    assert_eq!(r.status, "ERROR");
    assert_eq!(r.total_score, 2.0);
    assert_eq!(report.records.len(), 4);
    assert_eq!(report.summary.errors.len(), 1);
    assert_eq!(report.records[3].status, "OPTIMAL");
}

#[test]
fn comparison_rows_cover_batches_and_total() {
    let dir = tempfile::tempdir().unwrap();
    let series = series_in(dir.path(), Component::Rhs, 12);
    let a = run_series(&series, &det_run(Techniques::ALL)).unwrap();
    let b = run_series(&series, &det_run(Techniques::BASE)).unwrap();
    let rows = compare_reports(&a.records, &b.records);
    let labels: Vec<&str> = rows.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["1-10", "11-12", "all"]);
    let self_cmp = compare_reports(&a.records, &a.records);
    assert!(self_cmp
        .iter()
        .all(|r| r.improvement_pct == 0.0 || r.baseline == 0.0));
}
