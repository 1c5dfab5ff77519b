// SPDX-License-Identifier: Apache-2.0

use super::scoring::{batch_averages, shifted_geomean, BatchAverage, ScoreRecord, GEOMEAN_SHIFT};
use super::series::SeriesState;
use super::HarnessError;
use crate::tuner::TunerSummary;
use crate::turnoff::Governed;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnoffEvent {
    pub component: Governed,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub series_name: String,
    pub instances: usize,
    pub batches: Vec<BatchAverage>,
    pub mean_total: f64,
    pub geomean_time: f64,
    pub tuner: Vec<TunerSummary>,
    pub turnoff: Vec<TurnoffEvent>,
    /// Share of instances with hints whose hints became a solution.
    pub hint_conversion_rate: Option<f64>,
    pub errors: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    pub records: Vec<ScoreRecord>,
    pub summary: SeriesSummary,
}

impl SeriesReport {
    pub fn from_state(state: &SeriesState) -> Self {
        let records = state.records.clone();
        let times: Vec<f64> = records.iter().map(|r| r.time).collect();
        let mean_total = if records.is_empty() {
            0.0
        } else {
            records.iter().map(|r| r.total_score).sum::<f64>() / records.len() as f64
        };
        let converted = records.iter().filter(|r| r.hint_converted).count();
        SeriesReport {
            summary: SeriesSummary {
                series_name: state.series_name.clone(),
                instances: records.len(),
                batches: batch_averages(&records),
                mean_total,
                geomean_time: shifted_geomean(&times, GEOMEAN_SHIFT).unwrap_or(0.0),
                tuner: state
                    .tuner
                    .as_ref()
                    .map(|t| t.summary())
                    .unwrap_or_default(),
                turnoff: state.turnoff_events.clone(),
                hint_conversion_rate: (state.hints_offered > 0)
                    .then(|| converted as f64 / state.hints_offered as f64),
                errors: state.errors.clone(),
            },
            records,
        }
    }
}

/// One line of a report comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub baseline: f64,
    pub report: f64,
    pub improvement_pct: f64,
}

pub fn report_csv(records: &[ScoreRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

pub fn summary_json(report: &SeriesReport) -> String {
    let mut s = serde_json::to_string_pretty(&report.summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Writes `report.csv` and `summary.json` into `dir`; returns both paths.
pub fn write_report(
    dir: impl AsRef<Path>,
    report: &SeriesReport,
) -> Result<(PathBuf, PathBuf), HarnessError> {
    let dir = dir.as_ref();
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| HarnessError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let csv_path = dir.join("report.csv");
    let json_path = dir.join("summary.json");
    fs::write(&csv_path, report_csv(&report.records)).map_err(io(&csv_path))?;
    fs::write(&json_path, summary_json(report)).map_err(io(&json_path))?;
    Ok((csv_path, json_path))
}

/// Reads a `report.csv`; a directory argument means the file inside it.
pub fn read_report_csv(path: impl AsRef<Path>) -> Result<Vec<ScoreRecord>, HarnessError> {
    let mut path = path.as_ref().to_path_buf();
    if path.is_dir() {
        path = path.join("report.csv");
    }
    let mut rdr = csv::Reader::from_path(&path).map_err(|source| HarnessError::Csv {
        path: path.clone(),
        source,
    })?;
    rdr.deserialize()
        .collect::<Result<Vec<ScoreRecord>, _>>()
        .map_err(|source| HarnessError::Csv { path, source })
}
