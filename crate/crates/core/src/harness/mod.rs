// SPDX-License-Identifier: Apache-2.0

//! Scoring, the series driver and report files.

mod report;
mod scoring;
mod series;

pub use report::{
    read_report_csv, report_csv, summary_json, write_report, ComparisonRow, SeriesReport,
    SeriesSummary, TurnoffEvent,
};
pub use scoring::{
    batch_averages, gap_score, improvement_pct, shifted_geomean, time_score, total_score,
    BatchAverage, ScoreRecord, BATCH_SIZE, GEOMEAN_SHIFT,
};
pub use series::{
    compare_reports, run_series, run_series_with_state, score_outcome, RunConfig, SeriesState,
    Techniques,
};

use crate::model::ModelError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("checkpoint does not match the series: {0}")]
    Checkpoint(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}
