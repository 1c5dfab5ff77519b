// SPDX-License-Identifier: Apache-2.0

use super::HarnessError;
use serde::{Deserialize, Serialize};

pub const BATCH_SIZE: usize = 10;
pub const GEOMEAN_SHIFT: f64 = 10.0;

/// Fraction of the time limit used when solved, 1 otherwise.
pub fn time_score(solve_time: f64, time_limit: f64, solved: bool) -> f64 {
    assert!(time_limit > 0.0, "time limit must be positive");
    if solved {
        (solve_time / time_limit).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

/// Relative distance between primal and dual bound: 1 when either is
/// infinite or the signs differ, 0 when they coincide (also at 0/0).
pub fn gap_score(pb: f64, db: f64) -> f64 {
    if !pb.is_finite() || !db.is_finite() || pb * db < 0.0 {
        return 1.0;
    }
    if pb == db {
        return 0.0;
    }
    ((pb - db).abs() / pb.abs().max(db.abs())).min(1.0)
}

/// Per-instance scores. `status` is the solver status or `ERROR` when the
/// instance could not be processed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub index: usize,
    pub status: String,
    pub time: f64,
    #[serde(with = "crate::serde_ext")]
    pub pb: f64,
    #[serde(with = "crate::serde_ext")]
    pub db: f64,
    pub time_score: f64,
    pub gap_score: f64,
    pub total_score: f64,
    pub hint_converted: bool,
    pub rule: String,
    pub hint: bool,
    pub cuts: bool,
    pub rootcuts: bool,
}

pub fn total_score(rec: &ScoreRecord) -> f64 {
    rec.time_score + rec.gap_score
}

/// `exp(mean(ln(t + shift))) - shift`, evaluated as
/// `shift * expm1(mean(ln_1p(t / shift)))` so that all-zero input gives 0.
pub fn shifted_geomean(times: &[f64], shift: f64) -> Result<f64, HarnessError> {
    if times.is_empty() {
        return Err(HarnessError::EmptyInput(
            "shifted geometric mean of no values",
        ));
    }
    let mean = times.iter().map(|t| (t / shift).ln_1p()).sum::<f64>() / times.len() as f64;
    Ok(shift * mean.exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchAverage {
    /// First and last instance of the batch, 1-based.
    pub first: usize,
    pub last: usize,
    pub size: usize,
    pub mean_total: f64,
}

/// Mean total score over consecutive blocks of ten instances; the last
/// block may be shorter.
pub fn batch_averages(records: &[ScoreRecord]) -> Vec<BatchAverage> {
    records
        .chunks(BATCH_SIZE)
        .enumerate()
        .map(|(b, chunk)| BatchAverage {
            first: b * BATCH_SIZE + 1,
            last: b * BATCH_SIZE + chunk.len(),
            size: chunk.len(),
            mean_total: chunk.iter().map(|r| r.total_score).sum::<f64>() / chunk.len() as f64,
        })
        .collect()
}

/// `100 (base - new) / base`; positive means `new` is better.
pub fn improvement_pct(base: f64, new: f64) -> f64 {
    100.0 * (base - new) / base
}
