// SPDX-License-Identifier: Apache-2.0

//! Branching statistics kept per variable and for the whole problem.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Down,
    Up,
}

/// Pseudocost sums and counts plus auxiliary conflict and inference counts.
///
/// Counts are floats because a transferred history may carry a rescaled,
/// capped count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct VariableHistory {
    pub pscost_up_sum: f64,
    pub pscost_down_sum: f64,
    pub pscost_up_count: f64,
    pub pscost_down_count: f64,
    pub conflict_count_up: f64,
    pub conflict_count_down: f64,
    pub inference_count_up: f64,
    pub inference_count_down: f64,
}

/// Same records, aggregated over every variable.
pub type GlobalHistory = VariableHistory;

impl VariableHistory {
    pub fn sum(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Up => self.pscost_up_sum,
            Direction::Down => self.pscost_down_sum,
        }
    }

    pub fn count(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Up => self.pscost_up_count,
            Direction::Down => self.pscost_down_count,
        }
    }

    /// Average per-unit gain, defined once at least one update happened.
    pub fn average(&self, dir: Direction) -> Option<f64> {
        let c = self.count(dir);
        (c > 0.0).then(|| self.sum(dir) / c)
    }

    /// Smaller of the two directional counts.
    pub fn reliability(&self) -> f64 {
        self.pscost_up_count.min(self.pscost_down_count)
    }

    pub fn record_conflict(&mut self, dir: Direction) {
        match dir {
            Direction::Up => self.conflict_count_up += 1.0,
            Direction::Down => self.conflict_count_down += 1.0,
        }
    }

    /// Caps both pseudocost counts at `cap`, rescaling the sums so that the
    /// per-unit averages stay unchanged.
    pub fn capped(&self, cap: f64) -> Self {
        let mut h = *self;
        if h.pscost_up_count > cap {
            h.pscost_up_sum = self.pscost_up_sum / self.pscost_up_count * cap;
            h.pscost_up_count = cap;
        }
        if h.pscost_down_count > cap {
            h.pscost_down_sum = self.pscost_down_sum / self.pscost_down_count * cap;
            h.pscost_down_count = cap;
        }
        h
    }
}

/// Adds one observation: `obj_gain / frac_change` joins the directional sum
/// and the count grows by one. Slightly negative gains from LP noise are
/// clamped to zero.
///
/// # Panics
/// If `frac_change` is not positive.
pub fn update_pseudocost(
    hist: &mut VariableHistory,
    direction: Direction,
    obj_gain: f64,
    frac_change: f64,
) {
    assert!(
        frac_change > 0.0,
        "pseudocost update needs a positive fractional change, got {frac_change}"
    );
    let per_unit = obj_gain.max(0.0) / frac_change;
    match direction {
        Direction::Up => {
            hist.pscost_up_sum += per_unit;
            hist.pscost_up_count += 1.0;
        }
        Direction::Down => {
            hist.pscost_down_sum += per_unit;
            hist.pscost_down_count += 1.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incremental_average() {
        let mut h = VariableHistory::default();
        update_pseudocost(&mut h, Direction::Up, 2.0, 0.5);
        assert_eq!(h.average(Direction::Up), Some(4.0));
        assert_eq!(h.pscost_up_count, 1.0);
        update_pseudocost(&mut h, Direction::Up, 0.0, 0.5);
        assert_eq!(h.average(Direction::Up), Some(2.0));
        assert_eq!(h.pscost_up_count, 2.0);
        assert_eq!(h.average(Direction::Down), None);
    }

    #[test]
    fn tiny_negative_gain_clamped() {
        let mut h = VariableHistory::default();
        update_pseudocost(&mut h, Direction::Down, -1e-9, 0.25);
        assert_eq!(h.average(Direction::Down), Some(0.0));
    }

    #[test]
    #[should_panic(expected = "positive fractional change")]
    fn zero_fraction_rejected() {
        let mut h = VariableHistory::default();
        update_pseudocost(&mut h, Direction::Up, 1.0, 0.0);
    }

    #[test]
    fn capping_keeps_average() {
        let h = VariableHistory {
            pscost_up_sum: 30.0,
            pscost_up_count: 10.0,
            pscost_down_sum: 3.0,
            pscost_down_count: 3.0,
            conflict_count_up: 2.0,
            ..Default::default()
        };
        let c = h.capped(4.0);
        assert_eq!(c.pscost_up_count, 4.0);
        assert_eq!(c.pscost_up_sum, 12.0);
        assert_eq!(c.average(Direction::Up), Some(3.0));
        assert_eq!(c.pscost_down_count, 3.0);
        assert_eq!(c.pscost_down_sum, 3.0);
        assert_eq!(c.conflict_count_up, 2.0);
    }
}
