// SPDX-License-Identifier: Apache-2.0

//! Permanent disabling of presolvers, separators and heuristics that showed
//! no effect over the first instances of a series.

use crate::solver::{Heuristic, Presolver, Separator, SolverConfig, SolverStats};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const PRESOLVER_MIN_INSTANCES: u64 = 15;
pub const SEPARATOR_MIN_INSTANCES: u64 = 25;
pub const HEURISTIC_MIN_INSTANCES: u64 = 25;
/// Largest acceptable time per best solution, as a fraction of the
/// per-instance time limit.
pub const HEURISTIC_TIME_FRACTION: f64 = 0.2;

/// Components the ledger governs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Governed {
    BoundTighten,
    CoefTighten,
    Gomory,
    Rounding,
    CompleteSol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Presolver,
    Separator,
    Heuristic,
}

impl Governed {
    pub const ALL: [Governed; 5] = [
        Governed::BoundTighten,
        Governed::CoefTighten,
        Governed::Gomory,
        Governed::Rounding,
        Governed::CompleteSol,
    ];

    pub fn kind(self) -> Kind {
        match self {
            Governed::BoundTighten | Governed::CoefTighten => Kind::Presolver,
            Governed::Gomory => Kind::Separator,
            Governed::Rounding | Governed::CompleteSol => Kind::Heuristic,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Governed::BoundTighten => "bound_tighten",
            Governed::CoefTighten => "coef_tighten",
            Governed::Gomory => "gomory",
            Governed::Rounding => "rounding",
            Governed::CompleteSol => "completesol",
        }
    }

    /// Whether `cfg` lets the component run at all.
    pub fn enabled_in(self, cfg: &SolverConfig) -> bool {
        match self {
            Governed::BoundTighten => cfg.enabled_presolvers.contains(&Presolver::BoundTighten),
            Governed::CoefTighten => cfg.enabled_presolvers.contains(&Presolver::CoefTighten),
            Governed::Gomory => cfg.enabled_separators.contains(&Separator::Gomory),
            Governed::Rounding => cfg.enabled_heuristics.contains(&Heuristic::Rounding),
            Governed::CompleteSol => cfg.enabled_heuristics.contains(&Heuristic::CompleteSol),
        }
    }

    pub fn remove_from(self, cfg: &mut SolverConfig) {
        match self {
            Governed::BoundTighten => {
                cfg.enabled_presolvers.remove(&Presolver::BoundTighten);
            }
            Governed::CoefTighten => {
                cfg.enabled_presolvers.remove(&Presolver::CoefTighten);
            }
            Governed::Gomory => {
                cfg.enabled_separators.remove(&Separator::Gomory);
            }
            Governed::Rounding => {
                cfg.enabled_heuristics.remove(&Heuristic::Rounding);
            }
            Governed::CompleteSol => {
                cfg.enabled_heuristics.remove(&Heuristic::CompleteSol);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub changes: u64,
    pub cuts: u64,
    pub solutions: u64,
    pub best_solutions: u64,
    pub time: f64,
    pub instances_observed: u64,
    pub instances_enabled: u64,
    /// Instance index at which the component was switched off.
    pub disabled_at: Option<usize>,
}

impl ComponentRecord {
    pub fn is_disabled(&self) -> bool {
        self.disabled_at.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentLedger {
    pub records: BTreeMap<Governed, ComponentRecord>,
}

impl Default for ComponentLedger {
    fn default() -> Self {
        ComponentLedger {
            records: Governed::ALL
                .iter()
                .map(|&g| (g, ComponentRecord::default()))
                .collect(),
        }
    }
}

impl ComponentLedger {
    /// Adds one instance's statistics. Only components in `enabled` count
    /// the instance and receive its numbers.
    pub fn accumulate(&mut self, stats: &SolverStats, enabled: &BTreeSet<Governed>) {
        for (&g, rec) in &mut self.records {
            rec.instances_observed += 1;
            if !enabled.contains(&g) {
                continue;
            }
            rec.instances_enabled += 1;
            match g {
                Governed::BoundTighten | Governed::CoefTighten => {
                    let p = if g == Governed::BoundTighten {
                        Presolver::BoundTighten
                    } else {
                        Presolver::CoefTighten
                    };
                    if let Some(s) = stats.presolvers.get(&p) {
                        rec.changes += s.changes;
                        rec.time += s.time;
                    }
                }
                Governed::Gomory => {
                    if let Some(s) = stats.separators.get(&Separator::Gomory) {
                        rec.cuts += s.cuts_generated;
                        rec.time += s.time;
                    }
                }
                Governed::Rounding | Governed::CompleteSol => {
                    let h = if g == Governed::Rounding {
                        Heuristic::Rounding
                    } else {
                        Heuristic::CompleteSol
                    };
                    if let Some(s) = stats.heuristics.get(&h) {
                        rec.solutions += s.solutions_found;
                        rec.best_solutions += s.best_solutions_found;
                        rec.time += s.time;
                    }
                }
            }
        }
    }

    /// Disables every component that meets its criterion and returns the
    /// newly disabled ones. Earlier decisions are never revisited.
    pub fn evaluate(&mut self, time_limit: f64, index: usize) -> Vec<Governed> {
        let mut out = Vec::new();
        for (&g, rec) in &mut self.records {
            if rec.is_disabled() {
                continue;
            }
            let off = match g.kind() {
                Kind::Presolver => {
                    rec.instances_enabled >= PRESOLVER_MIN_INSTANCES && rec.changes == 0
                }
                Kind::Separator => {
                    rec.instances_enabled >= SEPARATOR_MIN_INSTANCES && rec.cuts == 0
                }
                Kind::Heuristic => {
                    rec.instances_enabled >= HEURISTIC_MIN_INSTANCES
                        && (rec.best_solutions == 0
                            || rec.time / rec.best_solutions as f64
                                > HEURISTIC_TIME_FRACTION * time_limit)
                }
            };
            if off {
                rec.disabled_at = Some(index);
                out.push(g);
            }
        }
        out
    }

    pub fn disabled(&self) -> BTreeSet<Governed> {
        self.records
            .iter()
            .filter_map(|(&g, r)| r.is_disabled().then_some(g))
            .collect()
    }

    /// Clears the disabled components from `cfg`.
    pub fn apply(&self, cfg: &mut SolverConfig) {
        for g in self.disabled() {
            g.remove_from(cfg);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{HeuristicStats, PresolverStats, SeparatorStats};

    fn stats(changes: u64, cuts: u64, best: u64, htime: f64) -> SolverStats {
        let mut s = SolverStats::default();
        s.presolvers.insert(
            Presolver::BoundTighten,
            PresolverStats { changes, time: 0.0 },
        );
        s.separators.insert(
            Separator::Gomory,
            SeparatorStats {
                cuts_generated: cuts,
                time: 0.0,
            },
        );
        s.heuristics.insert(
            Heuristic::Rounding,
            HeuristicStats {
                calls: 1,
                solutions_found: best,
                best_solutions_found: best,
                time: htime,
            },
        );
        s
    }

    fn all() -> BTreeSet<Governed> {
        Governed::ALL.into()
    }

    #[test]
    fn separator_cuts_accumulate() {
        let mut l = ComponentLedger::default();
        l.accumulate(&stats(0, 3, 0, 0.0), &all());
        assert_eq!(l.records[&Governed::Gomory].cuts, 3);
        l.accumulate(&stats(0, 3, 0, 0.0), &BTreeSet::new());
        assert_eq!(l.records[&Governed::Gomory].cuts, 3);
        assert_eq!(l.records[&Governed::Gomory].instances_enabled, 1);
        assert_eq!(l.records[&Governed::Gomory].instances_observed, 2);
    }

    #[test]
    fn presolver_off_at_fifteen() {
        let mut l = ComponentLedger::default();
        for i in 0..14 {
            l.accumulate(&stats(0, 1, 1, 0.0), &all());
            assert!(l.evaluate(10.0, i).is_empty());
        }
        l.accumulate(&stats(0, 1, 1, 0.0), &all());
        let off = l.evaluate(10.0, 14);
        assert!(off.contains(&Governed::BoundTighten));
        assert_eq!(l.records[&Governed::BoundTighten].disabled_at, Some(14));
    }

    #[test]
    fn heuristic_kept_and_dropped() {
        // 25 instances, 10 best solutions, total 0.1 x limit
        let mut l = ComponentLedger::default();
        for i in 0..25 {
            let best = u64::from(i < 10);
            l.accumulate(&stats(1, 1, best, 0.1 * 10.0 / 25.0), &all());
        }
        assert!(!l.evaluate(10.0, 24).contains(&Governed::Rounding));
        // one best solution, 0.25 x limit
        let mut l = ComponentLedger::default();
        for i in 0..25 {
            l.accumulate(&stats(1, 1, u64::from(i == 0), 0.25 * 10.0 / 25.0), &all());
        }
        assert!(l.evaluate(10.0, 24).contains(&Governed::Rounding));
    }

    #[test]
    fn idempotent_and_permanent() {
        let mut l = ComponentLedger::default();
        for _ in 0..15 {
            l.accumulate(&stats(0, 1, 1, 0.0), &all());
        }
        assert!(!l.evaluate(10.0, 14).is_empty());
        let snapshot = l.clone();
        assert!(l.evaluate(10.0, 14).is_empty());
        assert_eq!(l, snapshot);
        l.accumulate(&stats(100, 1, 1, 0.0), &all());
        l.evaluate(10.0, 15);
        assert!(l.records[&Governed::BoundTighten].is_disabled());
        let mut cfg = SolverConfig::default();
        l.apply(&mut cfg);
        assert!(!cfg.enabled_presolvers.contains(&Presolver::BoundTighten));
    }
}
