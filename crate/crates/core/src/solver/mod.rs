// SPDX-License-Identifier: Apache-2.0

//! Branch-and-bound MIP solver.
//!
//! Best-bound search with short depth-first plunges, three branching rules,
//! Gomory mixed-integer cuts at the root and in the tree, a rounding
//! heuristic at every node and a hint-completion heuristic at the root.
//! Branching histories may be supplied up front and are returned with the
//! outcome so a later solve can pick them up.

mod branching;
mod cuts;
mod heuristics;
mod history;
mod presolve;
mod tree;

use crate::model::{MipInstance, Solution, Tolerances};
use crate::reopt::HintSet;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

pub use branching::{branch_select, fractional_candidates, Branching, Candidate};
pub use cuts::generate_cuts;
pub use heuristics::{complete_hint, rounding_heuristic};
pub use history::{update_pseudocost, Direction, GlobalHistory, VariableHistory};
pub use presolve::{run_presolve, PresolveResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchingRule {
    Reliability,
    Pseudocost,
    #[serde(rename = "fullstrong")]
    FullStrong,
}

impl std::fmt::Display for BranchingRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BranchingRule::Reliability => "reliability",
            BranchingRule::Pseudocost => "pseudocost",
            BranchingRule::FullStrong => "fullstrong",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heuristic {
    Rounding,
    #[serde(rename = "completesol")]
    CompleteSol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presolver {
    BoundTighten,
    CoefTighten,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Separator {
    Gomory,
}

/// How the solver measures elapsed time.
///
/// `Deterministic` counts work units (one per LP solve plus one per simplex
/// pivot) and converts them to seconds, which makes every limit and timing
/// statistic reproducible across machines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClockMode {
    Wall,
    Deterministic { work_per_second: f64 },
}

#[derive(Debug, Clone)]
pub struct Clock {
    mode: ClockMode,
    start: Instant,
    work: u64,
}

impl Clock {
    pub fn new(mode: ClockMode) -> Self {
        Clock {
            mode,
            start: Instant::now(),
            work: 0,
        }
    }

    pub fn charge(&mut self, units: u64) {
        self.work += units;
    }

    pub fn work(&self) -> u64 {
        self.work
    }

    pub fn elapsed(&self) -> f64 {
        match self.mode {
            ClockMode::Wall => self.start.elapsed().as_secs_f64(),
            ClockMode::Deterministic { work_per_second } => self.work as f64 / work_per_second,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub branching_rule: BranchingRule,
    pub reliability_threshold: u32,
    pub use_cuts_root: bool,
    pub use_cuts_tree: bool,
    pub enabled_heuristics: BTreeSet<Heuristic>,
    pub enabled_presolvers: BTreeSet<Presolver>,
    pub enabled_separators: BTreeSet<Separator>,
    pub completesol_node_limit: u64,
    /// `None` lets the hint completion keep every improving solution.
    pub completesol_max_improving: Option<u32>,
    /// `None` strong-branches every unreliable candidate.
    pub strong_branch_candidate_limit: Option<usize>,
    /// Carried for reproducibility bookkeeping; the search itself has no
    /// randomized step.
    pub seed: u64,
    pub node_limit: Option<u64>,
    pub clock: ClockMode,
    pub tolerances: Tolerances,
    pub root_cut_rounds: u32,
    pub max_cuts_per_round: usize,
    pub strong_branch_iter_limit: u64,
    pub lp_iter_limit: u64,
    /// Depth-first steps taken before returning to best-bound selection.
    pub max_plunge_depth: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            branching_rule: BranchingRule::Reliability,
            reliability_threshold: 5,
            use_cuts_root: true,
            use_cuts_tree: true,
            enabled_heuristics: [Heuristic::Rounding, Heuristic::CompleteSol].into(),
            enabled_presolvers: [Presolver::BoundTighten, Presolver::CoefTighten].into(),
            enabled_separators: [Separator::Gomory].into(),
            completesol_node_limit: 500,
            completesol_max_improving: Some(5),
            strong_branch_candidate_limit: None,
            seed: 0,
            node_limit: None,
            clock: ClockMode::Wall,
            tolerances: Tolerances::default(),
            root_cut_rounds: 5,
            max_cuts_per_round: 10,
            strong_branch_iter_limit: 500,
            lp_iter_limit: 50_000,
            max_plunge_depth: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Optimal,
    TimeLimit,
    NodeLimit,
    Infeasible,
    Unbounded,
}

impl SolveStatus {
    /// Optimality or infeasibility was proven.
    pub fn is_solved(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Infeasible)
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "OPTIMAL",
            SolveStatus::TimeLimit => "TIME_LIMIT",
            SolveStatus::NodeLimit => "NODE_LIMIT",
            SolveStatus::Infeasible => "INFEASIBLE",
            SolveStatus::Unbounded => "UNBOUNDED",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SeparatorStats {
    pub cuts_generated: u64,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HeuristicStats {
    pub calls: u64,
    pub solutions_found: u64,
    pub best_solutions_found: u64,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PresolverStats {
    pub changes: u64,
    pub time: f64,
}

/// One point of the primal/dual bound trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    pub time: f64,
    pub primal: f64,
    pub dual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverStats {
    pub nodes: u64,
    pub lp_iterations: u64,
    pub sb_lp_solves: u64,
    pub separators: BTreeMap<Separator, SeparatorStats>,
    pub heuristics: BTreeMap<Heuristic, HeuristicStats>,
    pub presolvers: BTreeMap<Presolver, PresolverStats>,
    pub time_to_first_incumbent: Option<f64>,
    pub hint_converted: bool,
    /// Recorded whenever either bound moves.
    pub bound_trace: Vec<BoundSample>,
}

/// Branching histories handed from one solve to the next.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WarmHistories {
    pub variables: BTreeMap<String, VariableHistory>,
    pub global: GlobalHistory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub primal_bound: f64,
    pub dual_bound: f64,
    pub best_solution: Option<Solution>,
    pub stats: SolverStats,
    pub histories: BTreeMap<String, VariableHistory>,
    pub global_history: GlobalHistory,
    pub solve_time: f64,
}

impl SolveOutcome {
    pub fn warm_histories(&self) -> WarmHistories {
        WarmHistories {
            variables: self.histories.clone(),
            global: self.global_history,
        }
    }
}

/// Solves `inst` within `time_limit` seconds of the configured clock.
///
/// `hints` are offered to the hint-completion heuristic once at the root;
/// `warm` seeds branching statistics by variable name.
pub fn solve(
    inst: &MipInstance,
    cfg: &SolverConfig,
    time_limit: f64,
    hints: &HintSet,
    warm: Option<&WarmHistories>,
) -> SolveOutcome {
    let mut clock = Clock::new(cfg.clock);
    tree::solve_with_clock(inst, cfg, time_limit, hints, warm, &mut clock)
}
