// SPDX-License-Identifier: Apache-2.0

use super::history::{update_pseudocost, Direction, GlobalHistory, VariableHistory};
use super::{BranchingRule, Clock, SolverConfig, SolverStats};
use crate::lp::{solve_lp, LpProblem, LpResult, LpStatus};
use crate::model::MipInstance;

const SCORE_EPS: f64 = 1e-6;
const INFEASIBLE_GAIN: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub var: usize,
    pub value: f64,
}

impl Candidate {
    fn down_frac(&self) -> f64 {
        self.value - self.value.floor()
    }

    fn up_frac(&self) -> f64 {
        self.value.ceil() - self.value
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branching {
    Branch {
        var: usize,
        value: f64,
    },
    /// Strong branching showed both children of some candidate infeasible.
    Infeasible,
}

/// Integer variables whose LP value is farther than `int_tol` from an
/// integer, in index order.
pub fn fractional_candidates(inst: &MipInstance, x: &[f64], int_tol: f64) -> Vec<Candidate> {
    inst.integer_indices()
        .filter(|&j| (x[j] - x[j].round()).abs() > int_tol)
        .map(|j| Candidate {
            var: j,
            value: x[j],
        })
        .collect()
}

fn estimate(h: &VariableHistory, g: &GlobalHistory, dir: Direction) -> f64 {
    if h.count(dir) >= 1.0 {
        h.sum(dir) / h.count(dir)
    } else if g.count(dir) >= 1.0 {
        g.sum(dir) / g.count(dir)
    } else {
        1.0
    }
}

fn product_score(down: f64, up: f64) -> f64 {
    down.max(SCORE_EPS) * up.max(SCORE_EPS)
}

struct StrongResult {
    down: f64,
    up: f64,
    both_infeasible: bool,
}

#[allow(clippy::too_many_arguments)]
fn strong_branch(
    problem: &LpProblem,
    node: &LpResult,
    cand: Candidate,
    history: &mut VariableHistory,
    global: &mut GlobalHistory,
    cfg: &SolverConfig,
    stats: &mut SolverStats,
    clock: &mut Clock,
) -> StrongResult {
    let big = INFEASIBLE_GAIN * node.objective.abs().max(1.0);
    let mut gains = [0.0; 2];
    let mut infeasible = [false; 2];
    for (k, dir) in [Direction::Down, Direction::Up].into_iter().enumerate() {
        let mut lo = problem.lower.to_vec();
        let mut up = problem.upper.to_vec();
        let frac = match dir {
            Direction::Down => {
                up[cand.var] = cand.value.floor();
                cand.down_frac()
            }
            Direction::Up => {
                lo[cand.var] = cand.value.ceil();
                cand.up_frac()
            }
        };
        let child = LpProblem::new(problem.inst, problem.extra_rows, &lo, &up);
        let res = solve_lp(&child, node.basis.as_ref(), cfg.strong_branch_iter_limit);
        stats.sb_lp_solves += 1;
        stats.lp_iterations += res.iterations;
        clock.charge(1 + res.iterations);
        gains[k] = match res.status {
            LpStatus::Optimal => {
                let gain = (res.objective - node.objective).max(0.0);
                update_pseudocost(history, dir, gain, frac);
                update_pseudocost(global, dir, gain, frac);
                gain
            }
            LpStatus::Infeasible => {
                infeasible[k] = true;
                history.record_conflict(dir);
                global.record_conflict(dir);
                big
            }
            LpStatus::Unbounded | LpStatus::IterLimit => estimate(history, global, dir) * frac,
        };
    }
    StrongResult {
        down: gains[0],
        up: gains[1],
        both_infeasible: infeasible[0] && infeasible[1],
    }
}

/// Picks the branching variable at a node.
///
/// * reliability: strong-branch candidates whose smaller pseudocost count is
///   below the threshold (at most `strong_branch_candidate_limit` of them),
///   then score everyone;
/// * pseudocost: score from pseudocosts only, never solving an LP;
/// * full strong: strong-branch every candidate.
///
/// Scores use the product rule; ties go to the lowest variable index.
/// Strong branching stops early once the clock passes `deadline`.
///
/// # Panics
/// If `candidates` is empty.
#[allow(clippy::too_many_arguments)]
pub fn branch_select(
    problem: &LpProblem,
    node: &LpResult,
    candidates: &[Candidate],
    histories: &mut [VariableHistory],
    global: &mut GlobalHistory,
    cfg: &SolverConfig,
    stats: &mut SolverStats,
    clock: &mut Clock,
    deadline: f64,
) -> Branching {
    assert!(
        !candidates.is_empty(),
        "branch_select needs a fractional candidate"
    );
    let threshold = cfg.reliability_threshold as f64;
    let mut strong_left = match cfg.branching_rule {
        BranchingRule::Reliability => cfg.strong_branch_candidate_limit.unwrap_or(usize::MAX),
        BranchingRule::FullStrong => usize::MAX,
        BranchingRule::Pseudocost => 0,
    };
    let mut best: Option<(f64, Candidate)> = None;
    for &cand in candidates {
        let wants_strong = match cfg.branching_rule {
            BranchingRule::Reliability => histories[cand.var].reliability() < threshold,
            BranchingRule::FullStrong => true,
            BranchingRule::Pseudocost => false,
        };
        let (down, up) = if wants_strong && strong_left > 0 && clock.elapsed() < deadline {
            strong_left -= 1;
            let res = strong_branch(
                problem,
                node,
                cand,
                &mut histories[cand.var],
                global,
                cfg,
                stats,
                clock,
            );
            if res.both_infeasible {
                return Branching::Infeasible;
            }
            (res.down, res.up)
        } else {
            let h = &histories[cand.var];
            (
                estimate(h, global, Direction::Down) * cand.down_frac(),
                estimate(h, global, Direction::Up) * cand.up_frac(),
            )
        };
        let score = product_score(down, up);
        if best.map_or(true, |(s, _)| score > s) {
            best = Some((score, cand));
        }
    }
    let (_, c) = best.expect("non-empty candidate list");
    Branching::Branch {
        var: c.var,
        value: c.value,
    }
}
