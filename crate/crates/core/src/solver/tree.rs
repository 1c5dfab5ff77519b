// SPDX-License-Identifier: Apache-2.0

use super::branching::{branch_select, fractional_candidates, Branching};
use super::cuts::generate_cuts;
use super::heuristics::{complete_hint, rounding_heuristic};
use super::history::{update_pseudocost, Direction, GlobalHistory, VariableHistory};
use super::presolve::run_presolve;
use super::{
    BoundSample, BranchingRule, Clock, Heuristic, HeuristicStats, Separator, SeparatorStats,
    SolveOutcome, SolveStatus, SolverConfig, SolverStats, WarmHistories,
};
use crate::lp::{solve_lp, Basis, LpProblem, LpResult, LpStatus};
use crate::model::{MipInstance, Row, Solution};
use crate::reopt::HintSet;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

struct BranchInfo {
    var: usize,
    dir: Direction,
    frac: f64,
    parent_obj: f64,
}

struct Node {
    id: u64,
    /// Lower bound inherited from the parent LP.
    bound: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Cuts valid only in this subtree.
    cuts: Vec<Row>,
    basis: Option<Basis>,
    plunge: u32,
    branch: Option<BranchInfo>,
}

struct Open(Node);

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Open {}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Open {
    // max-heap: smaller bound, then smaller id, compares greater
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then(other.0.id.cmp(&self.0.id))
    }
}

fn prune_tol(pb: f64) -> f64 {
    1e-7 + 1e-9 * pb.abs()
}

/// Incumbent bookkeeping shared by every place that finds a solution.
struct Search<'a> {
    original: &'a MipInstance,
    cfg: &'a SolverConfig,
    start: f64,
    pb: f64,
    db: f64,
    best: Option<Solution>,
    stats: SolverStats,
    improving: Vec<Vec<f64>>,
}

impl Search<'_> {
    /// Verifies `x` against the unpresolved instance and installs it when it
    /// improves the incumbent.
    fn offer(&mut self, mut x: Vec<f64>, clock: &Clock) -> bool {
        let tol = self.cfg.tolerances;
        for j in self.original.integer_indices() {
            if (x[j] - x[j].round()).abs() <= tol.int {
                x[j] = x[j].round();
            }
        }
        let Ok(sol) = Solution::evaluate(self.original, x, tol) else {
            return false;
        };
        if !sol.is_feasible() || sol.objective >= self.pb - 1e-9 * self.pb.abs().max(1.0) {
            return false;
        }
        // an LP bound can overshoot the true optimum by roundoff; never let
        // the incumbent value fall below the proven dual bound
        debug_assert!(sol.objective >= self.db - 1e-6 * self.db.abs().max(1.0));
        self.pb = sol.objective.max(self.db);
        self.improving.push(sol.values.clone());
        self.best = Some(sol);
        if self.stats.time_to_first_incumbent.is_none() {
            self.stats.time_to_first_incumbent = Some(clock.elapsed() - self.start);
        }
        self.sample(clock);
        true
    }

    fn raise_dual(&mut self, candidate: f64, clock: &Clock) {
        let db = candidate.min(self.pb);
        if db > self.db {
            self.db = db;
            self.sample(clock);
        }
    }

    fn sample(&mut self, clock: &Clock) {
        self.stats.bound_trace.push(BoundSample {
            time: clock.elapsed() - self.start,
            primal: self.pb,
            dual: self.db,
        });
    }
}

fn charge_lp(stats: &mut SolverStats, clock: &mut Clock, res: &LpResult) {
    stats.lp_iterations += res.iterations;
    clock.charge(1 + res.iterations);
}

/// Solve entry point driven by an external clock. `time_limit` is measured
/// from the clock's current reading.
pub(crate) fn solve_with_clock(
    inst: &MipInstance,
    cfg: &SolverConfig,
    time_limit: f64,
    hints: &HintSet,
    warm: Option<&WarmHistories>,
    clock: &mut Clock,
) -> SolveOutcome {
    let deadline = clock.elapsed() + time_limit.max(0.0);
    search(inst, cfg, deadline, hints, warm, clock, None).0
}

/// Hint-completion sub-MIP: pseudocost branching, no cuts, no presolve, no
/// hints, at most `completesol_node_limit` nodes. Returns the improving
/// solutions in the order found, stopping after `completesol_max_improving`.
pub(crate) fn sub_mip(
    inst: &MipInstance,
    cfg: &SolverConfig,
    clock: &mut Clock,
    deadline: f64,
) -> Vec<Vec<f64>> {
    let sub = SolverConfig {
        branching_rule: BranchingRule::Pseudocost,
        use_cuts_root: false,
        use_cuts_tree: false,
        enabled_heuristics: [Heuristic::Rounding].into(),
        enabled_presolvers: BTreeSet::new(),
        enabled_separators: BTreeSet::new(),
        node_limit: Some(cfg.completesol_node_limit),
        ..cfg.clone()
    };
    let stop = cfg.completesol_max_improving.map(|k| k as usize);
    search(inst, &sub, deadline, &HintSet::default(), None, clock, stop).1
}

#[allow(clippy::too_many_lines)]
fn search(
    inst: &MipInstance,
    cfg: &SolverConfig,
    deadline: f64,
    hints: &HintSet,
    warm: Option<&WarmHistories>,
    clock: &mut Clock,
    stop_after: Option<usize>,
) -> (SolveOutcome, Vec<Vec<f64>>) {
    let n = inst.num_vars();
    let start = clock.elapsed();
    let mut s = Search {
        original: inst,
        cfg,
        start,
        pb: f64::INFINITY,
        db: f64::NEG_INFINITY,
        best: None,
        stats: SolverStats::default(),
        improving: Vec::new(),
    };
    for &h in &cfg.enabled_heuristics {
        s.stats.heuristics.insert(h, HeuristicStats::default());
    }
    for &sep in &cfg.enabled_separators {
        s.stats.separators.insert(sep, SeparatorStats::default());
    }

    let mut histories = vec![VariableHistory::default(); n];
    let mut global = GlobalHistory::default();
    if let Some(w) = warm {
        for (j, name) in inst.var_names.iter().enumerate() {
            if let Some(h) = w.variables.get(name) {
                histories[j] = *h;
            }
        }
        global = w.global;
    }

    let finish = |s: Search,
                  status: SolveStatus,
                  histories: &[VariableHistory],
                  global: GlobalHistory,
                  clock: &Clock| {
        let outcome = SolveOutcome {
            status,
            primal_bound: s.pb,
            dual_bound: s.db,
            best_solution: s.best,
            stats: s.stats,
            histories: inst
                .var_names
                .iter()
                .cloned()
                .zip(histories.iter().copied())
                .collect::<BTreeMap<_, _>>(),
            global_history: global,
            solve_time: clock.elapsed() - start,
        };
        (outcome, s.improving)
    };

    let pre = run_presolve(inst, cfg, clock);
    s.stats.presolvers = pre.stats.clone();
    let Some(work) = pre.instance else {
        s.db = f64::INFINITY;
        return finish(s, SolveStatus::Infeasible, &histories, global, clock);
    };

    let mut global_cuts: Vec<Row> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut next_id = 1u64;
    let mut next = Some(Node {
        id: 0,
        bound: f64::NEG_INFINITY,
        lower: work.lower.clone(),
        upper: work.upper.clone(),
        cuts: Vec::new(),
        basis: None,
        plunge: 0,
        branch: None,
    });
    // bound of nodes abandoned on an LP iteration limit
    let mut lost = f64::INFINITY;
    let mut limit_status = None;
    let mut unbounded = false;

    loop {
        let node = match next.take() {
            Some(nd) => nd,
            None => match heap.pop() {
                Some(Open(nd)) => nd,
                None => break,
            },
        };
        if node.bound >= s.pb - prune_tol(s.pb) {
            continue;
        }
        if clock.elapsed() >= deadline {
            heap.push(Open(node));
            limit_status = Some(SolveStatus::TimeLimit);
            break;
        }
        if cfg.node_limit.is_some_and(|k| s.stats.nodes >= k) {
            heap.push(Open(node));
            limit_status = Some(SolveStatus::NodeLimit);
            break;
        }
        if stop_after.is_some_and(|k| s.improving.len() >= k) {
            heap.push(Open(node));
            limit_status = Some(SolveStatus::NodeLimit);
            break;
        }
        s.stats.nodes += 1;
        let is_root = node.id == 0;
        let Node {
            bound,
            lower,
            upper,
            mut cuts,
            basis,
            plunge,
            branch,
            ..
        } = node;

        let mut extra: Vec<Row> = global_cuts.iter().chain(&cuts).cloned().collect();
        let mut lp = solve_lp(
            &LpProblem::new(&work, &extra, &lower, &upper),
            basis.as_ref(),
            cfg.lp_iter_limit,
        );
        charge_lp(&mut s.stats, clock, &lp);

        if let (Some(b), LpStatus::Optimal) = (&branch, lp.status) {
            debug_assert!(
                lp.objective >= b.parent_obj - 1e-8 * b.parent_obj.abs().max(1.0),
                "child LP {} below parent {}",
                lp.objective,
                b.parent_obj
            );
            let gain = lp.objective - b.parent_obj;
            update_pseudocost(&mut histories[b.var], b.dir, gain, b.frac);
            update_pseudocost(&mut global, b.dir, gain, b.frac);
        }
        match lp.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded if is_root => {
                unbounded = true;
                break;
            }
            LpStatus::Unbounded | LpStatus::IterLimit => {
                lost = lost.min(bound);
                continue;
            }
        }
        if is_root {
            s.raise_dual(lp.objective, clock);
        }
        if lp.objective >= s.pb - prune_tol(s.pb) {
            continue;
        }
        run_rounding(&mut s, &work, &lp, clock);

        if is_root
            && cfg.enabled_heuristics.contains(&Heuristic::CompleteSol)
            && !hints.hints.is_empty()
        {
            let t0 = clock.elapsed();
            let mut found = 0;
            let mut best_found = 0;
            for hint in &hints.hints {
                if clock.elapsed() >= deadline {
                    break;
                }
                let out = complete_hint(&work, hint, cfg, clock, deadline, lp.basis.as_ref());
                found += out.solutions.len() as u64;
                for sol in out.solutions {
                    if s.offer(sol.values, clock) {
                        best_found += 1;
                    }
                }
            }
            let st = s
                .stats
                .heuristics
                .entry(Heuristic::CompleteSol)
                .or_default();
            st.calls += hints.hints.len() as u64;
            st.solutions_found += found;
            st.best_solutions_found += best_found;
            st.time += clock.elapsed() - t0;
            s.stats.hint_converted = found > 0;
            if lp.objective >= s.pb - prune_tol(s.pb) {
                continue;
            }
        }

        // cutting plane rounds
        let rounds = if is_root { cfg.root_cut_rounds } else { 1 };
        let mut pruned = false;
        for _ in 0..rounds {
            if clock.elapsed() >= deadline
                || fractional_candidates(&work, &lp.primal, cfg.tolerances.int).is_empty()
            {
                break;
            }
            let t0 = clock.elapsed();
            let new_cuts = generate_cuts(
                &LpProblem::new(&work, &extra, &lower, &upper),
                &lp,
                is_root,
                cfg,
            );
            if let Some(st) = s.stats.separators.get_mut(&Separator::Gomory) {
                st.cuts_generated += new_cuts.len() as u64;
                st.time += clock.elapsed() - t0;
            }
            if new_cuts.is_empty() {
                break;
            }
            let mut trial = extra.clone();
            trial.extend(new_cuts.iter().cloned());
            let res = solve_lp(
                &LpProblem::new(&work, &trial, &lower, &upper),
                lp.basis.as_ref(),
                cfg.lp_iter_limit,
            );
            charge_lp(&mut s.stats, clock, &res);
            match res.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => {
                    pruned = true;
                    break;
                }
                // keep the previous relaxation
                LpStatus::Unbounded | LpStatus::IterLimit => break,
            }
            if is_root {
                global_cuts.extend(new_cuts);
            } else {
                cuts.extend(new_cuts);
            }
            extra = trial;
            lp = res;
            if is_root {
                s.raise_dual(lp.objective, clock);
            }
            run_rounding(&mut s, &work, &lp, clock);
            if lp.objective >= s.pb - prune_tol(s.pb) {
                pruned = true;
                break;
            }
        }
        if pruned {
            continue;
        }

        let candidates = fractional_candidates(&work, &lp.primal, cfg.tolerances.int);
        if candidates.is_empty() {
            s.offer(lp.primal.clone(), clock);
            continue;
        }
        let problem = LpProblem::new(&work, &extra, &lower, &upper);
        let choice = branch_select(
            &problem,
            &lp,
            &candidates,
            &mut histories,
            &mut global,
            cfg,
            &mut s.stats,
            clock,
            deadline,
        );
        let Branching::Branch { var, value } = choice else {
            continue;
        };
        let make = |dir: Direction, id: u64| {
            let mut lo = lower.clone();
            let mut up = upper.clone();
            let frac = match dir {
                Direction::Down => {
                    up[var] = value.floor();
                    value - value.floor()
                }
                Direction::Up => {
                    lo[var] = value.ceil();
                    value.ceil() - value
                }
            };
            Node {
                id,
                bound: lp.objective,
                lower: lo,
                upper: up,
                cuts: cuts.clone(),
                basis: lp.basis.clone(),
                plunge: 0,
                branch: Some(BranchInfo {
                    var,
                    dir,
                    frac,
                    parent_obj: lp.objective,
                }),
            }
        };
        let down = make(Direction::Down, next_id);
        let up = make(Direction::Up, next_id + 1);
        next_id += 2;
        if plunge < cfg.max_plunge_depth {
            let (mut dive, other) = if value - value.floor() >= 0.5 {
                (up, down)
            } else {
                (down, up)
            };
            dive.plunge = plunge + 1;
            next = Some(dive);
            heap.push(Open(other));
        } else {
            heap.push(Open(down));
            heap.push(Open(up));
        }

        let mut open_min = heap.peek().map_or(f64::INFINITY, |o| o.0.bound);
        if let Some(nd) = &next {
            open_min = open_min.min(nd.bound);
        }
        s.raise_dual(open_min.min(lost), clock);
    }

    if unbounded {
        s.pb = f64::NEG_INFINITY;
        s.db = f64::NEG_INFINITY;
        return finish(s, SolveStatus::Unbounded, &histories, global, clock);
    }
    let status = match limit_status {
        Some(st) => {
            let mut open_min = heap.iter().map(|o| o.0.bound).fold(f64::INFINITY, f64::min);
            if let Some(nd) = &next {
                open_min = open_min.min(nd.bound);
            }
            s.raise_dual(open_min.min(lost), clock);
            st
        }
        None if lost.is_finite() => {
            s.raise_dual(lost, clock);
            SolveStatus::NodeLimit
        }
        None => {
            let (pb, db) = (s.pb, s.db);
            s.db = pb;
            if db != pb {
                s.sample(clock);
            }
            if s.best.is_some() {
                SolveStatus::Optimal
            } else {
                SolveStatus::Infeasible
            }
        }
    };
    finish(s, status, &histories, global, clock)
}

fn run_rounding(s: &mut Search, work: &MipInstance, lp: &LpResult, clock: &Clock) {
    if !s.cfg.enabled_heuristics.contains(&Heuristic::Rounding) {
        return;
    }
    let t0 = clock.elapsed();
    let sol = rounding_heuristic(work, &lp.primal, s.cfg.tolerances);
    let mut found = 0;
    let mut best = 0;
    if let Some(sol) = sol {
        found = 1;
        if s.offer(sol.values, clock) {
            best = 1;
        }
    }
    let st = s.stats.heuristics.entry(Heuristic::Rounding).or_default();
    st.calls += 1;
    st.solutions_found += found;
    st.best_solutions_found += best;
    st.time += clock.elapsed() - t0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::random::{multi_knapsack, random_knapsack, random_mip, RandomMipSpec};
    use crate::model::Sense;
    use crate::solver::{solve, ClockMode};

    fn det() -> SolverConfig {
        SolverConfig {
            clock: ClockMode::Deterministic {
                work_per_second: 1000.0,
            },
            ..Default::default()
        }
    }

    fn brute_binary(inst: &MipInstance) -> f64 {
        let n = inst.num_vars();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << n) {
            let x: Vec<f64> = (0..n).map(|j| ((mask >> j) & 1) as f64).collect();
            if inst.rows.iter().all(|r| r.violation(&x) <= 1e-9) {
                best = best.min(crate::model::objective_value(inst, &x).unwrap());
            }
        }
        best
    }

    #[test]
    fn integral_root_is_one_node() {
        let inst = MipInstance::new(
            "r",
            vec!["x".into()],
            vec![1.0],
            vec![0.0],
            vec![10.0],
            vec![true],
            vec![Row::new("c", vec![(0, 1.0)], Sense::Ge, 2.0)],
        )
        .unwrap();
        let out = solve(&inst, &det(), 100.0, &HintSet::default(), None);
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.stats.nodes, 1);
        assert_eq!(out.primal_bound, 2.0);
        assert_eq!(out.dual_bound, 2.0);
    }

    #[test]
    fn knapsack_matches_enumeration() {
        for seed in 0..5 {
            let inst = random_knapsack(10, seed);
            let out = solve(&inst, &det(), 1e6, &HintSet::default(), None);
            assert_eq!(out.status, SolveStatus::Optimal);
            assert!(
                (out.primal_bound - brute_binary(&inst)).abs() < 1e-6,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn zero_budget_hits_time_limit() {
        let inst = random_knapsack(10, 1);
        let out = solve(&inst, &det(), 0.0, &HintSet::default(), None);
        assert_eq!(out.status, SolveStatus::TimeLimit);
        assert_eq!(out.dual_bound, f64::NEG_INFINITY);
        assert_eq!(out.primal_bound, f64::INFINITY);
    }

    #[test]
    fn pseudocost_rule_never_strong_branches() {
        let inst = multi_knapsack(20, 3, 3);
        let cfg = SolverConfig {
            branching_rule: BranchingRule::Pseudocost,
            ..det()
        };
        let out = solve(&inst, &cfg, 1e6, &HintSet::default(), None);
        assert_eq!(out.stats.sb_lp_solves, 0);
        assert!(out.stats.nodes > 1);
    }

    #[test]
    fn bounds_are_monotone_and_ordered() {
        let inst = random_mip(RandomMipSpec::default(), 11);
        let out = solve(&inst, &det(), 1e6, &HintSet::default(), None);
        let mut prev: Option<BoundSample> = None;
        for b in &out.stats.bound_trace {
            assert!(b.dual <= b.primal + 1e-6);
            if let Some(p) = prev {
                assert!(b.dual >= p.dual);
                assert!(b.primal <= p.primal);
            }
            prev = Some(*b);
        }
    }

    #[test]
    fn infeasible_instance() {
        let inst = MipInstance::new(
            "inf",
            vec!["x".into(), "y".into()],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![true, true],
            vec![Row::new("c", vec![(0, 2.0), (1, 2.0)], Sense::Eq, 1.0)],
        )
        .unwrap();
        let out = solve(&inst, &det(), 1e6, &HintSet::default(), None);
        assert_eq!(out.status, SolveStatus::Infeasible);
        assert!(out.best_solution.is_none());
    }
}
