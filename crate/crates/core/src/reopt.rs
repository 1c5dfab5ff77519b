// SPDX-License-Identifier: Apache-2.0

//! Reuse of information across the instances of a series: solution hints,
//! transferred branching histories and the branching-rule policy.

use crate::model::{Component, MipInstance, ModelError, Solution};
use crate::solver::{BranchingRule, SolveOutcome, SolverConfig, WarmHistories};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Share of pooled solutions (in percent) a value must appear in to enter
/// the common hint.
pub const DEFAULT_ALPHA: f64 = 90.0;
/// Pseudocost counts are capped at this value when handed to the next
/// instance.
pub const HISTORY_COUNT_CAP: f64 = 4.0;
const MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HintSource {
    Common,
    /// Clipped best solution of the instance with this index.
    ClippedPrev(usize),
}

/// Partial assignment of integer variables, by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hint {
    pub assignment: BTreeMap<String, f64>,
    pub source: HintSource,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HintSet {
    pub hints: Vec<Hint>,
}

impl HintSet {
    pub fn len(&self) -> usize {
        self.hints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hints.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub objective: f64,
    /// Full solution keyed by variable name.
    pub values: BTreeMap<String, f64>,
    /// Names of the integer variables of the instance that produced it.
    pub integer: BTreeSet<String>,
}

impl PoolEntry {
    pub fn new(inst: &MipInstance, sol: &Solution) -> Self {
        PoolEntry {
            objective: sol.objective,
            values: inst
                .var_names
                .iter()
                .cloned()
                .zip(sol.values.iter().copied())
                .collect(),
            integer: inst
                .integer_indices()
                .map(|j| inst.var_names[j].clone())
                .collect(),
        }
    }
}

/// Best solution found per instance index.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolutionPool {
    pub entries: BTreeMap<usize, PoolEntry>,
}

impl SolutionPool {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, index: usize, inst: &MipInstance, sol: &Solution) {
        self.entries.insert(index, PoolEntry::new(inst, sol));
    }
}

fn mismatch(target: &MipInstance, detail: String) -> ModelError {
    ModelError::VariableSetMismatch {
        first: "pool".into(),
        other: target.name.clone(),
        detail,
    }
}

fn clip_value(target: &MipInstance, j: usize, v: f64) -> f64 {
    v.clamp(target.lower[j], target.upper[j]).round()
}

/// Drops continuous variables and clamps every integer value into the
/// target's bounds.
pub fn clip_and_strip(
    entry: &PoolEntry,
    target: &MipInstance,
) -> Result<BTreeMap<String, f64>, ModelError> {
    let mut out = BTreeMap::new();
    for (name, &v) in &entry.values {
        let j = target
            .var_index(name)
            .ok_or_else(|| mismatch(target, format!("variable `{name}` missing")))?;
        if target.is_integer(j) {
            out.insert(name.clone(), clip_value(target, j, v));
        }
    }
    Ok(out)
}

/// Integer pairs of the first pooled solution that also appear in at least
/// `alpha_pct` percent of all pooled solutions, clipped to `target`.
///
/// Membership is decided on the unclipped values.
pub fn build_common_hint(
    pool: &SolutionPool,
    target: &MipInstance,
    alpha_pct: f64,
) -> Result<BTreeMap<String, f64>, ModelError> {
    let Some((_, first)) = pool.entries.iter().next() else {
        return Ok(BTreeMap::new());
    };
    let total = pool.len() as f64;
    let mut out = BTreeMap::new();
    for (name, &v) in &first.values {
        if !first.integer.contains(name) {
            continue;
        }
        let j = target
            .var_index(name)
            .ok_or_else(|| mismatch(target, format!("variable `{name}` missing")))?;
        if !target.is_integer(j) {
            continue;
        }
        let hits = pool
            .entries
            .values()
            .filter(|e| {
                e.values
                    .get(name)
                    .is_some_and(|&w| (w - v).abs() <= MATCH_TOL)
            })
            .count() as f64;
        if hits * 100.0 >= alpha_pct * total {
            out.insert(name.clone(), clip_value(target, j, v));
        }
    }
    Ok(out)
}

/// Number of previous solutions offered besides the common hint.
pub fn previous_hint_count(objective_only: bool) -> usize {
    if objective_only {
        4
    } else {
        9
    }
}

/// Hints for instance `index`: the common hint (when non-empty) followed by
/// the clipped solutions of the most recent earlier instances, newest first.
pub fn assemble_hints(
    pool: &SolutionPool,
    target: &MipInstance,
    index: usize,
    objective_only: bool,
    alpha_pct: f64,
) -> Result<HintSet, ModelError> {
    let mut set = HintSet::default();
    if index == 0 {
        return Ok(set);
    }
    let common = build_common_hint(pool, target, alpha_pct)?;
    if !common.is_empty() {
        set.hints.push(Hint {
            assignment: common,
            source: HintSource::Common,
        });
    }
    for (&k, entry) in pool
        .entries
        .range(..index)
        .rev()
        .take(previous_hint_count(objective_only))
    {
        set.hints.push(Hint {
            assignment: clip_and_strip(entry, target)?,
            source: HintSource::ClippedPrev(k),
        });
    }
    Ok(set)
}

/// Copies the histories of the previous solve for `target`, capping every
/// pseudocost count at 4 while keeping the per-unit averages.
pub fn transfer_histories(
    prev: &WarmHistories,
    target: &MipInstance,
) -> Result<WarmHistories, ModelError> {
    let mut variables = BTreeMap::new();
    for name in &target.var_names {
        let h = prev
            .variables
            .get(name)
            .ok_or_else(|| mismatch(target, format!("no history for variable `{name}`")))?;
        variables.insert(name.clone(), h.capped(HISTORY_COUNT_CAP));
    }
    if let Some(extra) = prev
        .variables
        .keys()
        .find(|k| target.var_index(k).is_none())
    {
        return Err(mismatch(
            target,
            format!("history for unknown variable `{extra}`"),
        ));
    }
    Ok(WarmHistories {
        variables,
        global: prev.global.capped(HISTORY_COUNT_CAP),
    })
}

/// Full strong branching on the first instance; afterwards pseudocost
/// branching when neither the objective nor the bounds change, otherwise
/// reliability branching.
pub fn branching_policy(index: usize, changing: &BTreeSet<Component>) -> BranchingRule {
    if index == 0 {
        BranchingRule::FullStrong
    } else if changing.contains(&Component::Objective) || changing.contains(&Component::Bounds) {
        BranchingRule::Reliability
    } else {
        BranchingRule::Pseudocost
    }
}

/// Hint-completion effort: raised unless only the objective changes, since
/// then every earlier solution stays feasible.
pub fn apply_completesol_settings(cfg: &mut SolverConfig, objective_only: bool) {
    if !objective_only {
        cfg.completesol_node_limit = 5000;
        cfg.completesol_max_improving = None;
    }
}

/// Histories of the most recent solve, the source for the next transfer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HistoryStore {
    pub latest: Option<(usize, WarmHistories)>,
}

/// Stores the outcome's best solution in the pool and its histories in the
/// store. Calling twice for the same index overwrites.
pub fn record_outcome(
    pool: &mut SolutionPool,
    store: &mut HistoryStore,
    inst: &MipInstance,
    outcome: &SolveOutcome,
    index: usize,
) {
    if let Some(sol) = outcome.best_solution.as_ref().filter(|s| s.is_feasible()) {
        pool.insert(index, inst, sol);
    }
    store.latest = Some((index, outcome.warm_histories()));
}
