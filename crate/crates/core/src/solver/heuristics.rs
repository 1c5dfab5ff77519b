// SPDX-License-Identifier: Apache-2.0

use super::{tree, Clock, SolverConfig};
use crate::lp::{solve_lp, Basis, LpProblem};
use crate::model::{check_feasibility, MipInstance, Solution, SolutionStatus, Tolerances};
use crate::reopt::Hint;

/// Rounds every integer variable of an LP point to the nearest integer,
/// clamps into the instance bounds, and keeps the point if it is feasible.
pub fn rounding_heuristic(inst: &MipInstance, point: &[f64], tol: Tolerances) -> Option<Solution> {
    let mut x = point.to_vec();
    for j in inst.integer_indices() {
        x[j] = x[j].round().clamp(inst.lower[j], inst.upper[j]);
    }
    match check_feasibility(inst, &x, tol) {
        Ok(f) if f.is_feasible() => Solution::evaluate(inst, x, tol).ok(),
        _ => None,
    }
}

/// Feasible solutions derived from one hint, plus the LP work spent.
#[derive(Debug, Clone, Default)]
pub struct HintCompletion {
    pub solutions: Vec<Solution>,
    pub lp_solves: u64,
}

/// Tries to extend a partial assignment of integer variables to a feasible
/// solution.
///
/// Hinted values are fixed as given. A value outside the current bounds
/// ends the attempt with nothing; hints are never repaired. When every
/// integer variable is fixed a single LP decides; otherwise a sub-MIP over
/// the free variables runs for at most `completesol_node_limit` nodes and
/// stops after `completesol_max_improving` improving solutions, if set.
pub fn complete_hint(
    inst: &MipInstance,
    hint: &Hint,
    cfg: &SolverConfig,
    clock: &mut Clock,
    deadline: f64,
    warm: Option<&Basis>,
) -> HintCompletion {
    let tol = cfg.tolerances;
    let mut lower = inst.lower.clone();
    let mut upper = inst.upper.clone();
    for (name, &value) in &hint.assignment {
        let Some(j) = inst.var_index(name) else {
            return HintCompletion::default();
        };
        if !inst.is_integer(j) {
            continue;
        }
        let v = value.round();
        if v < lower[j] - tol.int || v > upper[j] + tol.int {
            return HintCompletion::default();
        }
        lower[j] = v;
        upper[j] = v;
    }
    let all_fixed = inst.integer_indices().all(|j| lower[j] == upper[j]);
    if all_fixed {
        let p = LpProblem::new(inst, &[], &lower, &upper);
        let res = solve_lp(&p, warm, cfg.lp_iter_limit);
        clock.charge(1 + res.iterations);
        let mut out = HintCompletion {
            solutions: Vec::new(),
            lp_solves: 1,
        };
        if res.is_optimal() {
            let mut x = res.primal;
            for j in inst.integer_indices() {
                x[j] = lower[j];
            }
            if let Ok(sol) = Solution::evaluate(inst, x, tol) {
                if sol.status == SolutionStatus::Feasible {
                    out.solutions.push(sol);
                }
            }
        }
        return out;
    }
    if cfg.completesol_node_limit == 0 {
        return HintCompletion::default();
    }
    let sub = match inst.with_data(
        inst.name.clone(),
        inst.objective.clone(),
        lower,
        upper,
        inst.rows.clone(),
    ) {
        Ok(s) => s,
        Err(_) => return HintCompletion::default(),
    };
    let found = tree::sub_mip(&sub, cfg, clock, deadline);
    let mut solutions: Vec<Solution> = found
        .into_iter()
        .filter_map(|x| Solution::evaluate(inst, x, tol).ok())
        .filter(Solution::is_feasible)
        .collect();
    if let Some(k) = cfg.completesol_max_improving {
        solutions.truncate(k as usize);
    }
    HintCompletion {
        solutions,
        lp_solves: 0,
    }
}
