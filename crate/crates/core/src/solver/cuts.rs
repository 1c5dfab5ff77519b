// SPDX-License-Identifier: Apache-2.0

//! Gomory mixed-integer cuts read off the optimal simplex tableau.

use super::{Separator, SolverConfig};
use crate::lp::{LpProblem, LpResult};
use crate::model::{Row, Sense};

/// Basic values closer than this to an integer do not yield a cut.
const MIN_FRAC: f64 = 1e-3;
const MIN_VIOLATION: f64 = 1e-6;
const TINY_COEF: f64 = 1e-9;
const MAX_DYNAMISM: f64 = 1e8;

/// Cuts for the node relaxation `problem` whose optimal solve is `lp`.
///
/// One cut per fractional basic integer variable, most fractional first, up
/// to `cfg.max_cuts_per_round`. Nothing is returned when the separator or
/// the toggle for this node kind (root or tree) is off. Every returned cut
/// is valid for all integer points within the bounds of `problem` and is
/// violated by the LP point by more than `1e-6`.
pub fn generate_cuts(
    problem: &LpProblem,
    lp: &LpResult,
    at_root: bool,
    cfg: &SolverConfig,
) -> Vec<Row> {
    let toggle = if at_root {
        cfg.use_cuts_root
    } else {
        cfg.use_cuts_tree
    };
    if !toggle || !cfg.enabled_separators.contains(&Separator::Gomory) {
        return Vec::new();
    }
    let Some(tab) = lp.tableau.as_deref() else {
        return Vec::new();
    };
    let inst = problem.inst;
    let n = tab.n;

    let mut sources: Vec<(f64, usize, usize)> = (0..tab.m)
        .filter_map(|i| {
            let c = tab.basic[i];
            if c >= n || !inst.is_integer(c) {
                return None;
            }
            let beta = tab.value[c];
            let f0 = beta - beta.floor();
            (f0 >= MIN_FRAC && f0 <= 1.0 - MIN_FRAC).then_some(((f0 - 0.5).abs(), c, i))
        })
        .collect();
    sources.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut cuts = Vec::new();
    for &(_, var, i) in &sources {
        if cuts.len() >= cfg.max_cuts_per_round {
            break;
        }
        if let Some(cut) = gmi_row(problem, lp, tab, i) {
            cuts.push(Row::new(format!("gmi_x{var}"), cut.0, Sense::Ge, cut.1));
        }
    }
    cuts
}

fn gmi_row(
    problem: &LpProblem,
    lp: &LpResult,
    tab: &crate::lp::Tableau,
    i: usize,
) -> Option<(Vec<(usize, f64)>, f64)> {
    let inst = problem.inst;
    let n = tab.n;
    let beta = tab.value[tab.basic[i]];
    let f0 = beta - beta.floor();
    let mut pi = vec![0.0; n];
    let mut rhs = 1.0;
    for j in 0..tab.num_cols() {
        if tab.is_basic(j) {
            continue;
        }
        let a = tab.entry(i, j);
        if a == 0.0 {
            continue;
        }
        let v = tab.value[j];
        let at_lower = v == tab.lo[j];
        if !at_lower && v != tab.hi[j] {
            // free nonbasic column: no bound to measure the slack from
            return None;
        }
        // x_basic + Σ a'_j s_j = beta with s_j >= 0 measured from the bound
        let ap = if at_lower { a } else { -a };
        let g = if j < n && inst.is_integer(j) {
            let fj = ap - ap.floor();
            if fj <= f0 {
                fj / f0
            } else {
                (1.0 - fj) / (1.0 - f0)
            }
        } else if ap >= 0.0 {
            ap / f0
        } else {
            -ap / (1.0 - f0)
        };
        if g == 0.0 {
            continue;
        }
        // g s_j in terms of the column value z_j
        let coef = if at_lower {
            rhs += g * tab.lo[j];
            g
        } else {
            rhs -= g * tab.hi[j];
            -g
        };
        if j < n {
            pi[j] += coef;
        } else {
            for &(l, al) in &tab.rows[j - n].coefs {
                pi[l] += coef * al;
            }
        }
    }

    for l in 0..n {
        let p = pi[l];
        if p != 0.0 && p.abs() < TINY_COEF {
            // move the term to the right-hand side using its bound
            let bound = if p > 0.0 {
                problem.upper[l]
            } else {
                problem.lower[l]
            };
            if !bound.is_finite() {
                return None;
            }
            rhs -= p * bound;
            pi[l] = 0.0;
        }
    }
    let (mut max_abs, mut min_abs) = (0.0f64, f64::INFINITY);
    for &p in &pi {
        if p != 0.0 {
            max_abs = max_abs.max(p.abs());
            min_abs = min_abs.min(p.abs());
        }
    }
    if max_abs == 0.0 || !rhs.is_finite() || max_abs / min_abs > MAX_DYNAMISM {
        return None;
    }
    let scale = 1.0 / max_abs;
    let coefs: Vec<(usize, f64)> = pi
        .iter()
        .enumerate()
        .filter(|(_, &p)| p != 0.0)
        .map(|(l, &p)| (l, p * scale))
        .collect();
    let rhs = rhs * scale;
    let act: f64 = coefs.iter().map(|&(l, p)| p * lp.primal[l]).sum();
    (rhs - act > MIN_VIOLATION).then_some((coefs, rhs))
}
