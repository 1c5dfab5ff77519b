// SPDX-License-Identifier: Apache-2.0

//! Bound propagation and coefficient tightening applied before the search.

use super::{Clock, Presolver, PresolverStats, SolverConfig};
use crate::model::{MipInstance, Row, Sense};
use std::collections::BTreeMap;

const MAX_SWEEPS: usize = 10;
const EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PresolveResult {
    /// Tightened copy of the input; `None` when presolve proved infeasibility.
    pub instance: Option<MipInstance>,
    pub stats: BTreeMap<Presolver, PresolverStats>,
}

impl PresolveResult {
    pub fn changes(&self, p: Presolver) -> u64 {
        self.stats.get(&p).map_or(0, |s| s.changes)
    }

    pub fn is_infeasible(&self) -> bool {
        self.instance.is_none()
    }
}

/// Runs the enabled presolvers. Every enabled rule gets a stats entry, even
/// when it changes nothing; disabled rules do no work.
pub fn run_presolve(inst: &MipInstance, cfg: &SolverConfig, clock: &Clock) -> PresolveResult {
    let mut stats = BTreeMap::new();
    let mut lower = inst.lower.clone();
    let mut upper = inst.upper.clone();
    let mut rows = inst.rows.clone();
    let int_tol = cfg.tolerances.int;

    if cfg.enabled_presolvers.contains(&Presolver::BoundTighten) {
        let t0 = clock.elapsed();
        let changes = tighten_bounds(inst, &rows, &mut lower, &mut upper, int_tol);
        let time = clock.elapsed() - t0;
        match changes {
            Some(changes) => {
                stats.insert(Presolver::BoundTighten, PresolverStats { changes, time });
            }
            None => {
                stats.insert(Presolver::BoundTighten, PresolverStats { changes: 0, time });
                return PresolveResult {
                    instance: None,
                    stats,
                };
            }
        }
    }
    if cfg.enabled_presolvers.contains(&Presolver::CoefTighten) {
        let t0 = clock.elapsed();
        let changes = tighten_coefficients(inst, &mut rows, &lower, &upper);
        stats.insert(
            Presolver::CoefTighten,
            PresolverStats {
                changes,
                time: clock.elapsed() - t0,
            },
        );
    }
    let instance = inst
        .with_data(
            inst.name.clone(),
            inst.objective.clone(),
            lower,
            upper,
            rows,
        )
        .ok();
    PresolveResult { instance, stats }
}

fn min_contrib(a: f64, l: f64, u: f64) -> f64 {
    if a > 0.0 {
        a * l
    } else {
        a * u
    }
}

fn max_contrib(a: f64, l: f64, u: f64) -> f64 {
    if a > 0.0 {
        a * u
    } else {
        a * l
    }
}

/// Single-row bound propagation to a fixpoint (at most `MAX_SWEEPS`
/// passes). Returns the number of bound changes, or `None` on crossed
/// bounds.
fn tighten_bounds(
    inst: &MipInstance,
    rows: &[Row],
    lower: &mut [f64],
    upper: &mut [f64],
    int_tol: f64,
) -> Option<u64> {
    let mut changes = 0;
    for _ in 0..MAX_SWEEPS {
        let mut changed = false;
        for row in rows {
            let (act_lo, act_hi) = row.activity_bounds();
            for (k, &(j, a)) in row.coefs.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let others = row.coefs.iter().enumerate().filter(|&(kk, _)| kk != k);
                let min_rest: f64 = others
                    .clone()
                    .map(|(_, &(l, al))| min_contrib(al, lower[l], upper[l]))
                    .sum();
                let max_rest: f64 = others
                    .map(|(_, &(l, al))| max_contrib(al, lower[l], upper[l]))
                    .sum();
                // a x <= act_hi - min_rest  and  a x >= act_lo - max_rest
                let mut new_lo = f64::NEG_INFINITY;
                let mut new_hi = f64::INFINITY;
                if act_hi.is_finite() && min_rest.is_finite() {
                    let v = (act_hi - min_rest) / a;
                    if a > 0.0 {
                        new_hi = new_hi.min(v);
                    } else {
                        new_lo = new_lo.max(v);
                    }
                }
                if act_lo.is_finite() && max_rest.is_finite() {
                    let v = (act_lo - max_rest) / a;
                    if a > 0.0 {
                        new_lo = new_lo.max(v);
                    } else {
                        new_hi = new_hi.min(v);
                    }
                }
                if inst.is_integer(j) {
                    new_hi = (new_hi + int_tol).floor();
                    new_lo = (new_lo - int_tol).ceil();
                }
                let width = if lower[j].is_finite() && upper[j].is_finite() {
                    upper[j] - lower[j]
                } else {
                    1.0
                };
                let min_step = if inst.is_integer(j) {
                    0.5
                } else {
                    1e-3 * width.max(1.0)
                };
                if new_hi < upper[j] - min_step {
                    upper[j] = new_hi;
                    changes += 1;
                    changed = true;
                }
                if new_lo > lower[j] + min_step {
                    lower[j] = new_lo;
                    changes += 1;
                    changed = true;
                }
                if lower[j] > upper[j] + EPS {
                    return None;
                }
                if lower[j] > upper[j] {
                    upper[j] = lower[j];
                }
            }
        }
        if !changed {
            break;
        }
    }
    Some(changes)
}

/// Coefficient tightening on `<=`/`>=` rows whose variables are all integer,
/// applied to variables with a two-value domain `{l, l + 1}`.
fn tighten_coefficients(inst: &MipInstance, rows: &mut [Row], lower: &[f64], upper: &[f64]) -> u64 {
    let mut changes = 0;
    for row in rows.iter_mut() {
        if row.sense == Sense::Eq || row.coefs.iter().any(|&(j, _)| !inst.is_integer(j)) {
            continue;
        }
        // work on the <= form
        let sign = if row.sense == Sense::Ge { -1.0 } else { 1.0 };
        let mut b = sign * row.rhs;
        let mut coefs: Vec<(usize, f64)> = row.coefs.iter().map(|&(j, a)| (j, sign * a)).collect();
        let mut touched = false;
        for k in 0..coefs.len() {
            let (j, a) = coefs[k];
            if a == 0.0 || upper[j] - lower[j] != 1.0 {
                continue;
            }
            let max_act: f64 = coefs
                .iter()
                .map(|&(l, al)| max_contrib(al, lower[l], upper[l]))
                .sum();
            if !max_act.is_finite() || max_act <= b + EPS {
                continue;
            }
            if a > 0.0 && max_act - a < b - EPS {
                let d = b - (max_act - a);
                coefs[k].1 = a - d;
                b -= d * upper[j];
                changes += 1;
                touched = true;
            } else if a < 0.0 && max_act + a < b - EPS {
                let d = b - (max_act + a);
                coefs[k].1 = a + d;
                b += d * lower[j];
                changes += 1;
                touched = true;
            }
        }
        if touched {
            row.coefs = coefs.into_iter().map(|(j, a)| (j, sign * a)).collect();
            row.rhs = sign * b;
        }
    }
    changes
}
