// SPDX-License-Identifier: Apache-2.0

//! Dense bounded-variable primal simplex.
//!
//! Every row `a_i·x ∘ b_i` gets an activity column `r_i` with `A x - r = 0`
//! and bounds on `r_i` taken from the row sense, so all constraints become
//! column bounds. Phase 1 minimizes the sum of bound violations of the basic
//! columns starting from whatever basis is supplied, which lets a parent
//! basis seed a child solve after bound changes or appended cut rows.

use crate::model::{MipInstance, Row};

const PIVOT_TOL: f64 = 1e-9;
const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const REFACTOR_EVERY: u64 = 100;

/// Relaxation of an instance at a node: model rows plus cut rows, with
/// node-local variable bounds.
#[derive(Debug, Clone, Copy)]
pub struct LpProblem<'a> {
    pub inst: &'a MipInstance,
    pub extra_rows: &'a [Row],
    pub lower: &'a [f64],
    pub upper: &'a [f64],
}

impl<'a> LpProblem<'a> {
    pub fn new(
        inst: &'a MipInstance,
        extra_rows: &'a [Row],
        lower: &'a [f64],
        upper: &'a [f64],
    ) -> Self {
        debug_assert_eq!(lower.len(), inst.num_vars());
        debug_assert_eq!(upper.len(), inst.num_vars());
        LpProblem {
            inst,
            extra_rows,
            lower,
            upper,
        }
    }

    /// Relaxation with the instance's own bounds and no cuts.
    pub fn root(inst: &'a MipInstance) -> Self {
        LpProblem::new(inst, &[], &inst.lower, &inst.upper)
    }

    pub fn num_vars(&self) -> usize {
        self.inst.num_vars()
    }

    pub fn num_rows(&self) -> usize {
        self.inst.num_rows() + self.extra_rows.len()
    }

    pub fn row(&self, i: usize) -> &Row {
        let m0 = self.inst.num_rows();
        if i < m0 {
            &self.inst.rows[i]
        } else {
            &self.extra_rows[i - m0]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

/// Warm-start token: which columns are basic and which nonbasic columns sit
/// at their upper bound. Columns `0..n` are variables, `n..n+m` row
/// activities.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    num_vars: usize,
    basic: Vec<usize>,
    at_upper: Vec<bool>,
}

impl Basis {
    pub fn num_rows(&self) -> usize {
        self.basic.len()
    }
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub objective: f64,
    pub basis: Option<Basis>,
    pub iterations: u64,
    pub(crate) tableau: Option<Box<Tableau>>,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    pub iter_limit: u64,
    /// Switch to Bland's rule after this many consecutive degenerate pivots.
    pub bland_after: u32,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            iter_limit: 50_000,
            bland_after: 50,
        }
    }
}

pub fn solve_lp(p: &LpProblem, warm: Option<&Basis>, iter_limit: u64) -> LpResult {
    solve_lp_with(
        p,
        warm,
        LpOptions {
            iter_limit,
            ..LpOptions::default()
        },
    )
}

pub fn solve_lp_with(p: &LpProblem, warm: Option<&Basis>, opts: LpOptions) -> LpResult {
    let mut tab = match warm.and_then(|b| Tableau::warm(p, b)) {
        Some(t) => t,
        None => Tableau::cold(p),
    };
    let (status, iterations) = tab.run(opts);
    let n = p.num_vars();
    if status == LpStatus::Optimal {
        tab.compute_basic_values();
        let mut primal = tab.value[..n].to_vec();
        for (j, x) in primal.iter_mut().enumerate() {
            // snap basic values sitting within tolerance of a bound
            if (*x - p.lower[j]).abs() <= PRIMAL_TOL {
                *x = p.lower[j];
            } else if (*x - p.upper[j]).abs() <= PRIMAL_TOL {
                *x = p.upper[j];
            }
        }
        let objective = p
            .inst
            .objective
            .iter()
            .zip(&primal)
            .map(|(c, x)| c * x)
            .sum();
        let basis = tab.basis();
        LpResult {
            status,
            primal,
            objective,
            basis: Some(basis),
            iterations,
            tableau: Some(Box::new(tab)),
        }
    } else {
        let basis = (status == LpStatus::IterLimit).then(|| tab.basis());
        LpResult {
            status,
            primal: tab.value[..n].to_vec(),
            objective: match status {
                LpStatus::Infeasible => f64::INFINITY,
                LpStatus::Unbounded => f64::NEG_INFINITY,
                _ => f64::NAN,
            },
            basis,
            iterations,
            tableau: None,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Tableau {
    pub(crate) n: usize,
    pub(crate) m: usize,
    ncols: usize,
    /// Original constraint matrix `[A | -I]`, row-major.
    orig: Vec<f64>,
    /// `B^-1 [A | -I]`, row-major.
    t: Vec<f64>,
    pub(crate) basic: Vec<usize>,
    pos: Vec<Option<usize>>,
    pub(crate) value: Vec<f64>,
    pub(crate) lo: Vec<f64>,
    pub(crate) hi: Vec<f64>,
    cost: Vec<f64>,
    /// Row index (into the problem rows) backing each activity column.
    pub(crate) rows: Vec<Row>,
}

impl Tableau {
    fn skeleton(p: &LpProblem) -> Self {
        let n = p.num_vars();
        let m = p.num_rows();
        let ncols = n + m;
        let mut orig = vec![0.0; m * ncols];
        let mut lo = Vec::with_capacity(ncols);
        let mut hi = Vec::with_capacity(ncols);
        lo.extend_from_slice(p.lower);
        hi.extend_from_slice(p.upper);
        let mut rows = Vec::with_capacity(m);
        for i in 0..m {
            let row = p.row(i);
            for &(j, a) in &row.coefs {
                orig[i * ncols + j] += a;
            }
            orig[i * ncols + n + i] = -1.0;
            let (l, u) = row.activity_bounds();
            lo.push(l);
            hi.push(u);
            rows.push(row.clone());
        }
        let mut cost = vec![0.0; ncols];
        cost[..n].copy_from_slice(&p.inst.objective);
        Tableau {
            n,
            m,
            ncols,
            t: orig.clone(),
            orig,
            basic: Vec::new(),
            pos: vec![None; ncols],
            value: vec![0.0; ncols],
            lo,
            hi,
            cost,
            rows,
        }
    }

    fn cold(p: &LpProblem) -> Self {
        let mut tab = Tableau::skeleton(p);
        let basic: Vec<usize> = (tab.n..tab.ncols).collect();
        let at_upper = vec![false; tab.ncols];
        tab.install(&basic, &at_upper);
        assert!(tab.refactor(), "slack basis is always nonsingular");
        tab
    }

    fn warm(p: &LpProblem, b: &Basis) -> Option<Self> {
        let mut tab = Tableau::skeleton(p);
        if b.num_vars != tab.n || b.basic.len() > tab.m {
            return None;
        }
        let old_m = b.basic.len();
        let mut basic = b.basic.clone();
        basic.extend((old_m..tab.m).map(|i| tab.n + i));
        let mut at_upper = b.at_upper.clone();
        at_upper.resize(tab.ncols, false);
        tab.install(&basic, &at_upper);
        tab.refactor().then_some(tab)
    }

    fn install(&mut self, basic: &[usize], at_upper: &[bool]) {
        self.basic = basic.to_vec();
        self.pos = vec![None; self.ncols];
        for (i, &c) in basic.iter().enumerate() {
            self.pos[c] = Some(i);
        }
        for j in 0..self.ncols {
            self.value[j] = if at_upper[j] && self.hi[j].is_finite() {
                self.hi[j]
            } else if self.lo[j].is_finite() {
                self.lo[j]
            } else if self.hi[j].is_finite() {
                self.hi[j]
            } else {
                0.0
            };
        }
    }

    /// Recomputes `B^-1 [A | -I]` from the original matrix for the current
    /// basic set, reassigning rows by partial pivoting. Returns false when
    /// the basis is singular.
    fn refactor(&mut self) -> bool {
        let (m, nc) = (self.m, self.ncols);
        let mut t = self.orig.clone();
        let mut row_of = vec![usize::MAX; m];
        let mut assigned = vec![false; m];
        for &col in &self.basic {
            let mut best = None;
            let mut best_abs = PIVOT_TOL;
            for r in 0..m {
                if !assigned[r] && t[r * nc + col].abs() > best_abs {
                    best_abs = t[r * nc + col].abs();
                    best = Some(r);
                }
            }
            let Some(r) = best else { return false };
            assigned[r] = true;
            row_of[r] = col;
            pivot_rows(&mut t, m, nc, r, col);
        }
        self.t = t;
        self.basic = row_of;
        self.pos = vec![None; nc];
        for (i, &c) in self.basic.iter().enumerate() {
            self.pos[c] = Some(i);
        }
        true
    }

    fn basis(&self) -> Basis {
        Basis {
            num_vars: self.n,
            basic: self.basic.clone(),
            at_upper: (0..self.ncols)
                .map(|j| {
                    self.pos[j].is_none()
                        && self.hi[j].is_finite()
                        && self.value[j] == self.hi[j]
                        && self.lo[j] != self.hi[j]
                })
                .collect(),
        }
    }

    #[inline]
    pub(crate) fn entry(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.ncols + j]
    }

    pub(crate) fn is_basic(&self, j: usize) -> bool {
        self.pos[j].is_some()
    }

    pub(crate) fn num_cols(&self) -> usize {
        self.ncols
    }

    pub(crate) fn compute_basic_values(&mut self) {
        let nc = self.ncols;
        for i in 0..self.m {
            let row = &self.t[i * nc..(i + 1) * nc];
            let mut s = 0.0;
            for j in 0..nc {
                if self.pos[j].is_none() && row[j] != 0.0 {
                    s -= row[j] * self.value[j];
                }
            }
            self.value[self.basic[i]] = s;
        }
    }

    fn run(&mut self, opts: LpOptions) -> (LpStatus, u64) {
        let nc = self.ncols;
        let mut iterations = 0u64;
        let mut since_refactor = 0u64;
        let mut degenerate_streak = 0u32;
        let mut bland = false;
        let mut cb = vec![0.0; self.m];
        let mut state = vec![0i8; self.m];
        loop {
            self.compute_basic_values();
            let mut phase1 = false;
            for i in 0..self.m {
                let c = self.basic[i];
                let z = self.value[c];
                state[i] = if z < self.lo[c] - PRIMAL_TOL {
                    -1
                } else if z > self.hi[c] + PRIMAL_TOL {
                    1
                } else {
                    0
                };
                phase1 |= state[i] != 0;
            }
            for i in 0..self.m {
                cb[i] = if phase1 {
                    state[i] as f64
                } else {
                    self.cost[self.basic[i]]
                };
            }

            // pricing
            let mut entering: Option<(usize, f64, f64)> = None;
            for j in 0..nc {
                if self.pos[j].is_some() || self.hi[j] - self.lo[j] <= 0.0 {
                    continue;
                }
                let mut d = if phase1 { 0.0 } else { self.cost[j] };
                for i in 0..self.m {
                    if cb[i] != 0.0 {
                        d -= cb[i] * self.t[i * nc + j];
                    }
                }
                let dir = if d < -DUAL_TOL && self.value[j] < self.hi[j] {
                    1.0
                } else if d > DUAL_TOL && self.value[j] > self.lo[j] {
                    -1.0
                } else {
                    continue;
                };
                if bland {
                    entering = Some((j, dir, d.abs()));
                    break;
                }
                if entering.map_or(true, |(_, _, best)| d.abs() > best) {
                    entering = Some((j, dir, d.abs()));
                }
            }
            let Some((q, dir, _)) = entering else {
                return if phase1 {
                    (LpStatus::Infeasible, iterations)
                } else {
                    (LpStatus::Optimal, iterations)
                };
            };
            if iterations >= opts.iter_limit {
                return (LpStatus::IterLimit, iterations);
            }

            // ratio test
            let own_range = if dir > 0.0 {
                self.hi[q] - self.value[q]
            } else {
                self.value[q] - self.lo[q]
            };
            let mut t_min = f64::INFINITY;
            let mut limits: Vec<(usize, f64, f64, f64)> = Vec::new();
            for i in 0..self.m {
                let alpha = -self.t[i * nc + q] * dir;
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let c = self.basic[i];
                let z = self.value[c];
                let target = match (state[i], alpha > 0.0) {
                    (0, true) => self.hi[c].max(z),
                    (0, false) => self.lo[c].min(z),
                    (-1, true) => self.lo[c],
                    (1, false) => self.hi[c],
                    _ => continue,
                };
                if !target.is_finite() {
                    continue;
                }
                let ratio = ((target - z) / alpha).max(0.0);
                t_min = t_min.min(ratio);
                limits.push((i, ratio, alpha, target));
            }
            let flip = own_range.is_finite() && own_range <= t_min;
            if !flip && !t_min.is_finite() {
                return if phase1 {
                    // cannot happen for a bounded-below phase-1 objective
                    (LpStatus::Infeasible, iterations)
                } else {
                    (LpStatus::Unbounded, iterations)
                };
            }
            iterations += 1;
            let step = if flip { own_range } else { t_min };
            if step <= DEGENERATE_STEP {
                degenerate_streak += 1;
                if degenerate_streak >= opts.bland_after {
                    bland = true;
                }
            } else {
                degenerate_streak = 0;
            }
            if flip {
                self.value[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                continue;
            }
            let tie = t_min + 1e-12 * (1.0 + t_min);
            let mut leave: Option<(usize, f64, f64)> = None;
            for &(i, ratio, alpha, target) in &limits {
                if ratio > tie {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((li, la, _)) => {
                        if bland {
                            self.basic[i] < self.basic[li]
                        } else {
                            alpha.abs() > la.abs()
                        }
                    }
                };
                if better {
                    leave = Some((i, alpha, target));
                }
            }
            let (p, _, target) = leave.expect("finite ratio has a row");
            let leaving = self.basic[p];
            self.value[q] += dir * step;
            self.value[leaving] = target;
            pivot_rows(&mut self.t, self.m, nc, p, q);
            self.pos[leaving] = None;
            self.pos[q] = Some(p);
            self.basic[p] = q;
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                since_refactor = 0;
                if !self.refactor() {
                    // keep the updated tableau if refactoring hits a
                    // numerically singular basis
                    self.pos = vec![None; nc];
                    for (i, &c) in self.basic.iter().enumerate() {
                        self.pos[c] = Some(i);
                    }
                }
            }
        }
    }
}

fn pivot_rows(t: &mut [f64], m: usize, nc: usize, p: usize, q: usize) {
    let piv = t[p * nc + q];
    for v in &mut t[p * nc..(p + 1) * nc] {
        *v /= piv;
    }
    t[p * nc + q] = 1.0;
    let (before, rest) = t.split_at_mut(p * nc);
    let (prow, after) = rest.split_at_mut(nc);
    let eliminate = |row: &mut [f64]| {
        let f = row[q];
        if f != 0.0 {
            for (v, pv) in row.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            row[q] = 0.0;
        }
    };
    for row in before.chunks_mut(nc) {
        eliminate(row);
    }
    for row in after.chunks_mut(nc) {
        eliminate(row);
    }
    let _ = m;
}
