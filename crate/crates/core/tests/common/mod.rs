// SPDX-License-Identifier: Apache-2.0

//! Independent reference solvers used as test oracles: vertex enumeration
//! for bounded LPs and exhaustive enumeration for small MIPs.

#![allow(dead_code)]

use mipreopt::model::{MipInstance, Sense};

/// Half-space or hyperplane `a·x (sense) b`.
struct Constraint {
    a: Vec<f64>,
    sense: Sense,
    b: f64,
}

fn satisfied(c: &Constraint, x: &[f64], tol: f64) -> bool {
    let act: f64 = c.a.iter().zip(x).map(|(a, v)| a * v).sum();
    match c.sense {
        Sense::Le => act <= c.b + tol,
        Sense::Ge => act >= c.b - tol,
        Sense::Eq => (act - c.b).abs() <= tol,
    }
}

/// Solves the square system by Gaussian elimination with partial pivoting.
fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let k = rhs.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for c in col..k {
                        m[r][c] -= f * m[col][c];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..k).map(|i| rhs[i] / m[i][i]).collect())
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Minimum of `c·x` over the polytope by trying every basic solution.
/// The polytope must be bounded. `None` means infeasible.
fn vertex_min(c: &[f64], cons: &[Constraint]) -> Option<(f64, Vec<f64>)> {
    let k = c.len();
    if k == 0 {
        return cons
            .iter()
            .all(|con| satisfied(con, &[], 1e-7))
            .then(|| (0.0, Vec::new()));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    combinations(cons.len(), k, &mut |idx| {
        let m: Vec<Vec<f64>> = idx.iter().map(|&i| cons[i].a.clone()).collect();
        let rhs: Vec<f64> = idx.iter().map(|&i| cons[i].b).collect();
        if let Some(x) = solve_square(m, rhs) {
            if cons.iter().all(|con| satisfied(con, &x, 1e-7)) {
                let obj: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
                if best.as_ref().map_or(true, |(o, _)| obj < *o) {
                    best = Some((obj, x));
                }
            }
        }
    });
    best
}

/// LP relaxation optimum of `inst` under the given bounds (all finite).
pub fn lp_optimum(inst: &MipInstance, lower: &[f64], upper: &[f64]) -> Option<f64> {
    let n = inst.num_vars();
    let mut cons = Vec::new();
    for row in &inst.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coefs {
            a[j] += v;
        }
        cons.push(Constraint {
            a,
            sense: row.sense,
            b: row.rhs,
        });
    }
    for j in 0..n {
        assert!(
            lower[j].is_finite() && upper[j].is_finite(),
            "oracle needs finite bounds"
        );
        let mut a = vec![0.0; n];
        a[j] = 1.0;
        cons.push(Constraint {
            a: a.clone(),
            sense: Sense::Ge,
            b: lower[j],
        });
        cons.push(Constraint {
            a,
            sense: Sense::Le,
            b: upper[j],
        });
    }
    vertex_min(&inst.objective, &cons).map(|r| r.0)
}

/// Exact MIP optimum: every integer assignment within the bounds, with the
/// continuous part solved by vertex enumeration. `None` means infeasible.
pub fn mip_optimum(inst: &MipInstance) -> Option<f64> {
    let ints: Vec<usize> = inst.integer_indices().collect();
    let conts: Vec<usize> = (0..inst.num_vars())
        .filter(|&j| !inst.is_integer(j))
        .collect();
    let ranges: Vec<(i64, i64)> = ints
        .iter()
        .map(|&j| (inst.lower[j] as i64, inst.upper[j] as i64))
        .collect();
    let mut assign: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut best: Option<f64> = None;
    loop {
        if let Some(v) = continuous_part(inst, &ints, &assign, &conts) {
            if best.map_or(true, |b| v < b) {
                best = Some(v);
            }
        }
        // odometer
        let mut k = 0;
        loop {
            if k == ints.len() {
                return best;
            }
            if assign[k] < ranges[k].1 {
                assign[k] += 1;
                break;
            }
            assign[k] = ranges[k].0;
            k += 1;
        }
    }
}

fn continuous_part(
    inst: &MipInstance,
    ints: &[usize],
    assign: &[i64],
    conts: &[usize],
) -> Option<f64> {
    let n = inst.num_vars();
    let mut fixed = vec![0.0; n];
    for (&j, &v) in ints.iter().zip(assign) {
        fixed[j] = v as f64;
    }
    let base_obj: f64 = ints.iter().map(|&j| inst.objective[j] * fixed[j]).sum();
    let pos: Vec<Option<usize>> = (0..n).map(|j| conts.iter().position(|&c| c == j)).collect();
    let k = conts.len();
    let mut cons = Vec::new();
    for row in &inst.rows {
        let mut a = vec![0.0; k];
        let mut b = row.rhs;
        for &(j, v) in &row.coefs {
            match pos[j] {
                Some(p) => a[p] += v,
                None => b -= v * fixed[j],
            }
        }
        cons.push(Constraint {
            a,
            sense: row.sense,
            b,
        });
    }
    for (p, &j) in conts.iter().enumerate() {
        let mut a = vec![0.0; k];
        a[p] = 1.0;
        cons.push(Constraint {
            a: a.clone(),
            sense: Sense::Ge,
            b: inst.lower[j],
        });
        cons.push(Constraint {
            a,
            sense: Sense::Le,
            b: inst.upper[j],
        });
    }
    let c: Vec<f64> = conts.iter().map(|&j| inst.objective[j]).collect();
    vertex_min(&c, &cons).map(|(v, _)| base_obj + v)
}
