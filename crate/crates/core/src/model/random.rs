// SPDX-License-Identifier: Apache-2.0

//! Seeded generators for small test and benchmark instances.

use super::{MipInstance, Row, Sense};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct RandomMipSpec {
    pub integer_vars: usize,
    pub continuous_vars: usize,
    pub rows: usize,
    /// Integer variables range over `0..=integer_upper`.
    pub integer_upper: i64,
    /// Continuous variables range over `[0, continuous_upper]`.
    pub continuous_upper: f64,
}

impl Default for RandomMipSpec {
    fn default() -> Self {
        RandomMipSpec {
            integer_vars: 8,
            continuous_vars: 0,
            rows: 6,
            integer_upper: 1,
            continuous_upper: 5.0,
        }
    }
}

/// A bounded mixed-integer instance that is feasible by construction: rows
/// are built around a random integer point.
pub fn random_mip(spec: RandomMipSpec, seed: u64) -> MipInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.integer_vars + spec.continuous_vars;
    let mut names = Vec::with_capacity(n);
    let mut lower = vec![0.0; n];
    let mut upper = Vec::with_capacity(n);
    let mut integer = Vec::with_capacity(n);
    let mut anchor = Vec::with_capacity(n);
    for j in 0..n {
        let is_int = j < spec.integer_vars;
        names.push(format!("x{j}"));
        integer.push(is_int);
        if is_int {
            upper.push(spec.integer_upper as f64);
            anchor.push(rng.gen_range(0..=spec.integer_upper) as f64);
        } else {
            upper.push(spec.continuous_upper);
            anchor.push(rng.gen_range(0.0..=spec.continuous_upper));
        }
        lower[j] = 0.0;
    }
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-10..=10) as f64).collect();
    let mut rows = Vec::with_capacity(spec.rows);
    for i in 0..spec.rows {
        let mut coefs = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.6) {
                let a = rng.gen_range(-6..=9) as f64;
                if a != 0.0 {
                    coefs.push((j, a));
                }
            }
        }
        if coefs.is_empty() {
            coefs.push((rng.gen_range(0..n), 1.0 + rng.gen_range(0..4) as f64));
        }
        let act: f64 = coefs.iter().map(|&(j, a)| a * anchor[j]).sum();
        let slack = rng.gen_range(0..=3) as f64 + if rng.gen_bool(0.5) { 0.5 } else { 0.0 };
        let (sense, rhs) = if rng.gen_bool(0.75) {
            (Sense::Le, (act + slack).floor().max(act))
        } else {
            (Sense::Ge, (act - slack).ceil().min(act))
        };
        rows.push(Row::new(format!("r{i}"), coefs, sense, rhs));
    }
    MipInstance::new(
        format!("rand{seed}"),
        names,
        objective,
        lower,
        upper,
        integer,
        rows,
    )
    .expect("generated instance is valid")
}

/// `max Σ v x  s.t. Σ w x <= cap` over binaries, stated as a minimization.
pub fn random_knapsack(items: usize, seed: u64) -> MipInstance {
    multi_knapsack(items, 1, seed)
}

/// Multi-dimensional 0/1 knapsack with `dims` capacity rows, each at half of
/// the row's total weight.
pub fn multi_knapsack(items: usize, dims: usize, seed: u64) -> MipInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = (0..items).map(|j| format!("item{j}")).collect();
    let objective = (0..items)
        .map(|_| -(rng.gen_range(10..=60) as f64))
        .collect();
    let rows = (0..dims)
        .map(|d| {
            let coefs: Vec<(usize, f64)> = (0..items)
                .map(|j| (j, rng.gen_range(5..=40) as f64))
                .collect();
            let total: f64 = coefs.iter().map(|c| c.1).sum();
            Row::new(format!("cap{d}"), coefs, Sense::Le, (total / 2.0).floor())
        })
        .collect();
    MipInstance::new(
        format!("mknap{items}x{dims}_{seed}"),
        names,
        objective,
        vec![0.0; items],
        vec![1.0; items],
        vec![true; items],
        rows,
    )
    .expect("generated instance is valid")
}
