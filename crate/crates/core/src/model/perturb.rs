// SPDX-License-Identifier: Apache-2.0

use super::{Component, MipInstance, ModelError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn snap(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Emits `count` variants of `base` where only the components in `kind`
/// differ. Output is a pure function of the arguments.
///
/// * objective / rhs / matrix: each entry moves by up to `magnitude` of its
///   size (at least 1 in absolute terms for objective and rhs);
/// * bounds: each variable is touched with probability `min(magnitude, 1)`;
///   integer variables lose one value at a random end of their domain,
///   continuous ones shrink a random side by up to `magnitude` of the width.
///
/// The sparsity pattern and variable set never change.
pub fn perturb_series(
    base: &MipInstance,
    kind: &BTreeSet<Component>,
    count: usize,
    seed: u64,
    magnitude: f64,
) -> Result<Vec<MipInstance>, ModelError> {
    if count == 0 {
        return Err(ModelError::InvalidArgument(
            "count must be at least 1".into(),
        ));
    }
    if !(magnitude > 0.0) {
        return Err(ModelError::InvalidArgument(
            "magnitude must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut objective = base.objective.clone();
        let mut lower = base.lower.clone();
        let mut upper = base.upper.clone();
        let mut rows = base.rows.clone();

        if kind.contains(&Component::Objective) {
            for c in &mut objective {
                let u: f64 = rng.gen_range(-1.0..=1.0);
                *c = snap(*c + magnitude * c.abs().max(1.0) * u);
            }
        }
        if kind.contains(&Component::Rhs) {
            for r in &mut rows {
                let u: f64 = rng.gen_range(-1.0..=1.0);
                r.rhs = snap(r.rhs + magnitude * r.rhs.abs().max(1.0) * u);
            }
        }
        if kind.contains(&Component::Matrix) {
            for r in &mut rows {
                for (_, a) in &mut r.coefs {
                    let u: f64 = rng.gen_range(-1.0..=1.0);
                    *a = snap(*a * (1.0 + magnitude * u));
                }
            }
        }
        if kind.contains(&Component::Bounds) {
            let p = magnitude.min(1.0);
            for j in 0..base.num_vars() {
                let touch = rng.gen_bool(p);
                let up_side = rng.gen_bool(0.5);
                let frac: f64 = rng.gen_range(0.0..=1.0);
                if !touch {
                    continue;
                }
                let (l, u) = (lower[j], upper[j]);
                if base.integer[j] {
                    if u - l >= 1.0 {
                        if up_side && u.is_finite() {
                            upper[j] = u - 1.0;
                        } else if l.is_finite() {
                            lower[j] = l + 1.0;
                        }
                    }
                } else if l.is_finite() && u.is_finite() && u > l {
                    let shift = snap(frac * magnitude.min(1.0) * (u - l));
                    if up_side {
                        upper[j] = (u - shift).max(l);
                    } else {
                        lower[j] = (l + shift).min(u);
                    }
                }
            }
        }
        out.push(base.with_data(
            format!("{}_{k:03}", base.name),
            objective,
            lower,
            upper,
            rows,
        )?);
    }
    Ok(out)
}
