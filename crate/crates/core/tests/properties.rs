// SPDX-License-Identifier: Apache-2.0

//! Invariants that must hold for arbitrary inputs.

use mipreopt::harness::{gap_score, shifted_geomean, time_score};
use mipreopt::model::random::{random_mip, RandomMipSpec};
use mipreopt::model::{
    instance_to_json, load_series, parse_instance, perturb_series, write_series, Component,
    MipInstance,
};
use mipreopt::reopt::{
    build_common_hint, clip_and_strip, transfer_histories, PoolEntry, SolutionPool,
};
use mipreopt::solver::{
    Direction, Heuristic, HeuristicStats, Presolver, PresolverStats, Separator, SeparatorStats,
    SolverStats, VariableHistory, WarmHistories,
};
use mipreopt::tuner::{arm_score, bonus, BonusKind, ParamArm};
use mipreopt::turnoff::{ComponentLedger, Governed};
use proptest::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

fn instance() -> impl Strategy<Value = MipInstance> {
    (1usize..=6, 0usize..=3, 1usize..=5, 1i64..=4, any::<u64>()).prop_map(|(i, c, r, u, seed)| {
        random_mip(
            RandomMipSpec {
                integer_vars: i,
                continuous_vars: c,
                rows: r,
                integer_upper: u,
                continuous_upper: 4.0,
            },
            seed,
        )
    })
}

fn kinds() -> impl Strategy<Value = BTreeSet<Component>> {
    prop::collection::btree_set(
        prop_oneof![
            Just(Component::Objective),
            Just(Component::Rhs),
            Just(Component::Bounds),
            Just(Component::Matrix)
        ],
        1..=4,
    )
}

fn history() -> impl Strategy<Value = VariableHistory> {
    (0.0f64..100.0, 0.0f64..100.0, 0u32..12, 0u32..12).prop_map(|(su, sd, cu, cd)| {
        VariableHistory {
            pscost_up_sum: if cu == 0 { 0.0 } else { su },
            pscost_down_sum: if cd == 0 { 0.0 } else { sd },
            pscost_up_count: cu.into(),
            pscost_down_count: cd.into(),
            ..Default::default()
        }
    })
}

proptest! {
    #[test]
    fn instance_text_round_trip(inst in instance()) {
        let back = parse_instance(&instance_to_json(&inst), "mem").unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn perturbation_changes_only_requested_parts(inst in instance(), kind in kinds(), seed in any::<u64>(), mag in 0.01f64..0.5) {
        let series = perturb_series(&inst, &kind, 4, seed, mag).unwrap();
        let again = perturb_series(&inst, &kind, 4, seed, mag).unwrap();
        prop_assert_eq!(&series, &again);
        for v in &series {
            prop_assert_eq!(&v.var_names, &inst.var_names);
            prop_assert_eq!(&v.integer, &inst.integer);
            if !kind.contains(&Component::Objective) {
                prop_assert_eq!(&v.objective, &inst.objective);
            }
            if !kind.contains(&Component::Bounds) {
                prop_assert_eq!(&v.lower, &inst.lower);
                prop_assert_eq!(&v.upper, &inst.upper);
            }
            for (a, b) in v.rows.iter().zip(&inst.rows) {
                prop_assert_eq!(a.sense, b.sense);
                let pat_a: Vec<usize> = a.coefs.iter().map(|c| c.0).collect();
                let pat_b: Vec<usize> = b.coefs.iter().map(|c| c.0).collect();
                prop_assert_eq!(pat_a, pat_b);
                if !kind.contains(&Component::Rhs) {
                    prop_assert_eq!(a.rhs, b.rhs);
                }
                if !kind.contains(&Component::Matrix) {
                    prop_assert_eq!(&a.coefs, &b.coefs);
                }
            }
            for j in 0..v.num_vars() {
                prop_assert!(v.lower[j] <= v.upper[j]);
            }
        }
    }

    #[test]
    fn perturbed_series_passes_loading(inst in instance(), kind in kinds(), seed in any::<u64>()) {
        let dir = tempfile::tempdir().unwrap();
        let series = perturb_series(&inst, &kind, 3, seed, 0.2).unwrap();
        let manifest = write_series(dir.path(), "s", 5.0, &kind, &series).unwrap();
        let loaded = load_series(&manifest).unwrap();
        prop_assert_eq!(loaded.len(), 3);
        for (k, v) in series.iter().enumerate() {
            prop_assert_eq!(&loaded.load_instance(k).unwrap(), v);
        }
    }

    #[test]
    fn hints_respect_target_bounds_and_types(inst in instance(), seed in any::<u64>(), raw in prop::collection::vec(prop::collection::vec(-3.0f64..8.0, 9), 1..8), alpha in 1.0f64..=100.0) {
        let targets = perturb_series(&inst, &[Component::Bounds].into(), 1, seed, 0.5).unwrap();
        let target = &targets[0];
        let mut pool = SolutionPool::default();
        for (k, vals) in raw.iter().enumerate() {
            let values: BTreeMap<String, f64> = inst.var_names.iter().cloned().zip(vals.iter().map(|v| v.round())).collect();
            let integer = inst.integer_indices().map(|j| inst.var_names[j].clone()).collect();
            pool.entries.insert(k, PoolEntry { objective: 0.0, values, integer });
        }
        for entry in pool.entries.values() {
            let h = clip_and_strip(entry, target).unwrap();
            prop_assert_eq!(h.len(), target.integer_indices().count());
            for (name, v) in &h {
                let j = target.var_index(name).unwrap();
                prop_assert!(target.is_integer(j));
                prop_assert!(*v >= target.lower[j] && *v <= target.upper[j] && v.fract() == 0.0);
            }
        }
        let common = build_common_hint(&pool, target, alpha).unwrap();
        let first = &pool.entries.values().next().unwrap().values;
        for (name, v) in &common {
            let j = target.var_index(name).unwrap();
            prop_assert!(target.is_integer(j));
            prop_assert!(*v >= target.lower[j] && *v <= target.upper[j]);
            let hits = pool.entries.values().filter(|e| (e.values[name] - first[name]).abs() <= 1e-6).count();
            prop_assert!(hits as f64 * 100.0 >= alpha * pool.len() as f64);
        }
        if alpha <= 100.0 / pool.len() as f64 {
            // a single agreeing solution (the first itself) suffices
            prop_assert_eq!(common.len(), target.integer_indices().count());
        }
    }

    #[test]
    fn transfer_caps_counts_and_keeps_averages(hs in prop::collection::vec(history(), 1..6), global in history()) {
        let names: Vec<String> = (0..hs.len()).map(|j| format!("v{j}")).collect();
        let n = names.len();
        let target = MipInstance::new("t", names.clone(), vec![0.0; n], vec![0.0; n], vec![1.0; n], vec![true; n], vec![]).unwrap();
        let prev = WarmHistories { variables: names.into_iter().zip(hs).collect(), global };
        let w = transfer_histories(&prev, &target).unwrap();
        for (name, before) in prev.variables.iter().chain([(&"global".to_string(), &prev.global)]) {
            let after = if name == "global" { w.global } else { w.variables[name] };
            for d in [Direction::Up, Direction::Down] {
                prop_assert!(after.count(d) <= 4.0);
                prop_assert_eq!(after.count(d), before.count(d).min(4.0));
                match (before.average(d), after.average(d)) {
                    (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0)),
                    (None, None) => {}
                    other => prop_assert!(false, "average presence changed: {:?}", other),
                }
            }
        }
    }

    #[test]
    fn gap_is_bounded_and_scale_free(pb in -1e6f64..1e6, db in -1e6f64..1e6, k in 1e-3f64..1e3) {
        let g = gap_score(pb, db);
        prop_assert!((0.0..=1.0).contains(&g));
        prop_assert!((gap_score(k * pb, k * db) - g).abs() <= 1e-12);
        prop_assert_eq!(gap_score(pb, db), gap_score(db, pb));
    }

    #[test]
    fn time_score_in_unit_interval(t in 0.0f64..1e4, limit in 1e-3f64..1e3, solved in any::<bool>()) {
        let s = time_score(t, limit, solved);
        prop_assert!((0.0..=1.0).contains(&s));
        if !solved {
            prop_assert_eq!(s, 1.0);
        }
    }

    #[test]
    fn geomean_between_extremes(ts in prop::collection::vec(0.0f64..1e3, 1..20)) {
        let g = shifted_geomean(&ts, 10.0).unwrap();
        let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ts.iter().copied().fold(0.0, f64::max);
        prop_assert!(g >= lo - 1e-9 && g <= hi + 1e-9);
    }

    #[test]
    fn bonus_shrinks_with_use(q in -2.0f64..2.0, n in 1u64..1000, c in 0.01f64..1.0) {
        let (more, fewer) = (ParamArm { q, n: n + 1 }, ParamArm { q, n });
        prop_assert!(arm_score(&more, c) < arm_score(&fewer, c));
        prop_assert!(bonus(BonusKind::Sqrt, c, n + 1, 0) < bonus(BonusKind::Sqrt, c, n, 0));
        prop_assert!(bonus(BonusKind::Classic, c, n + 1, 2000) < bonus(BonusKind::Classic, c, n, 2000));
    }

    #[test]
    fn turnoff_is_permanent_and_idempotent(steps in prop::collection::vec((0u64..3, 0u64..3, 0u64..2, 0.0f64..5.0, prop::collection::btree_set(0usize..5, 0..=5)), 1..80)) {
        let mut ledger = ComponentLedger::default();
        let mut off = BTreeSet::new();
        for (index, (changes, cuts, best, time, enabled_idx)) in steps.into_iter().enumerate() {
            let mut stats = SolverStats::default();
            for p in [Presolver::BoundTighten, Presolver::CoefTighten] {
                stats.presolvers.insert(p, PresolverStats { changes, time: 0.0 });
            }
            stats.separators.insert(Separator::Gomory, SeparatorStats { cuts_generated: cuts, time: 0.0 });
            for h in [Heuristic::Rounding, Heuristic::CompleteSol] {
                stats.heuristics.insert(h, HeuristicStats { calls: 1, solutions_found: best, best_solutions_found: best, time });
            }
            let enabled: BTreeSet<Governed> = enabled_idx.iter().map(|&i| Governed::ALL[i]).filter(|g| !off.contains(g)).collect();
            ledger.accumulate(&stats, &enabled);
            let newly = ledger.evaluate(10.0, index);
            for g in &newly {
                prop_assert!(off.insert(*g), "{:?} disabled twice", g);
            }
            prop_assert_eq!(ledger.disabled(), off.clone());
            let snapshot = ledger.clone();
            prop_assert!(ledger.evaluate(10.0, index).is_empty());
            prop_assert_eq!(&ledger, &snapshot);
        }
    }
}
