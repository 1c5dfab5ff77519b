// SPDX-License-Identifier: Apache-2.0

use super::report::{ComparisonRow, SeriesReport, TurnoffEvent};
use super::scoring::{batch_averages, gap_score, improvement_pct, time_score, ScoreRecord};
use super::HarnessError;
use crate::model::{MipInstance, Series};
use crate::reopt::{
    apply_completesol_settings, assemble_hints, branching_policy, record_outcome,
    transfer_histories, HintSet, HistoryStore, SolutionPool, DEFAULT_ALPHA,
};
use crate::solver::{solve, ClockMode, SolveOutcome, SolverConfig};
use crate::tuner::{Param, ParamValues, TunerState, DEFAULT_C};
use crate::turnoff::{ComponentLedger, Governed};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

/// Reoptimization techniques that can be switched off one by one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Techniques {
    pub hints: bool,
    pub history: bool,
    /// Full strong branching on the first instance and the rule switch after.
    pub strong_branching: bool,
    pub tuning: bool,
    pub turnoff: bool,
}

impl Techniques {
    pub const ALL: Techniques = Techniques {
        hints: true,
        history: true,
        strong_branching: true,
        tuning: true,
        turnoff: true,
    };
    /// Every instance solved from scratch.
    pub const BASE: Techniques = Techniques {
        hints: false,
        history: false,
        strong_branching: false,
        tuning: false,
        turnoff: false,
    };
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub techniques: Techniques,
    pub seed: u64,
    pub clock: ClockMode,
    /// Solver settings every instance starts from.
    pub base: SolverConfig,
    pub tuner_c: f64,
    pub alpha: f64,
    /// Resume from this file when it exists and rewrite it after every
    /// instance.
    pub checkpoint: Option<PathBuf>,
    /// Process at most this many instances in this call.
    pub stop_after: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            techniques: Techniques::ALL,
            seed: 0,
            clock: ClockMode::Wall,
            base: SolverConfig::default(),
            tuner_c: DEFAULT_C,
            alpha: DEFAULT_ALPHA,
            checkpoint: None,
            stop_after: None,
        }
    }
}

/// Everything carried from one instance to the next; this is what the
/// checkpoint file holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesState {
    pub series_name: String,
    pub num_instances: usize,
    pub next_index: usize,
    pub pool: SolutionPool,
    pub histories: HistoryStore,
    pub tuner: Option<TunerState>,
    pub ledger: ComponentLedger,
    pub records: Vec<ScoreRecord>,
    pub turnoff_events: Vec<TurnoffEvent>,
    pub errors: Vec<(usize, String)>,
    pub hints_offered: usize,
}

impl SeriesState {
    pub fn new(series: &Series, run: &RunConfig) -> Self {
        let tuner = run.techniques.tuning.then(|| {
            let mut params = vec![Param::Cuts, Param::RootCuts];
            if run.techniques.hints {
                params.insert(0, Param::Hint);
            }
            TunerState::new(&params, 1, run.tuner_c, run.seed)
        });
        SeriesState {
            series_name: series.manifest.series_name.clone(),
            num_instances: series.len(),
            next_index: 0,
            pool: SolutionPool::default(),
            histories: HistoryStore::default(),
            tuner,
            ledger: ComponentLedger::default(),
            records: Vec::new(),
            turnoff_events: Vec::new(),
            errors: Vec::new(),
            hints_offered: 0,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.next_index >= self.num_instances
    }
}

/// Scores of one solve. Proven infeasibility counts as solved with gap 0.
pub fn score_outcome(index: usize, outcome: &SolveOutcome, time_limit: f64) -> ScoreRecord {
    let solved = outcome.status.is_solved();
    let ts = time_score(outcome.solve_time, time_limit, solved);
    let gs = if solved {
        0.0
    } else {
        gap_score(outcome.primal_bound, outcome.dual_bound)
    };
    ScoreRecord {
        index,
        status: outcome.status.to_string(),
        time: outcome.solve_time,
        pb: outcome.primal_bound,
        db: outcome.dual_bound,
        time_score: ts,
        gap_score: gs,
        total_score: ts + gs,
        hint_converted: false,
        rule: String::new(),
        hint: false,
        cuts: false,
        rootcuts: false,
    }
}

fn read_checkpoint(path: &Path) -> Result<Option<SeriesState>, HarnessError> {
    if !path.is_file() {
        return Ok(None);
    }
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })
}

fn write_checkpoint(path: &Path, state: &SeriesState) -> Result<(), HarnessError> {
    let text = serde_json::to_string(state).expect("series state serializes");
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(|source| HarnessError::Io {
        path: tmp.clone(),
        source,
    })?;
    fs::rename(&tmp, path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Solves the series in order, resuming from the checkpoint when one is
/// configured and present.
pub fn run_series(series: &Series, run: &RunConfig) -> Result<SeriesReport, HarnessError> {
    let state = match &run.checkpoint {
        Some(p) => read_checkpoint(p)?,
        None => None,
    };
    let state = match state {
        Some(s) => {
            if s.series_name != series.manifest.series_name || s.num_instances != series.len() {
                return Err(HarnessError::Checkpoint(format!(
                    "checkpoint is for `{}` ({} instances)",
                    s.series_name, s.num_instances
                )));
            }
            s
        }
        None => SeriesState::new(series, run),
    };
    run_series_with_state(series, run, state)
}

/// Like [`run_series`] but starting from an explicit state.
pub fn run_series_with_state(
    series: &Series,
    run: &RunConfig,
    mut state: SeriesState,
) -> Result<SeriesReport, HarnessError> {
    let time_limit = series.manifest.time_limit;
    let objective_only = series.manifest.objective_only();
    let mut processed = 0;
    while !state.is_complete() && run.stop_after.map_or(true, |k| processed < k) {
        let t = state.next_index;
        match series.load_instance(t) {
            Ok(inst) => solve_one(
                series,
                run,
                &mut state,
                &inst,
                t,
                time_limit,
                objective_only,
            ),
            Err(e) => {
                state.errors.push((t, e.to_string()));
                state.records.push(error_record(t));
            }
        }
        state.next_index += 1;
        processed += 1;
        if let Some(p) = &run.checkpoint {
            write_checkpoint(p, &state)?;
        }
    }
    Ok(SeriesReport::from_state(&state))
}

fn error_record(index: usize) -> ScoreRecord {
    ScoreRecord {
        index,
        status: "ERROR".into(),
        time: 0.0,
        pb: f64::INFINITY,
        db: f64::NEG_INFINITY,
        time_score: 1.0,
        gap_score: 1.0,
        total_score: 2.0,
        hint_converted: false,
        rule: String::new(),
        hint: false,
        cuts: false,
        rootcuts: false,
    }
}

fn solve_one(
    series: &Series,
    run: &RunConfig,
    state: &mut SeriesState,
    inst: &MipInstance,
    t: usize,
    time_limit: f64,
    objective_only: bool,
) {
    let tech = run.techniques;
    let mut cfg = run.base.clone();
    cfg.clock = run.clock;
    cfg.seed = run.seed;
    if tech.strong_branching {
        cfg.branching_rule = branching_policy(t, &series.manifest.changing);
    }
    let mut values = state
        .tuner
        .as_ref()
        .map_or(ParamValues::default(), |tu| tu.select_values(t));
    if !tech.hints {
        values.hint = false;
    }
    cfg.use_cuts_tree = values.cuts;
    cfg.use_cuts_root = values.root_cuts;

    let mut hints = HintSet::default();
    if tech.hints {
        apply_completesol_settings(&mut cfg, objective_only);
        if values.hint {
            match assemble_hints(&state.pool, inst, t, objective_only, run.alpha) {
                Ok(h) => hints = h,
                Err(e) => state.errors.push((t, e.to_string())),
            }
        }
    }
    let warm = if tech.history && t > 0 {
        match &state.histories.latest {
            Some((_, prev)) => match transfer_histories(prev, inst) {
                Ok(w) => Some(w),
                Err(e) => {
                    state.errors.push((t, e.to_string()));
                    None
                }
            },
            None => None,
        }
    } else {
        None
    };
    if tech.turnoff {
        state.ledger.apply(&mut cfg);
    }

    let outcome = solve(inst, &cfg, time_limit, &hints, warm.as_ref());

    let provided = !hints.is_empty();
    if provided {
        state.hints_offered += 1;
    }
    let converted = provided && outcome.stats.hint_converted;
    let mut rec = score_outcome(t, &outcome, time_limit);
    rec.hint_converted = converted;
    rec.rule = cfg.branching_rule.to_string();
    rec.hint = values.hint;
    rec.cuts = values.cuts;
    rec.rootcuts = values.root_cuts;

    if let Some(tu) = state.tuner.as_mut() {
        if t >= 1 {
            let base_score = -rec.total_score;
            for p in Param::ALL {
                tu.update(p, values.get(p), base_score, converted);
            }
        }
    }
    if tech.turnoff {
        let enabled: BTreeSet<Governed> = Governed::ALL
            .into_iter()
            .filter(|g| g.enabled_in(&cfg))
            .filter(|g| match g {
                Governed::CompleteSol => provided,
                Governed::Gomory => cfg.use_cuts_root || cfg.use_cuts_tree,
                _ => true,
            })
            .collect();
        state.ledger.accumulate(&outcome.stats, &enabled);
        for g in state.ledger.evaluate(time_limit, t) {
            state.turnoff_events.push(TurnoffEvent {
                component: g,
                index: t,
            });
        }
    }
    if tech.hints || tech.history {
        record_outcome(&mut state.pool, &mut state.histories, inst, &outcome, t);
    }
    state.records.push(rec);
}

/// Batch-by-batch improvement of `report` over `baseline`.
pub fn compare_reports(report: &[ScoreRecord], baseline: &[ScoreRecord]) -> Vec<ComparisonRow> {
    let a = batch_averages(report);
    let b = batch_averages(baseline);
    let mut rows: Vec<ComparisonRow> = a
        .iter()
        .zip(&b)
        .map(|(x, y)| ComparisonRow {
            label: format!("{}-{}", x.first, x.last),
            baseline: y.mean_total,
            report: x.mean_total,
            improvement_pct: improvement_pct(y.mean_total, x.mean_total),
        })
        .collect();
    let k = report.len().min(baseline.len());
    if k > 0 {
        let mean = |r: &[ScoreRecord]| r[..k].iter().map(|x| x.total_score).sum::<f64>() / k as f64;
        let (x, y) = (mean(report), mean(baseline));
        rows.push(ComparisonRow {
            label: "all".into(),
            baseline: y,
            report: x,
            improvement_pct: improvement_pct(y, x),
        });
    }
    rows
}
