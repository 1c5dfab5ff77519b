// SPDX-License-Identifier: Apache-2.0

//! Online ON/OFF tuning of three solver parameters with an upper
//! confidence bound score and a deterministic exploration phase.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const DEFAULT_C: f64 = 0.3;
/// Arms used fewer times than this are still under exploration.
pub const MIN_USES: u64 = 4;
/// Candidates lie within this fraction of the base-score deviation of the
/// best arm.
pub const SIGMA_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Hint,
    Cuts,
    RootCuts,
}

impl Param {
    pub const ALL: [Param; 3] = [Param::Hint, Param::Cuts, Param::RootCuts];

    /// Bit of the exploration counter that drives this parameter.
    pub fn bit(self) -> u32 {
        match self {
            Param::Hint => 0,
            Param::Cuts => 1,
            Param::RootCuts => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Param::Hint => "hint",
            Param::Cuts => "cuts",
            Param::RootCuts => "rootcuts",
        }
    }
}

/// Shape of the exploration bonus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BonusKind {
    /// `C / N`
    #[default]
    Linear,
    /// `C / sqrt(N)`
    Sqrt,
    /// `C * sqrt(ln(total) / N)` with `total` the updates over both arms.
    Classic,
}

pub fn bonus(kind: BonusKind, c: f64, n: u64, total: u64) -> f64 {
    assert!(
        n >= 1,
        "arm without updates is under exploration and has no score"
    );
    let n = n as f64;
    match kind {
        BonusKind::Linear => c / n,
        BonusKind::Sqrt => c / n.sqrt(),
        BonusKind::Classic => c * ((total.max(1) as f64).ln() / n).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamArm {
    /// Running mean of the base scores credited to this arm.
    pub q: f64,
    pub n: u64,
}

impl ParamArm {
    pub fn record(&mut self, x: f64) {
        self.n += 1;
        self.q += (x - self.q) / self.n as f64;
    }
}

/// `Q + C / N`.
///
/// # Panics
/// If the arm has no updates yet.
pub fn arm_score(arm: &ParamArm, c: f64) -> f64 {
    arm.q + bonus(BonusKind::Linear, c, arm.n, 0)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamState {
    pub off: ParamArm,
    pub on: ParamArm,
    /// Every base score observed while tuning this parameter.
    pub samples: Vec<f64>,
    pub start: usize,
    /// How often each value was actually used: `[off, on]`.
    pub used: [u64; 2],
}

impl ParamState {
    pub fn arm(&self, on: bool) -> &ParamArm {
        if on {
            &self.on
        } else {
            &self.off
        }
    }

    pub fn under_exploration(&self) -> bool {
        self.on.n.min(self.off.n) < MIN_USES
    }

    /// Sample standard deviation of the base scores, 0 below two samples.
    pub fn sigma(&self) -> f64 {
        let k = self.samples.len();
        if k < 2 {
            return 0.0;
        }
        let mean = self.samples.iter().sum::<f64>() / k as f64;
        let ss: f64 = self.samples.iter().map(|x| (x - mean) * (x - mean)).sum();
        (ss / (k - 1) as f64).sqrt()
    }
}

/// Values chosen for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamValues {
    pub hint: bool,
    pub cuts: bool,
    pub root_cuts: bool,
}

impl Default for ParamValues {
    fn default() -> Self {
        ParamValues {
            hint: true,
            cuts: true,
            root_cuts: true,
        }
    }
}

impl ParamValues {
    pub fn get(&self, p: Param) -> bool {
        match p {
            Param::Hint => self.hint,
            Param::Cuts => self.cuts,
            Param::RootCuts => self.root_cuts,
        }
    }

    pub fn set(&mut self, p: Param, v: bool) {
        match p {
            Param::Hint => self.hint = v,
            Param::Cuts => self.cuts = v,
            Param::RootCuts => self.root_cuts = v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunerState {
    pub c: f64,
    pub bonus: BonusKind,
    pub seed: u64,
    pub params: BTreeMap<Param, ParamState>,
}

/// Most-used value of a parameter and its use count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TunerSummary {
    pub param: Param,
    pub value: bool,
    pub count: u64,
    pub total: u64,
}

impl TunerState {
    /// Tunes `params`, all starting at instance `start`.
    pub fn new(params: &[Param], start: usize, c: f64, seed: u64) -> Self {
        assert!(c > 0.0, "weight constant must be positive");
        TunerState {
            c,
            bonus: BonusKind::Linear,
            seed,
            params: params
                .iter()
                .map(|&p| {
                    (
                        p,
                        ParamState {
                            start,
                            ..Default::default()
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn with_bonus(mut self, kind: BonusKind) -> Self {
        self.bonus = kind;
        self
    }

    pub fn is_tuned(&self, p: Param) -> bool {
        self.params.contains_key(&p)
    }

    pub fn score(&self, p: Param, on: bool) -> f64 {
        let st = &self.params[&p];
        let arm = st.arm(on);
        arm.q + bonus(self.bonus, self.c, arm.n, st.on.n + st.off.n)
    }

    /// Values for instance `index`. Parameters that are not tuned stay ON.
    pub fn select_values(&self, index: usize) -> ParamValues {
        let mut out = ParamValues::default();
        for (&p, st) in &self.params {
            if index < st.start {
                continue;
            }
            let t = (index - st.start) as u64;
            let v = if st.under_exploration() {
                (t >> p.bit()) & 1 == 1
            } else {
                let s_on = self.score(p, true);
                let s_off = self.score(p, false);
                let best = s_on.max(s_off);
                let band = SIGMA_FRACTION * st.sigma();
                let candidates: Vec<bool> = [false, true]
                    .into_iter()
                    .filter(|&v| if v { s_on } else { s_off } >= best - band)
                    .collect();
                if candidates.len() == 1 {
                    candidates[0]
                } else {
                    self.rng(index, p).gen_bool(0.5)
                }
            };
            out.set(p, v);
        }
        out
    }

    /// Stateless draw so that resuming from a checkpoint repeats the choice.
    fn rng(&self, index: usize, p: Param) -> ChaCha8Rng {
        let mix = self
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add((index as u64) << 4)
            .wrapping_add(p.bit() as u64);
        ChaCha8Rng::seed_from_u64(mix)
    }

    /// Credits `base_score` (the negated total score) after an instance.
    ///
    /// The hint parameter credits ON only when hints were used and converted
    /// into a feasible solution, otherwise OFF. The cut parameters credit the
    /// value that was used.
    pub fn update(&mut self, p: Param, value_used: bool, base_score: f64, hint_converted: bool) {
        let Some(st) = self.params.get_mut(&p) else {
            return;
        };
        st.used[value_used as usize] += 1;
        let credit_on = match p {
            Param::Hint => value_used && hint_converted,
            Param::Cuts | Param::RootCuts => value_used,
        };
        if credit_on {
            st.on.record(base_score);
        } else {
            st.off.record(base_score);
        }
        st.samples.push(base_score);
    }

    pub fn exploration_flags(&self) -> BTreeMap<Param, bool> {
        self.params
            .iter()
            .map(|(&p, st)| (p, st.under_exploration()))
            .collect()
    }

    pub fn summary(&self) -> Vec<TunerSummary> {
        self.params
            .iter()
            .map(|(&p, st)| {
                let on = st.used[1] > st.used[0];
                TunerSummary {
                    param: p,
                    value: on,
                    count: st.used[on as usize],
                    total: st.used[0] + st.used[1],
                }
            })
            .collect()
    }
}
