// SPDX-License-Identifier: Apache-2.0

//! Problem data: instances, solutions, feasibility checks and series files.
//!
//! Every instance is a minimization problem
//!
//! ```text
//! min  c·x
//! s.t. a_i·x {<=, >=, =} b_i     for every row i
//!      l <= x <= u
//!      x_j integer               for j in the integer mask
//! ```
//!
//! Instances are immutable once built; [`MipInstance::new`] is the only
//! constructor and enforces the structural invariants.

mod file;
mod perturb;
pub mod random;

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use thiserror::Error;

pub use file::{
    instance_to_json, load_instance, load_series, parse_instance, write_instance, write_series,
    Series, SeriesManifest,
};
pub use perturb::perturb_series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "LE")]
    Le,
    #[serde(rename = "GE")]
    Ge,
    #[serde(rename = "EQ")]
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "LE",
            Sense::Ge => "GE",
            Sense::Eq => "EQ",
        })
    }
}

/// A linear constraint `Σ coef·x  sense  rhs`. Coefficients are kept sorted
/// by variable index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub coefs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn new(
        name: impl Into<String>,
        mut coefs: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Self {
        coefs.sort_by_key(|&(j, _)| j);
        Row {
            name: name.into(),
            coefs,
            sense,
            rhs,
        }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.sense {
            Sense::Le => (act - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Eq => (act - self.rhs).abs(),
        }
    }

    /// Bounds on the row activity implied by the sense.
    pub fn activity_bounds(&self) -> (f64, f64) {
        match self.sense {
            Sense::Le => (f64::NEG_INFINITY, self.rhs),
            Sense::Ge => (self.rhs, f64::INFINITY),
            Sense::Eq => (self.rhs, self.rhs),
        }
    }
}

/// Which parts of the problem data change along a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    #[serde(alias = "OBJECTIVE")]
    Objective,
    #[serde(alias = "RHS")]
    Rhs,
    #[serde(alias = "BOUNDS")]
    Bounds,
    #[serde(alias = "MATRIX")]
    Matrix,
}

impl std::str::FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "objective" | "obj" => Ok(Component::Objective),
            "rhs" => Ok(Component::Rhs),
            "bounds" | "bound" => Ok(Component::Bounds),
            "matrix" => Ok(Component::Matrix),
            other => Err(format!("unknown series component `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub feas: f64,
    pub int: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feas: 1e-6,
            int: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipInstance {
    pub name: String,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub integer: Vec<bool>,
    pub var_names: Vec<String>,
    name_index: HashMap<String, usize>,
}

impl MipInstance {
    /// Builds and validates an instance. Integer variables get their bounds
    /// rounded inward to the nearest integers.
    pub fn new(
        name: impl Into<String>,
        var_names: Vec<String>,
        objective: Vec<f64>,
        mut lower: Vec<f64>,
        mut upper: Vec<f64>,
        integer: Vec<bool>,
        mut rows: Vec<Row>,
    ) -> Result<Self, ModelError> {
        let n = var_names.len();
        for (what, len) in [
            ("objective", objective.len()),
            ("lower", lower.len()),
            ("upper", upper.len()),
            ("integer", integer.len()),
        ] {
            if len != n {
                return Err(ModelError::Dimension {
                    what,
                    expected: n,
                    got: len,
                });
            }
        }
        let mut name_index = HashMap::with_capacity(n);
        for (j, v) in var_names.iter().enumerate() {
            if name_index.insert(v.clone(), j).is_some() {
                return Err(ModelError::DuplicateVariable(v.clone()));
            }
        }
        for j in 0..n {
            if integer[j] {
                let tol = Tolerances::default().int;
                if lower[j].is_finite() {
                    lower[j] = (lower[j] - tol).ceil();
                }
                if upper[j].is_finite() {
                    upper[j] = (upper[j] + tol).floor();
                }
            }
            if lower[j].is_nan() || upper[j].is_nan() || lower[j] > upper[j] {
                return Err(ModelError::CrossedBounds {
                    index: j,
                    lower: lower[j],
                    upper: upper[j],
                });
            }
            if lower[j] == f64::INFINITY || upper[j] == f64::NEG_INFINITY {
                return Err(ModelError::CrossedBounds {
                    index: j,
                    lower: lower[j],
                    upper: upper[j],
                });
            }
        }
        for row in &mut rows {
            row.coefs.sort_by_key(|&(j, _)| j);
            if let Some(&(j, _)) = row.coefs.iter().find(|&&(j, _)| j >= n) {
                return Err(ModelError::UnknownVariable {
                    row: row.name.clone(),
                    var: format!("#{j}"),
                });
            }
        }
        Ok(MipInstance {
            name: name.into(),
            objective,
            rows,
            lower,
            upper,
            integer,
            var_names,
            name_index,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn is_integer(&self, j: usize) -> bool {
        self.integer[j]
    }

    pub fn integer_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.integer
            .iter()
            .enumerate()
            .filter_map(|(j, &int)| int.then_some(j))
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.name_index.get(name).copied()
    }

    /// Same instance with different data in the fields a series may change.
    /// Structure (names, integrality, row count) is kept.
    pub fn with_data(
        &self,
        name: impl Into<String>,
        objective: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        rows: Vec<Row>,
    ) -> Result<Self, ModelError> {
        MipInstance::new(
            name,
            self.var_names.clone(),
            objective,
            lower,
            upper,
            self.integer.clone(),
            rows,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolutionStatus {
    Feasible,
    Infeasible,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub values: Vec<f64>,
    pub objective: f64,
    pub status: SolutionStatus,
}

impl Solution {
    /// Wraps a point, computing its objective and checking it against `inst`.
    pub fn evaluate(
        inst: &MipInstance,
        values: Vec<f64>,
        tol: Tolerances,
    ) -> Result<Self, ModelError> {
        let objective = objective_value(inst, &values)?;
        let status = match check_feasibility(inst, &values, tol)? {
            Feasibility::Feasible => SolutionStatus::Feasible,
            Feasibility::Violated(_) => SolutionStatus::Infeasible,
        };
        Ok(Solution {
            values,
            objective,
            status,
        })
    }

    pub fn is_feasible(&self) -> bool {
        self.status == SolutionStatus::Feasible
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Integrality {
        index: usize,
        value: f64,
    },
    LowerBound {
        index: usize,
        value: f64,
        bound: f64,
    },
    UpperBound {
        index: usize,
        value: f64,
        bound: f64,
    },
    Row {
        index: usize,
        activity: f64,
        sense: Sense,
        rhs: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Integrality { index, value } => {
                write!(f, "integrality violation at index {index} (value {value})")
            }
            Violation::LowerBound {
                index,
                value,
                bound,
            } => {
                write!(
                    f,
                    "lower bound violation at index {index} ({value} < {bound})"
                )
            }
            Violation::UpperBound {
                index,
                value,
                bound,
            } => {
                write!(
                    f,
                    "upper bound violation at index {index} ({value} > {bound})"
                )
            }
            Violation::Row {
                index,
                activity,
                sense,
                rhs,
            } => write!(
                f,
                "row violation at index {index} (activity {activity} {sense} {rhs} fails)"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible,
    Violated(Violation),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// Checks integrality first, then bounds, then rows, and reports the first
/// violation found in that order.
pub fn check_feasibility(
    inst: &MipInstance,
    point: &[f64],
    tol: Tolerances,
) -> Result<Feasibility, ModelError> {
    check_dim(inst, point)?;
    for j in inst.integer_indices() {
        let v = point[j];
        if !v.is_finite() || (v - v.round()).abs() > tol.int {
            return Ok(Feasibility::Violated(Violation::Integrality {
                index: j,
                value: v,
            }));
        }
    }
    for (j, &v) in point.iter().enumerate() {
        if v < inst.lower[j] - tol.feas || v.is_nan() {
            return Ok(Feasibility::Violated(Violation::LowerBound {
                index: j,
                value: v,
                bound: inst.lower[j],
            }));
        }
        if v > inst.upper[j] + tol.feas {
            return Ok(Feasibility::Violated(Violation::UpperBound {
                index: j,
                value: v,
                bound: inst.upper[j],
            }));
        }
    }
    for (i, row) in inst.rows.iter().enumerate() {
        if row.violation(point) > tol.feas {
            return Ok(Feasibility::Violated(Violation::Row {
                index: i,
                activity: row.activity(point),
                sense: row.sense,
                rhs: row.rhs,
            }));
        }
    }
    Ok(Feasibility::Feasible)
}

pub fn objective_value(inst: &MipInstance, point: &[f64]) -> Result<f64, ModelError> {
    check_dim(inst, point)?;
    Ok(inst.objective.iter().zip(point).map(|(c, x)| c * x).sum())
}

fn check_dim(inst: &MipInstance, point: &[f64]) -> Result<(), ModelError> {
    if point.len() != inst.num_vars() {
        return Err(ModelError::Dimension {
            what: "point",
            expected: inst.num_vars(),
            got: point.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{origin}: parse error at line {line}, column {column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("row `{row}` references unknown variable `{var}`")]
    UnknownVariable { row: String, var: String },
    #[error("crossed bounds at index {index} (lb {lower} > ub {upper})")]
    CrossedBounds {
        index: usize,
        lower: f64,
        upper: f64,
    },
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("maximization objectives are not supported; negate the objective instead")]
    Maximization,
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("empty series")]
    EmptySeries,
    #[error("time limit must be positive, got {0}")]
    NonPositiveTimeLimit(f64),
    #[error("series must name at least one changing component")]
    NoChangingComponents,
    #[error("variable set mismatch between `{first}` and `{other}`: {detail}")]
    VariableSetMismatch {
        first: String,
        other: String,
        detail: String,
    },
    #[error("missing instance file {0}")]
    MissingFile(PathBuf),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_var() -> MipInstance {
        MipInstance::new(
            "t",
            vec!["x".into()],
            vec![1.0],
            vec![0.0],
            vec![10.0],
            vec![true],
            vec![Row::new("c", vec![(0, 1.0)], Sense::Ge, 2.0)],
        )
        .unwrap()
    }

    #[test]
    fn feasible_point_and_objective() {
        let inst = one_var();
        let tol = Tolerances::default();
        assert_eq!(
            check_feasibility(&inst, &[2.0], tol).unwrap(),
            Feasibility::Feasible
        );
        assert_eq!(objective_value(&inst, &[2.0]).unwrap(), 2.0);
    }

    #[test]
    fn integrality_reported_first() {
        let inst = one_var();
        let res = check_feasibility(&inst, &[1.5], Tolerances::default()).unwrap();
        assert_eq!(
            res,
            Feasibility::Violated(Violation::Integrality {
                index: 0,
                value: 1.5
            })
        );
    }

    #[test]
    fn tiny_row_violation_is_tolerated() {
        let inst = MipInstance::new(
            "t",
            vec!["x".into()],
            vec![1.0],
            vec![0.0],
            vec![10.0],
            vec![false],
            vec![Row::new("c", vec![(0, 1.0)], Sense::Ge, 2.0)],
        )
        .unwrap();
        let res = check_feasibility(&inst, &[2.0 - 1e-9], Tolerances::default()).unwrap();
        assert!(res.is_feasible());
        let res = check_feasibility(&inst, &[2.0 - 1e-3], Tolerances::default()).unwrap();
        assert!(matches!(
            res,
            Feasibility::Violated(Violation::Row { index: 0, .. })
        ));
    }

    #[test]
    fn objective_examples() {
        let mk = |c: Vec<f64>| {
            let n = c.len();
            MipInstance::new(
                "o",
                (0..n).map(|j| format!("x{j}")).collect(),
                c,
                vec![f64::NEG_INFINITY; n],
                vec![f64::INFINITY; n],
                vec![false; n],
                vec![],
            )
            .unwrap()
        };
        assert_eq!(
            objective_value(&mk(vec![1.0, 2.0]), &[3.0, 4.0]).unwrap(),
            11.0
        );
        assert_eq!(
            objective_value(&mk(vec![0.0, 0.0]), &[-7.5, 4.0]).unwrap(),
            0.0
        );
        assert_eq!(objective_value(&mk(vec![-1.0]), &[5.0]).unwrap(), -5.0);
        assert!(matches!(
            objective_value(&mk(vec![-1.0]), &[5.0, 1.0]),
            Err(ModelError::Dimension { .. })
        ));
    }

    #[test]
    fn crossed_bounds_rejected() {
        let err = MipInstance::new(
            "t",
            vec!["x".into()],
            vec![1.0],
            vec![3.0],
            vec![1.0],
            vec![false],
            vec![],
        )
        .unwrap_err();
        assert!(
            err.to_string().contains("crossed bounds at index 0"),
            "{err}"
        );
    }

    #[test]
    fn integer_bounds_rounded_inward() {
        let inst = MipInstance::new(
            "t",
            vec!["x".into()],
            vec![1.0],
            vec![0.5],
            vec![3.7],
            vec![true],
            vec![],
        )
        .unwrap();
        assert_eq!((inst.lower[0], inst.upper[0]), (1.0, 3.0));
    }
}
