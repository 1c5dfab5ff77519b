// SPDX-License-Identifier: Apache-2.0

//! A workbench for solving ordered series of similar mixed-integer programs.
//!
//! The crate bundles a compact branch-and-bound solver ([`solver`]) built on a
//! dense bounded-variable simplex ([`lp`]) with the machinery that carries
//! information from one instance of a series to the next:
//!
//! * [`reopt`] turns earlier solutions into partial-solution hints and moves
//!   pseudocost histories forward,
//! * [`tuner`] picks three binary solver toggles online with a UCB-style rule,
//! * [`turnoff`] permanently disables components that never pay off,
//! * [`harness`] scores every solve and drives whole series end to end.
//!
//! [`batch`] solves independent instances on the rayon pool (or sequentially
//! when the `parallel` feature is off).

pub mod batch;
pub mod harness;
pub mod lp;
pub mod model;
pub mod reopt;
pub mod solver;
pub mod tuner;
pub mod turnoff;

mod serde_ext;

pub use model::{MipInstance, Row, Sense, Solution, SolutionStatus, Tolerances};
pub use solver::{solve, BranchingRule, SolveOutcome, SolveStatus, SolverConfig};
