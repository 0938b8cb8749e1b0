//! Projection-free (Frank-Wolfe) optimization over compact convex domains,
//! with adaptive step sizes and a harness that mechanically re-verifies the
//! non-convex convergence analysis on every recorded run.
//!
//! The crate is organized around five pieces:
//!
//! * [`vector`] / [`gap`] — the ambient point type, the Frank-Wolfe gap
//!   and its round-off clamp;
//! * [`domain`] — feasible sets (simplex, box, l1-ball, atom sets) with
//!   linear minimization oracles, membership tests and diameters;
//! * [`objective`] — quadratic test objectives with analytic gradients,
//!   curvature bounds and exact minimum oracles;
//! * [`solver`] — the algorithm itself plus [`solver::check_trace`],
//!   which re-checks every inequality of the convergence proof on a
//!   recorded trace;
//! * [`config`] / [`experiment`] / [`trace_io`] / [`ratefit`] — the
//!   config-driven experiment runner behind the `fw` binary.

pub mod config;
pub mod domain;
pub mod error;
pub mod experiment;
pub mod gap;
pub mod objective;
pub mod ratefit;
pub mod solver;
pub mod trace_io;
pub mod vector;

pub use config::{parse_config, CMode, ExperimentConfig};
pub use domain::Domain;
pub use error::{Error, Result};
pub use gap::{clamp_gap, fw_gap, GapResult};
pub use objective::{CurvatureEstimate, CurvatureMethod, Objective};
pub use solver::{
    check_trace, solve, BoundReport, CheckStatus, H0Provenance, IterationRecord, RunTrace,
    SolverConfig, StepRule,
};
pub use vector::{Norm, Vector};
