//! Experiment harness for the `vigraal` solvers: seeded instance generation,
//! solver dispatch, CSV traces with JSON sidecars, and oracle self-checks.

// `!(x > 0.0)` is how NaN gets rejected along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod clock;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{AutoOr, GeometryName, RunConfig, SolverKind, Timing};
pub use error::HarnessError;
pub use experiment::{
    run_experiment, run_experiment_observed, RepOutcome, RepSummary, RunArtifact,
};
pub use output::{emit_csv, render_csv};
