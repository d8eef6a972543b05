//! CSV traces and JSON sidecars.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{AutoOr, GeometryName, RunConfig, SolverKind, Timing};
use crate::error::HarnessError;
use crate::experiment::{RepSummary, RunArtifact};

pub const CSV_HEADER: &str = "rep,iter,lambda,theta,residual_sq,best_residual_sq,elapsed_ns";

/// Scientific notation with 17 significant digits, which round-trips every f64.
fn push_f64(out: &mut String, v: f64) {
    let _ = write!(out, "{v:.16e}");
}

/// The CSV text for an artifact, rows ordered by `(rep, iter)`.
pub fn render_csv(artifact: &RunArtifact) -> String {
    let mut out = String::with_capacity(64 * (artifact.row_count() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for rep in &artifact.reps {
        for r in &rep.trace.records {
            let _ = write!(out, "{},{},", rep.summary.rep, r.iter);
            push_f64(&mut out, r.lambda);
            out.push(',');
            push_f64(&mut out, r.theta);
            out.push(',');
            push_f64(&mut out, r.residual_sq);
            out.push(',');
            push_f64(&mut out, r.best_residual_sq);
            let _ = writeln!(out, ",{}", r.elapsed_ns);
        }
    }
    out
}

pub fn emit_csv(artifact: &RunArtifact, path: &Path) -> Result<(), HarnessError> {
    fs::write(path, render_csv(artifact)).map_err(|e| HarnessError::io(path, e))
}

/// Location of the JSON sidecar for a CSV path: `run.csv` becomes `run.meta.json`.
pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub problem: String,
    pub geometry: GeometryName,
    pub solver: SolverKind,
    pub size: usize,
    pub iters: usize,
    pub reps: usize,
    pub seed: u64,
    pub phi: Option<f64>,
    pub rho: AutoOr,
    pub lambda0: AutoOr,
    pub lambda0_factor: Option<f64>,
    pub lambda_max: f64,
    pub target_residual_sq: f64,
    pub perturbation: f64,
    pub timing: Timing,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(c: &RunConfig) -> Self {
        ConfigEcho {
            problem: c.problem.to_string(),
            geometry: c.geometry,
            solver: c.solver,
            size: c.size,
            iters: c.iters,
            reps: c.reps,
            seed: c.seed,
            phi: c.phi,
            rho: c.rho,
            lambda0: c.lambda0,
            lambda0_factor: c.lambda0_factor,
            lambda_max: c.lambda_max,
            target_residual_sq: c.target_residual_sq,
            perturbation: c.perturbation,
            timing: c.timing,
        }
    }
}

/// Where each repetition's instance came from.
#[derive(Debug, Serialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum InstanceRef {
    /// Reproduced by `vigraal gen` with the problem, size and per-rep seed.
    Generated,
    File {
        path: String,
    },
}

#[derive(Debug, Serialize)]
pub struct RunMeta<'a> {
    pub config: ConfigEcho,
    pub instance: InstanceRef,
    pub csv: String,
    pub rows: usize,
    pub reps: Vec<&'a RepSummary>,
}

pub fn run_meta<'a>(artifact: &'a RunArtifact, csv: &Path, instance: InstanceRef) -> RunMeta<'a> {
    RunMeta {
        config: ConfigEcho::from(&artifact.config),
        instance,
        csv: csv.display().to_string(),
        rows: artifact.row_count(),
        reps: artifact.reps.iter().map(|r| &r.summary).collect(),
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}
