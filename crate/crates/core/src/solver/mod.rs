//! Iteration loops of the fixed-step and adaptive Bregman golden ratio
//! algorithms.
//!
//! Both methods keep an averaged point `zbar_k` formed in the dual space and
//! take a Bregman proximal step from it:
//!
//! ```text
//! zbar_k  = (∇h)^{-1}( ((phi - 1) ∇h(z_k) + ∇h(zbar_{k-1})) / phi )
//! z_{k+1} = argmin_z <F(z_k), z> + g(z) + D_h(z, zbar_k) / lambda_k
//! ```
//!
//! The fixed-step method uses a constant `lambda <= sigma phi / (2 L)`. The
//! adaptive method estimates the inverse local Lipschitz constant of `F` from
//! the last two iterates, see [`compute_step_size`].

mod step;

pub use step::{bagraal_step, bgraal_step, compute_step_size, residual_j, ProxRule, StepRecord};

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Error, Result};
use crate::geometry::{project_simplex_kl_in_place, Geometry, OpCount};
use crate::math;
use crate::vi::{ConstraintSpec, VIProblem};

use step::{bagraal_step_with, bgraal_step_with, Workspace};

/// `(1 + sqrt 5) / 2`.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Upper end of the admissible `rho` bracket, `1/phi + 1/phi^2`.
pub fn default_rho(phi: f64) -> f64 {
    1.0 / phi + 1.0 / (phi * phi)
}

/// Relative slack on the `lambda <= sigma phi / (2 L)` check, for step sizes
/// that were computed from the same formula.
const STEP_BOUND_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedStepConfig {
    pub lambda: f64,
    pub phi: f64,
    pub max_iters: usize,
    pub target_residual_sq: f64,
}

impl FixedStepConfig {
    pub fn new(lambda: f64, max_iters: usize) -> Self {
        FixedStepConfig {
            lambda,
            phi: GOLDEN_RATIO,
            max_iters,
            target_residual_sq: 0.0,
        }
    }

    /// The largest admissible step, `sigma phi / (2 L)`.
    pub fn max_step(sigma: f64, phi: f64, lipschitz: f64) -> f64 {
        sigma * phi / (2.0 * lipschitz)
    }

    pub fn validate(&self, sigma: f64, lipschitz: Option<f64>) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(invalid("step size must be positive and finite"));
        }
        if !(self.phi > 1.0 && self.phi <= GOLDEN_RATIO) {
            return Err(invalid(format!(
                "phi = {} must lie in (1, golden ratio]",
                self.phi
            )));
        }
        if !(self.target_residual_sq >= 0.0) {
            return Err(invalid("target residual must be nonnegative"));
        }
        if let Some(l) = lipschitz {
            let bound = FixedStepConfig::max_step(sigma, self.phi, l);
            if self.lambda > bound * (1.0 + STEP_BOUND_SLACK) {
                return Err(invalid(format!(
                    "step size {} exceeds sigma phi / (2 L) = {bound}",
                    self.lambda
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub phi: f64,
    pub rho: f64,
    pub lambda0: f64,
    pub lambda_max: f64,
    pub max_iters: usize,
    pub target_residual_sq: f64,
}

impl AdaptiveConfig {
    /// `phi = 1.5`, `rho = 1/phi + 1/phi^2`, `lambda_max = 1e6`.
    pub fn new(lambda0: f64, max_iters: usize) -> Self {
        let phi = 1.5;
        AdaptiveConfig {
            phi,
            rho: default_rho(phi),
            lambda0,
            lambda_max: 1e6,
            max_iters,
            target_residual_sq: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi > 1.0 && self.phi <= GOLDEN_RATIO) {
            return Err(invalid(format!(
                "phi = {} must lie in (1, golden ratio]",
                self.phi
            )));
        }
        let rho_max = default_rho(self.phi);
        if !(self.rho >= 1.0 && self.rho <= rho_max * (1.0 + 1e-15)) {
            return Err(invalid(format!(
                "rho = {} must lie in [1, {rho_max}]",
                self.rho
            )));
        }
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return Err(invalid("initial step size must be positive and finite"));
        }
        if !(self.lambda_max >= self.lambda0 && self.lambda_max.is_finite()) {
            return Err(invalid("lambda_max must be finite and at least lambda0"));
        }
        if !(self.target_residual_sq >= 0.0) {
            return Err(invalid("target residual must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SolverConfig {
    Fixed(FixedStepConfig),
    Adaptive(AdaptiveConfig),
}

impl SolverConfig {
    pub fn max_iters(&self) -> usize {
        match self {
            SolverConfig::Fixed(c) => c.max_iters,
            SolverConfig::Adaptive(c) => c.max_iters,
        }
    }

    pub fn target_residual_sq(&self) -> f64 {
        match self {
            SolverConfig::Fixed(c) => c.target_residual_sq,
            SolverConfig::Adaptive(c) => c.target_residual_sq,
        }
    }
}

/// Iterates and cached operator values carried between iterations.
///
/// Before iteration `k`: `z = z_k`, `z_prev = z_{k-1}`, `zbar = zbar_{k-1}`,
/// `f_z = F(z_k)`, `f_z_prev = F(z_{k-1})`, `lambda = lambda_{k-1}`,
/// `theta = theta_{k-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub z: Vec<f64>,
    pub zbar: Vec<f64>,
    pub z_prev: Vec<f64>,
    pub f_z: Vec<f64>,
    pub f_z_prev: Vec<f64>,
    pub lambda: f64,
    pub lambda_prev: f64,
    pub theta: f64,
    pub iter: usize,
}

fn check_start(problem: &VIProblem, geom: &Geometry, points: [&[f64]; 2]) -> Result<()> {
    for p in points {
        check_len(problem.dim(), p.len())?;
        // Gradients only exist on the interior of dom h.
        geom.gradient(p)?;
    }
    Ok(())
}

impl SolverState {
    /// Fixed-step start from `z_1` and `zbar_0`.
    pub fn fixed(
        problem: &VIProblem,
        geom: &Geometry,
        z1: &[f64],
        zbar0: &[f64],
        lambda: f64,
    ) -> Result<Self> {
        check_start(problem, geom, [z1, zbar0])?;
        let f_z = problem.eval(z1)?;
        Ok(SolverState {
            z: z1.to_vec(),
            zbar: zbar0.to_vec(),
            z_prev: z1.to_vec(),
            f_z_prev: f_z.clone(),
            f_z,
            lambda,
            lambda_prev: lambda,
            theta: 1.0,
            iter: 1,
        })
    }

    /// Adaptive start: `z_1 = zbar_0`, `theta_0 = 1`, with `z_0` kept as the
    /// previous iterate for the first step-size estimate.
    pub fn adaptive(
        problem: &VIProblem,
        geom: &Geometry,
        z0: &[f64],
        zbar0: &[f64],
        lambda0: f64,
    ) -> Result<Self> {
        check_start(problem, geom, [z0, zbar0])?;
        Ok(SolverState {
            z: zbar0.to_vec(),
            zbar: zbar0.to_vec(),
            z_prev: z0.to_vec(),
            f_z: problem.eval(zbar0)?,
            f_z_prev: problem.eval(z0)?,
            lambda: lambda0,
            lambda_prev: lambda0,
            theta: 1.0,
            iter: 1,
        })
    }
}

/// `factor * |z0 - zbar0|^2 / |F(z0) - F(zbar0)|^2`, or `1` when the operator
/// difference vanishes.
pub fn initial_step_size(
    problem: &VIProblem,
    z0: &[f64],
    zbar0: &[f64],
    factor: f64,
) -> Result<f64> {
    let f0 = problem.eval(z0)?;
    let f1 = problem.eval(zbar0)?;
    let df = math::dist_sq(&f0, &f1);
    if df == 0.0 {
        return Ok(1.0);
    }
    Ok(factor * math::dist_sq(z0, zbar0) / df)
}

/// Multiplicative perturbation `z_i (1 + rel u_i)` with `u_i` uniform in
/// `[-1, 1]`, renormalized onto each simplex block and kept inside boxes.
pub fn perturb<R: Rng + ?Sized>(
    z: &[f64],
    constraint: &ConstraintSpec,
    rel: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_len(constraint.dim(), z.len())?;
    let mut out: Vec<f64> = z
        .iter()
        .map(|&zi| zi * (1.0 + rel * rng.random_range(-1.0..=1.0)))
        .collect();
    match constraint {
        ConstraintSpec::SimplexProduct(blocks) => {
            let mut start = 0;
            let mut ops = OpCount::default();
            for b in blocks {
                project_simplex_kl_in_place(&mut out[start..start + b.len], b.scale, &mut ops)?;
                start += b.len;
            }
        }
        ConstraintSpec::Box(b) => {
            for (i, x) in out.iter_mut().enumerate() {
                if !(*x > b.lo()[i] && *x < b.hi()[i]) {
                    *x = z[i];
                }
            }
        }
        ConstraintSpec::Free(_) => {}
    }
    Ok(out)
}

/// Monotone clock in nanoseconds. The core crate never reads time itself.
pub trait Clock {
    fn now_ns(&self) -> u64;
}

/// A clock that always reads zero, for fully reproducible traces.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn now_ns(&self) -> u64 {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    MaxIters,
    NumericalFailure,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterateRecord {
    pub iter: usize,
    pub lambda: f64,
    pub theta: f64,
    pub residual_sq: f64,
    /// `min_{i <= k} |J_i|^2`.
    pub best_residual_sq: f64,
    /// Cumulative nanoseconds since the start of the run.
    pub elapsed_ns: u64,
    pub theta_prev: f64,
    pub step_norm: f64,
    pub operator_diff_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterateTrace {
    pub records: Vec<IterateRecord>,
    pub status: RunStatus,
    pub failure: Option<Error>,
    /// Last iterate `z_{k+1}` reached.
    pub final_z: Vec<f64>,
    /// Last averaged point `zbar_k`.
    pub final_zbar: Vec<f64>,
}

impl IterateTrace {
    pub fn best_residual_sq(&self) -> f64 {
        self.records
            .last()
            .map_or(f64::INFINITY, |r| r.best_residual_sq)
    }
}

/// Runs either algorithm from `(z0, zbar0)` until the best residual reaches
/// the target or the iteration budget is spent.
///
/// For the fixed-step method `z0` is the first iterate `z_1`; for the adaptive
/// method the first iterate is `zbar0` and `z0` seeds the step-size estimate.
/// Configuration problems are returned as errors before any iteration runs; a
/// numerical failure during the run ends it with a partial trace.
pub fn run<C: Clock + ?Sized>(
    problem: &VIProblem,
    geom: &Geometry,
    cfg: &SolverConfig,
    z0: &[f64],
    zbar0: &[f64],
    clock: &C,
) -> Result<IterateTrace> {
    run_observed(problem, geom, cfg, z0, zbar0, clock, |_, _| {})
}

/// [`run`] with a callback after every completed iteration. The state then
/// holds `z_{k+1}` in `z` and `zbar_k` in `zbar`.
pub fn run_observed<C, O>(
    problem: &VIProblem,
    geom: &Geometry,
    cfg: &SolverConfig,
    z0: &[f64],
    zbar0: &[f64],
    clock: &C,
    mut observe: O,
) -> Result<IterateTrace>
where
    C: Clock + ?Sized,
    O: FnMut(&SolverState, &IterateRecord),
{
    let rule = ProxRule::resolve(geom, problem.constraint())?;
    let mut state = match cfg {
        SolverConfig::Fixed(c) => {
            c.validate(geom.sigma(), problem.lipschitz_hint())?;
            SolverState::fixed(problem, geom, z0, zbar0, c.lambda)?
        }
        SolverConfig::Adaptive(c) => {
            c.validate()?;
            SolverState::adaptive(problem, geom, z0, zbar0, c.lambda0)?
        }
    };

    let max_iters = cfg.max_iters();
    let target = cfg.target_residual_sq();
    let mut records = Vec::with_capacity(max_iters);
    let mut ws = Workspace::new(problem.dim());
    let mut best = f64::INFINITY;
    let mut status = RunStatus::MaxIters;
    let mut failure = None;
    let start = clock.now_ns();

    for _ in 0..max_iters {
        let step = match cfg {
            SolverConfig::Fixed(c) => {
                bgraal_step_with(&mut state, problem, geom, c, &rule, &mut ws)
            }
            SolverConfig::Adaptive(c) => {
                bagraal_step_with(&mut state, problem, geom, c, &rule, &mut ws)
            }
        };
        let rec = match step {
            Ok(rec) if rec.residual_sq.is_finite() => rec,
            Ok(rec) => {
                status = RunStatus::NumericalFailure;
                failure = Some(Error::NumericalFailure {
                    iter: rec.iter,
                    reason: format!("residual is {}", rec.residual_sq),
                });
                break;
            }
            Err(e) => {
                status = RunStatus::NumericalFailure;
                failure = Some(e);
                break;
            }
        };
        best = best.min(rec.residual_sq);
        records.push(IterateRecord {
            iter: rec.iter,
            lambda: rec.lambda,
            theta: rec.theta,
            residual_sq: rec.residual_sq,
            best_residual_sq: best,
            elapsed_ns: clock.now_ns().saturating_sub(start),
            theta_prev: rec.theta_prev,
            step_norm: rec.step_norm,
            operator_diff_norm: rec.operator_diff_norm,
        });
        observe(&state, records.last().expect("record was just pushed"));
        if best <= target {
            status = RunStatus::Converged;
            break;
        }
    }

    Ok(IterateTrace {
        records,
        status,
        failure,
        final_z: state.z,
        final_zbar: state.zbar,
    })
}
