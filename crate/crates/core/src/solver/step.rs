//! Single iterations of the fixed-step and adaptive Bregman golden ratio
//! algorithms.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{
    project_box_in_place, project_simplex_euclidean_in_place, project_simplex_kl_in_place,
    Geometry, GeometryKind, OpCount, SimplexBlock, INTERIOR_MARGIN,
};
use crate::math::{self, sqrt};
use crate::vi::{ConstraintSpec, VIProblem};

use super::{AdaptiveConfig, FixedStepConfig, SolverState};

/// How `argmin <F(z_k), z> + g(z) + D_h(z, zbar_k) / lambda` is evaluated for an
/// admitted (geometry, constraint) pair.
#[derive(Clone, Debug, PartialEq)]
pub enum ProxRule {
    /// Negative entropy on simplices: dual step, then blockwise normalization.
    EntropySimplex(Vec<SimplexBlock>),
    /// Euclidean on simplices: gradient step, then sort-and-threshold projection.
    EuclideanSimplex(Vec<SimplexBlock>),
    /// Fermi-Dirac or Hellinger on their own box: the dual step alone is feasible.
    BoxEntropy,
    /// Euclidean on a box: gradient step, then clamp.
    EuclideanBox { lo: Vec<f64>, hi: Vec<f64> },
    /// No constraint: dual step only.
    Unconstrained,
}

impl ProxRule {
    /// Resolves the proximal realization, rejecting pairings that have none.
    pub fn resolve(geom: &Geometry, constraint: &ConstraintSpec) -> Result<ProxRule> {
        let unsupported = || Error::UnsupportedPairing {
            geometry: geom.kind().name(),
            constraint: constraint.name(),
        };
        if geom.dim() != constraint.dim() {
            return Err(Error::DimensionMismatch {
                expected: constraint.dim(),
                found: geom.dim(),
            });
        }
        match (geom.kind(), constraint) {
            (_, ConstraintSpec::Free(_)) => Ok(ProxRule::Unconstrained),
            (GeometryKind::Euclidean, ConstraintSpec::SimplexProduct(blocks)) => {
                Ok(ProxRule::EuclideanSimplex(blocks.clone()))
            }
            (GeometryKind::Euclidean, ConstraintSpec::Box(b)) => Ok(ProxRule::EuclideanBox {
                lo: b.lo().to_vec(),
                hi: b.hi().to_vec(),
            }),
            (GeometryKind::NegativeEntropy, ConstraintSpec::SimplexProduct(blocks)) => {
                let geom_blocks = geom.blocks().unwrap_or_default();
                let same_layout = geom_blocks.len() == blocks.len()
                    && geom_blocks.iter().zip(blocks).all(|(g, c)| g.len == c.len);
                if !same_layout {
                    return Err(unsupported());
                }
                Ok(ProxRule::EntropySimplex(blocks.clone()))
            }
            (GeometryKind::FermiDirac | GeometryKind::Hellinger, ConstraintSpec::Box(b)) => {
                // dom h must coincide with the box for the constraint to be implicit.
                if geom.bounds() == Some(b) {
                    Ok(ProxRule::BoxEntropy)
                } else {
                    Err(unsupported())
                }
            }
            _ => Err(unsupported()),
        }
    }

    /// Maps `dual = ∇h(zbar) - lambda F(z)` to the next iterate.
    ///
    /// `dual` is consumed as scratch; `work` must have the same length.
    pub fn apply(
        &self,
        geom: &Geometry,
        dual: &mut [f64],
        work: &mut [f64],
        out: &mut [f64],
    ) -> Result<()> {
        match self {
            ProxRule::Unconstrained | ProxRule::BoxEntropy => geom.gradient_inverse_into(dual, out),
            ProxRule::EuclideanBox { lo, hi } => {
                out.copy_from_slice(dual);
                project_box_in_place(out, lo, hi);
                Ok(())
            }
            ProxRule::EuclideanSimplex(blocks) => {
                out.copy_from_slice(dual);
                let mut start = 0;
                let mut ops = OpCount::default();
                for block in blocks {
                    let end = start + block.len;
                    project_simplex_euclidean_in_place(
                        &mut out[start..end],
                        block.scale,
                        &mut work[start..end],
                        &mut ops,
                    )?;
                    start = end;
                }
                Ok(())
            }
            ProxRule::EntropySimplex(blocks) => {
                // Normalization is invariant to a common factor, so shifting each
                // block's dual coordinates by their maximum changes nothing but
                // keeps the exponentials in range.
                let mut start = 0;
                for block in blocks {
                    let end = start + block.len;
                    let seg = &mut dual[start..end];
                    let top = seg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    seg.iter_mut().for_each(|t| *t -= top);
                    start = end;
                }
                geom.gradient_inverse_into(dual, out)?;
                let mut start = 0;
                let mut ops = OpCount::default();
                for block in blocks {
                    let end = start + block.len;
                    project_simplex_kl_in_place(&mut out[start..end], block.scale, &mut ops)?;
                    start = end;
                }
                // Normalization can push a decaying coordinate back under the
                // gradient's boundary guard.
                out.iter_mut().for_each(|x| *x = x.max(INTERIOR_MARGIN));
                Ok(())
            }
        }
    }
}

/// Adaptive step size
/// `min{ rho lambda_prev, sigma phi theta_prev / (4 lambda_prev) |dz|^2 / |dF|^2, lambda_max }`.
///
/// The middle term is `+inf` when `dF = 0`.
#[allow(clippy::too_many_arguments)]
pub fn compute_step_size(
    lambda_prev: f64,
    theta_prev: f64,
    z: &[f64],
    z_prev: &[f64],
    f_z: &[f64],
    f_z_prev: &[f64],
    sigma: f64,
    phi: f64,
    rho: f64,
    lambda_max: f64,
) -> f64 {
    step_size_from_norms(
        lambda_prev,
        theta_prev,
        math::dist_sq(z, z_prev),
        math::dist_sq(f_z, f_z_prev),
        sigma,
        phi,
        rho,
        lambda_max,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn step_size_from_norms(
    lambda_prev: f64,
    theta_prev: f64,
    dz_sq: f64,
    df_sq: f64,
    sigma: f64,
    phi: f64,
    rho: f64,
    lambda_max: f64,
) -> f64 {
    let local = if df_sq == 0.0 {
        f64::INFINITY
    } else {
        sigma * phi * theta_prev / (4.0 * lambda_prev) * dz_sq / df_sq
    };
    (rho * lambda_prev).min(local).min(lambda_max)
}

/// `J = (∇h(zbar) - ∇h(z_next)) / lambda + F(z_next) - F(z)`.
pub fn residual_j(
    zbar: &[f64],
    z_next: &[f64],
    f_z: &[f64],
    f_z_next: &[f64],
    lambda: f64,
    geom: &Geometry,
) -> Result<Vec<f64>> {
    let mut out = geom.gradient(zbar)?;
    let grad_next = geom.gradient(z_next)?;
    for i in 0..out.len() {
        out[i] = (out[i] - grad_next[i]) / lambda + (f_z_next[i] - f_z[i]);
    }
    Ok(out)
}

/// Per-iteration output of a step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    /// Iteration index `k` of the step that produced `z_{k+1}`.
    pub iter: usize,
    pub lambda: f64,
    pub theta: f64,
    pub theta_prev: f64,
    /// `|J_k|^2`.
    pub residual_sq: f64,
    /// `|z_k - z_{k-1}|`, the difference the step size was computed from.
    pub step_norm: f64,
    /// `|F(z_k) - F(z_{k-1})|`.
    pub operator_diff_norm: f64,
}

/// Scratch buffers reused across iterations.
#[derive(Clone, Debug)]
pub(crate) struct Workspace {
    grad: Vec<f64>,
    dual: Vec<f64>,
    work: Vec<f64>,
    z_next: Vec<f64>,
    f_next: Vec<f64>,
    zbar_next: Vec<f64>,
}

impl Workspace {
    pub(crate) fn new(n: usize) -> Self {
        Workspace {
            grad: vec![0.0; n],
            dual: vec![0.0; n],
            work: vec![0.0; n],
            z_next: vec![0.0; n],
            f_next: vec![0.0; n],
            zbar_next: vec![0.0; n],
        }
    }
}

fn failure(iter: usize, err: Error) -> Error {
    match err {
        Error::NumericalFailure { .. } => err,
        other => Error::NumericalFailure {
            iter,
            reason: format!("{other}"),
        },
    }
}

/// Shared body of both algorithms once `lambda_k` is known. Advances `state`
/// and returns `|J_k|^2`.
fn advance(
    state: &mut SolverState,
    problem: &VIProblem,
    geom: &Geometry,
    rule: &ProxRule,
    phi: f64,
    lambda: f64,
    ws: &mut Workspace,
) -> Result<f64> {
    let iter = state.iter;
    let fail = |e| failure(iter, e);

    // zbar_k = (∇h)^{-1}(((phi - 1) ∇h(z_k) + ∇h(zbar_{k-1})) / phi)
    geom.mirror_combine_into(&state.z, &state.zbar, phi, &mut ws.dual, &mut ws.zbar_next)
        .map_err(fail)?;

    // z_{k+1} = prox(∇h(zbar_k) - lambda F(z_k))
    geom.gradient_into(&ws.zbar_next, &mut ws.grad)
        .map_err(fail)?;
    for ((d, g), f) in ws.dual.iter_mut().zip(&ws.grad).zip(&state.f_z) {
        *d = g - lambda * f;
    }
    rule.apply(geom, &mut ws.dual, &mut ws.work, &mut ws.z_next)
        .map_err(fail)?;
    if let Some(i) = math::first_non_finite(&ws.z_next) {
        return Err(fail(Error::NonFinite { index: i }));
    }
    problem
        .eval_into(&ws.z_next, &mut ws.f_next)
        .map_err(fail)?;
    if let Some(i) = math::first_non_finite(&ws.f_next) {
        return Err(fail(Error::NonFinite { index: i }));
    }

    // J_k, with ∇h(zbar_k) already in ws.grad.
    geom.gradient_into(&ws.z_next, &mut ws.work).map_err(fail)?;
    let mut residual_sq = 0.0;
    for i in 0..ws.grad.len() {
        let j = (ws.grad[i] - ws.work[i]) / lambda + (ws.f_next[i] - state.f_z[i]);
        residual_sq += j * j;
    }

    // Shift: (z_{k-1}, z_k) <- (z_k, z_{k+1}) and likewise for F and zbar.
    core::mem::swap(&mut state.z_prev, &mut state.z);
    core::mem::swap(&mut state.z, &mut ws.z_next);
    core::mem::swap(&mut state.f_z_prev, &mut state.f_z);
    core::mem::swap(&mut state.f_z, &mut ws.f_next);
    core::mem::swap(&mut state.zbar, &mut ws.zbar_next);
    state.iter += 1;
    Ok(residual_sq)
}

/// One iteration of the fixed-step algorithm.
pub fn bgraal_step(
    state: &mut SolverState,
    problem: &VIProblem,
    geom: &Geometry,
    cfg: &FixedStepConfig,
) -> Result<StepRecord> {
    let rule = ProxRule::resolve(geom, problem.constraint())?;
    let mut ws = Workspace::new(problem.dim());
    bgraal_step_with(state, problem, geom, cfg, &rule, &mut ws)
}

pub(crate) fn bgraal_step_with(
    state: &mut SolverState,
    problem: &VIProblem,
    geom: &Geometry,
    cfg: &FixedStepConfig,
    rule: &ProxRule,
    ws: &mut Workspace,
) -> Result<StepRecord> {
    let iter = state.iter;
    let step_norm = sqrt(math::dist_sq(&state.z, &state.z_prev));
    let operator_diff_norm = sqrt(math::dist_sq(&state.f_z, &state.f_z_prev));
    let residual_sq = advance(state, problem, geom, rule, cfg.phi, cfg.lambda, ws)?;
    state.lambda_prev = cfg.lambda;
    state.lambda = cfg.lambda;
    let theta_prev = state.theta;
    state.theta = cfg.phi;
    Ok(StepRecord {
        iter,
        lambda: cfg.lambda,
        theta: state.theta,
        theta_prev,
        residual_sq,
        step_norm,
        operator_diff_norm,
    })
}

/// One iteration of the adaptive algorithm.
pub fn bagraal_step(
    state: &mut SolverState,
    problem: &VIProblem,
    geom: &Geometry,
    cfg: &AdaptiveConfig,
) -> Result<StepRecord> {
    let rule = ProxRule::resolve(geom, problem.constraint())?;
    let mut ws = Workspace::new(problem.dim());
    bagraal_step_with(state, problem, geom, cfg, &rule, &mut ws)
}

pub(crate) fn bagraal_step_with(
    state: &mut SolverState,
    problem: &VIProblem,
    geom: &Geometry,
    cfg: &AdaptiveConfig,
    rule: &ProxRule,
    ws: &mut Workspace,
) -> Result<StepRecord> {
    let iter = state.iter;
    let dz_sq = math::dist_sq(&state.z, &state.z_prev);
    let df_sq = math::dist_sq(&state.f_z, &state.f_z_prev);
    let lambda_prev = state.lambda;
    let theta_prev = state.theta;
    let lambda = step_size_from_norms(
        lambda_prev,
        theta_prev,
        dz_sq,
        df_sq,
        geom.sigma(),
        cfg.phi,
        cfg.rho,
        cfg.lambda_max,
    );
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::NumericalFailure {
            iter,
            reason: format!("step size collapsed to {lambda}"),
        });
    }
    let residual_sq = advance(state, problem, geom, rule, cfg.phi, lambda, ws)?;
    state.lambda_prev = lambda_prev;
    state.lambda = lambda;
    state.theta = lambda * cfg.phi / lambda_prev;
    Ok(StepRecord {
        iter,
        lambda,
        theta: state.theta,
        theta_prev,
        residual_sq,
        step_norm: sqrt(dz_sq),
        operator_diff_norm: sqrt(df_sq),
    })
}
