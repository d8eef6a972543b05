//! Seeded repetitions of one solver configuration.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vigraal_core::problems::{generate_instance, ProblemInstance};
use vigraal_core::solver::{
    default_rho, initial_step_size, perturb, run_observed, IterateRecord, NullClock, GOLDEN_RATIO,
};
use vigraal_core::{
    AdaptiveConfig, ConstraintSpec, FixedStepConfig, Geometry, IterateTrace, ProblemFamily,
    RunStatus, SolverConfig, SolverState, VIProblem,
};

use crate::clock::WallClock;
use crate::config::{GeometryName, RunConfig, SolverKind, Timing, GAUSSIAN_KL_LAMBDA0_FACTOR};
use crate::error::HarnessError;

/// Parameters actually used by one repetition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepSummary {
    pub rep: usize,
    pub instance_seed: u64,
    pub size: usize,
    pub sigma: f64,
    pub phi: f64,
    /// `None` for fixed-step runs.
    pub rho: Option<f64>,
    /// Fixed step size, or the adaptive `lambda_0`.
    pub lambda0: f64,
    /// Safety factor applied to an automatic `lambda_0`, when one was.
    pub lambda0_factor: Option<f64>,
    pub lipschitz: Option<f64>,
    pub status: RunStatus,
    pub failure: Option<String>,
    pub iterations: usize,
    pub final_best_residual_sq: f64,
    pub total_elapsed_ns: u64,
    pub mean_ns_per_iter: f64,
}

impl RepSummary {
    fn fill_from_trace(&mut self, trace: &IterateTrace) {
        self.status = trace.status;
        self.failure = trace.failure.as_ref().map(|e| e.to_string());
        self.iterations = trace.records.len();
        self.final_best_residual_sq = trace.best_residual_sq();
        self.total_elapsed_ns = trace.records.last().map_or(0, |r| r.elapsed_ns);
        self.mean_ns_per_iter = if self.iterations == 0 {
            0.0
        } else {
            self.total_elapsed_ns as f64 / self.iterations as f64
        };
    }
}

/// Everything one repetition produced.
#[derive(Clone, Debug)]
pub struct RepOutcome {
    pub summary: RepSummary,
    pub instance: ProblemInstance,
    /// Starting point `z_0`.
    pub z0: Vec<f64>,
    /// Starting anchor `zbar_0`.
    pub zbar0: Vec<f64>,
    pub trace: IterateTrace,
}

#[derive(Clone, Debug)]
pub struct RunArtifact {
    pub config: RunConfig,
    pub reps: Vec<RepOutcome>,
}

impl RunArtifact {
    pub fn any_numerical_failure(&self) -> bool {
        self.reps
            .iter()
            .any(|r| r.summary.status == RunStatus::NumericalFailure)
    }

    pub fn row_count(&self) -> usize {
        self.reps.iter().map(|r| r.trace.records.len()).sum()
    }
}

/// Generator for repetition `rep`: stream `rep` of the ChaCha generator seeded
/// with `seed`, so repetitions never share or shift each other's draws.
pub fn rep_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

/// Geometry of the requested kind on the instance's feasible set.
pub fn build_geometry(
    name: GeometryName,
    constraint: &ConstraintSpec,
) -> Result<Geometry, HarnessError> {
    let unsupported = || {
        HarnessError::config(format!(
            "geometry {} does not fit a {} constraint",
            name.as_str(),
            constraint.name()
        ))
    };
    Ok(match (name, constraint) {
        (GeometryName::Euclidean, c) => Geometry::euclidean(c.dim())?,
        (GeometryName::Kl, ConstraintSpec::SimplexProduct(blocks)) => {
            Geometry::negative_entropy(blocks.clone())?
        }
        (GeometryName::FermiDirac, ConstraintSpec::Box(b)) => Geometry::fermi_dirac(b.clone()),
        (GeometryName::Hellinger, ConstraintSpec::Box(b)) => Geometry::hellinger(b.clone()),
        _ => return Err(unsupported()),
    })
}

/// Standard start: the barycenter of each simplex block, the box midpoint
/// (`C/2` for `[0, C]`), or the origin.
pub fn initial_point(constraint: &ConstraintSpec) -> Vec<f64> {
    match constraint {
        ConstraintSpec::SimplexProduct(blocks) => blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.scale / b.len as f64, b.len))
            .collect(),
        ConstraintSpec::Box(b) => b
            .lo()
            .iter()
            .zip(b.hi())
            .map(|(l, h)| 0.5 * (l + h))
            .collect(),
        ConstraintSpec::Free(n) => vec![0.0; *n],
    }
}

/// Default safety factor on an automatic `lambda_0`.
pub fn default_lambda0_factor(problem: ProblemFamily, geometry: GeometryName) -> f64 {
    if problem == ProblemFamily::Gaussian && geometry == GeometryName::Kl {
        GAUSSIAN_KL_LAMBDA0_FACTOR
    } else {
        1.0
    }
}

/// Runs every repetition in order. A numerical failure inside a repetition is
/// recorded in its summary; configuration errors abort before any iteration.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunArtifact, HarnessError> {
    run_experiment_observed(cfg, |_, _, _| {})
}

/// Observer signature: repetition index, post-iteration state, record.
pub type Observer<'a> = dyn FnMut(usize, &SolverState, &IterateRecord) + 'a;

/// [`run_experiment`] with a callback after every iteration of every
/// repetition, for checks that need the iterates themselves.
pub fn run_experiment_observed<O>(
    cfg: &RunConfig,
    mut observe: O,
) -> Result<RunArtifact, HarnessError>
where
    O: FnMut(usize, &SolverState, &IterateRecord),
{
    cfg.validate()?;
    let mut reps = Vec::with_capacity(cfg.reps);
    for rep in 0..cfg.reps {
        reps.push(run_rep(cfg, rep, &mut observe)?);
    }
    Ok(RunArtifact {
        config: cfg.clone(),
        reps,
    })
}

fn run_rep(
    cfg: &RunConfig,
    rep: usize,
    observe: &mut Observer<'_>,
) -> Result<RepOutcome, HarnessError> {
    let mut rng = rep_rng(cfg.seed, rep);
    let instance_seed = rng.next_u64();
    let instance = match &cfg.instance {
        Some(inst) => inst.clone(),
        None => generate_instance(cfg.problem, cfg.size, instance_seed)?,
    };
    let problem = instance.problem()?;
    let constraint = problem.constraint().clone();
    let geom = build_geometry(cfg.geometry, &constraint)?;
    let z0 = initial_point(&constraint);
    // Both methods start from z_0 with zbar_0 a small random perturbation of it.
    let zbar0 = perturb(&z0, &constraint, cfg.perturbation, &mut rng)?;

    let mut summary = RepSummary {
        rep,
        instance_seed: instance.seed,
        size: instance.size,
        sigma: geom.sigma(),
        phi: 0.0,
        rho: None,
        lambda0: 0.0,
        lambda0_factor: None,
        lipschitz: problem.lipschitz_hint(),
        status: RunStatus::MaxIters,
        failure: None,
        iterations: 0,
        final_best_residual_sq: f64::INFINITY,
        total_elapsed_ns: 0,
        mean_ns_per_iter: 0.0,
    };

    let solver = match cfg.solver {
        SolverKind::Fixed => {
            let phi = cfg.phi.unwrap_or(GOLDEN_RATIO);
            // Without L the step bound sigma phi / (2 L) cannot be checked.
            let l = problem.lipschitz_hint().ok_or_else(|| {
                HarnessError::config(format!(
                    "fixed-step runs need a Lipschitz constant, which the {} problem does not provide",
                    cfg.problem
                ))
            })?;
            let lambda = cfg
                .lambda0
                .value()
                .unwrap_or_else(|| FixedStepConfig::max_step(geom.sigma(), phi, l));
            summary.phi = phi;
            summary.lambda0 = lambda;
            let mut c = FixedStepConfig::new(lambda, cfg.iters);
            c.phi = phi;
            c.target_residual_sq = cfg.target_residual_sq;
            SolverConfig::Fixed(c)
        }
        SolverKind::Adaptive => {
            let phi = cfg.phi.unwrap_or(1.5);
            let rho = cfg.rho.value().unwrap_or_else(|| default_rho(phi));
            let lambda0 = match cfg.lambda0.value() {
                Some(v) => v,
                None => {
                    let factor = cfg
                        .lambda0_factor
                        .unwrap_or_else(|| default_lambda0_factor(cfg.problem, cfg.geometry));
                    summary.lambda0_factor = Some(factor);
                    auto_lambda0(cfg.problem, &problem, &z0, &zbar0, factor)?.min(cfg.lambda_max)
                }
            };
            summary.phi = phi;
            summary.rho = Some(rho);
            summary.lambda0 = lambda0;
            let c = AdaptiveConfig {
                phi,
                rho,
                lambda0,
                lambda_max: cfg.lambda_max,
                max_iters: cfg.iters,
                target_residual_sq: cfg.target_residual_sq,
            };
            SolverConfig::Adaptive(c)
        }
    };

    let observe = |s: &SolverState, r: &IterateRecord| observe(rep, s, r);
    let trace = match cfg.timing {
        Timing::Off => run_observed(&problem, &geom, &solver, &z0, &zbar0, &NullClock, observe)?,
        Timing::Wall => run_observed(
            &problem,
            &geom,
            &solver,
            &z0,
            &zbar0,
            &WallClock::new(),
            observe,
        )?,
    };
    summary.fill_from_trace(&trace);
    Ok(RepOutcome {
        summary,
        instance,
        z0,
        zbar0,
        trace,
    })
}

/// Cournot runs start from `lambda_0 = 1`; the others estimate the inverse
/// local Lipschitz constant between `z_0` and `zbar_0`.
fn auto_lambda0(
    family: ProblemFamily,
    problem: &VIProblem,
    z0: &[f64],
    zbar0: &[f64],
    factor: f64,
) -> Result<f64, HarnessError> {
    Ok(match family {
        ProblemFamily::Cournot => factor,
        _ => initial_step_size(problem, z0, zbar0, factor)?,
    })
}
