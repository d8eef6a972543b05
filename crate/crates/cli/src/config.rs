//! Experiment configuration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use vigraal_core::problems::ProblemInstance;
use vigraal_core::ProblemFamily;

use crate::error::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryName {
    Euclidean,
    Kl,
    FermiDirac,
    Hellinger,
}

impl GeometryName {
    pub fn as_str(self) -> &'static str {
        match self {
            GeometryName::Euclidean => "euclidean",
            GeometryName::Kl => "kl",
            GeometryName::FermiDirac => "fermi-dirac",
            GeometryName::Hellinger => "hellinger",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Fixed,
    Adaptive,
}

/// Whether `elapsed_ns` holds wall-clock time or zeros.
///
/// Wall-clock timings differ between runs, so only `Off` gives byte-identical
/// output for identical flags.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum Timing {
    #[default]
    Off,
    Wall,
}

/// `auto` or an explicit positive number.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AutoOr {
    #[default]
    Auto,
    Value(f64),
}

impl AutoOr {
    pub fn value(self) -> Option<f64> {
        match self {
            AutoOr::Auto => None,
            AutoOr::Value(v) => Some(v),
        }
    }
}

impl FromStr for AutoOr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(AutoOr::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(AutoOr::Value(v)),
            _ => Err(format!("expected `auto` or a positive number, got `{s}`")),
        }
    }
}

impl fmt::Display for AutoOr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutoOr::Auto => f.write_str("auto"),
            AutoOr::Value(v) => write!(f, "{v}"),
        }
    }
}

/// Relative magnitude of the seeded perturbation that produces `zbar_0`.
pub const DEFAULT_PERTURBATION: f64 = 1e-3;

/// λ₀ safety factor applied to KL runs on the Gaussian channel family.
pub const GAUSSIAN_KL_LAMBDA0_FACTOR: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemFamily,
    pub geometry: GeometryName,
    pub solver: SolverKind,
    pub size: usize,
    pub iters: usize,
    pub reps: usize,
    pub seed: u64,
    /// `None` picks 1.5 for adaptive runs and the golden ratio for fixed-step runs.
    pub phi: Option<f64>,
    pub rho: AutoOr,
    /// For fixed-step runs this is the step size itself.
    pub lambda0: AutoOr,
    /// `None` picks 1e-2 for KL Gaussian runs and 1 otherwise.
    pub lambda0_factor: Option<f64>,
    pub lambda_max: f64,
    pub target_residual_sq: f64,
    pub perturbation: f64,
    pub timing: Timing,
    /// Replay a stored instance instead of generating one per repetition.
    pub instance: Option<ProblemInstance>,
}

impl RunConfig {
    pub fn new(
        problem: ProblemFamily,
        geometry: GeometryName,
        solver: SolverKind,
        size: usize,
        iters: usize,
    ) -> Self {
        RunConfig {
            problem,
            geometry,
            solver,
            size,
            iters,
            reps: 10,
            seed: 0,
            phi: None,
            rho: AutoOr::Auto,
            lambda0: AutoOr::Auto,
            lambda0_factor: None,
            lambda_max: 1e6,
            target_residual_sq: 0.0,
            perturbation: DEFAULT_PERTURBATION,
            timing: Timing::Off,
            instance: None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.reps == 0 {
            return Err(HarnessError::config("at least one repetition is required"));
        }
        if self.size == 0 && self.instance.is_none() {
            return Err(HarnessError::config("size must be positive"));
        }
        if let Some(inst) = &self.instance {
            if inst.family() != self.problem {
                return Err(HarnessError::config(format!(
                    "instance file holds a {} instance but --problem is {}",
                    inst.family(),
                    self.problem
                )));
            }
        }
        if !(self.lambda_max > 0.0 && self.lambda_max.is_finite()) {
            return Err(HarnessError::config(
                "lambda-max must be positive and finite",
            ));
        }
        if matches!(self.lambda0_factor, Some(f) if !(f > 0.0 && f.is_finite())) {
            return Err(HarnessError::config(
                "lambda0-factor must be positive and finite",
            ));
        }
        if !(self.perturbation > 0.0 && self.perturbation < 1.0) {
            return Err(HarnessError::config("perturbation must lie in (0, 1)"));
        }
        if !(self.target_residual_sq >= 0.0) {
            return Err(HarnessError::config("target residual must be nonnegative"));
        }
        admissible(self.problem, self.geometry)
    }
}

/// Geometries with a proximal realization for each family's feasible set.
pub fn admissible(problem: ProblemFamily, geometry: GeometryName) -> Result<(), HarnessError> {
    use GeometryName::*;
    let ok = match problem {
        ProblemFamily::MatrixGame | ProblemFamily::Gaussian => matches!(geometry, Euclidean | Kl),
        ProblemFamily::Cournot => matches!(geometry, Euclidean | FermiDirac | Hellinger),
    };
    if ok {
        Ok(())
    } else {
        Err(HarnessError::config(format!(
            "geometry {} is not available for the {} problem",
            geometry.as_str(),
            problem
        )))
    }
}
