//! Benchmark problem families with closed-form operators and seeded
//! instance generators.
//!
//! * [`matrix_game`] -- server placement on a random graph, fixed-step solver.
//! * [`gaussian`] -- worst-case power allocation over Gaussian channels.
//! * [`cournot`] -- Cournot oligopoly on a box of capacities.
//!
//! Instances serialize to a flat JSON document tagged by `family`:
//!
//! ```text
//! { "family": "cournot", "size": 5, "seed": 7,
//!   "firms": 5, "a": ..., "b": ..., "cost": [...], "capacity": [...] }
//! ```
//!
//! Floats round-trip exactly through JSON, so a stored document reproduces a
//! run bit for bit.

pub mod cournot;
pub mod gaussian;
pub mod graph;
pub mod matrix_game;

use core::fmt;
use core::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::vi::{ConstraintSpec, VIProblem};

pub use cournot::{cournot_problem, CournotInstance, CournotSampling};
pub use gaussian::{gaussian_capacity, gaussian_problem, GaussianChannelInstance};
pub use graph::{graph_distance_matrix, Graph};
pub use matrix_game::{matrix_game_problem, MatrixGameInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemFamily {
    MatrixGame,
    Gaussian,
    Cournot,
}

impl ProblemFamily {
    pub fn name(self) -> &'static str {
        match self {
            ProblemFamily::MatrixGame => "matrix-game",
            ProblemFamily::Gaussian => "gaussian",
            ProblemFamily::Cournot => "cournot",
        }
    }
}

impl fmt::Display for ProblemFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix-game" => Ok(ProblemFamily::MatrixGame),
            "gaussian" => Ok(ProblemFamily::Gaussian),
            "cournot" => Ok(ProblemFamily::Cournot),
            other => Err(invalid(alloc::format!("unknown problem family `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum InstanceParams {
    MatrixGame(MatrixGameInstance),
    Gaussian(GaussianChannelInstance),
    Cournot(CournotInstance),
}

/// A generated (or hand-written) instance together with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub size: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub params: InstanceParams,
}

impl ProblemInstance {
    pub fn family(&self) -> ProblemFamily {
        match self.params {
            InstanceParams::MatrixGame(_) => ProblemFamily::MatrixGame,
            InstanceParams::Gaussian(_) => ProblemFamily::Gaussian,
            InstanceParams::Cournot(_) => ProblemFamily::Cournot,
        }
    }

    pub fn problem(&self) -> Result<VIProblem> {
        match &self.params {
            InstanceParams::MatrixGame(inst) => matrix_game_problem(inst),
            InstanceParams::Gaussian(inst) => gaussian_problem(inst),
            InstanceParams::Cournot(inst) => Ok(cournot_problem(inst)),
        }
    }

    pub fn constraint(&self) -> ConstraintSpec {
        match &self.params {
            InstanceParams::MatrixGame(inst) => inst.constraint(),
            InstanceParams::Gaussian(inst) => inst.constraint(),
            InstanceParams::Cournot(inst) => inst.constraint(),
        }
    }
}

/// Deterministic instance for `(family, size, seed)`.
pub fn generate_instance(family: ProblemFamily, size: usize, seed: u64) -> Result<ProblemInstance> {
    if size == 0 {
        return Err(invalid("instance size must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = match family {
        ProblemFamily::MatrixGame => {
            InstanceParams::MatrixGame(MatrixGameInstance::generate(size, seed, &mut rng)?)
        }
        ProblemFamily::Gaussian => {
            InstanceParams::Gaussian(GaussianChannelInstance::generate(size, &mut rng)?)
        }
        ProblemFamily::Cournot => InstanceParams::Cournot(CournotInstance::generate(
            size,
            &CournotSampling::default(),
            &mut rng,
        )?),
    };
    Ok(ProblemInstance { size, seed, params })
}
