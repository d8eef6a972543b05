//! Bregman golden ratio algorithms for monotone variational inequalities.
//!
//! The crate solves problems of the form
//!
//! ```text
//! find z* such that  <F(z*), z - z*> + g(z) - g(z*) >= 0  for all z
//! ```
//!
//! where `F` is monotone and `g` is the indicator of a simple feasible set
//! (a product of scaled simplices, a box, or the whole space). Two solvers are
//! provided:
//!
//! * [`solver::bgraal_step`] -- fixed step size, needs a Lipschitz constant.
//! * [`solver::bagraal_step`] -- fully explicit adaptive step size.
//!
//! Both replace the Euclidean averaging and proximal steps of the golden ratio
//! algorithm by their mirror counterparts under a Legendre function `h`
//! ([`geometry::Geometry`]). Picking `h` to match the feasible set makes the
//! proximal step cheap: normalization on the simplex under the negative
//! entropy, and no projection at all on boxes under the Fermi-Dirac or
//! Hellinger entropies.
//!
//! The crate is `no_std` and only needs `alloc`. IO, timing and the command
//! line live in the companion `vigraal` crate.

#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` is how NaN gets rejected along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod math;
pub mod oracles;
pub mod problems;
pub mod solver;
pub mod vi;

pub use error::{Error, Result};
pub use geometry::{BoxBounds, Geometry, GeometryKind, SimplexBlock};
pub use linalg::DenseMatrix;
pub use problems::{
    CournotInstance, GaussianChannelInstance, MatrixGameInstance, ProblemFamily, ProblemInstance,
};
pub use solver::{
    AdaptiveConfig, FixedStepConfig, IterateTrace, RunStatus, SolverConfig, SolverState,
};
pub use vi::{ConstraintSpec, SaddlePointSpec, VIProblem};
