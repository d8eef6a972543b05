//! Monotone variational inequality problems.
//!
//! A [`VIProblem`] pairs a black-box operator `F` with the feasible structure
//! encoded by `g` (a [`ConstraintSpec`]). Saddle-point problems
//! `min_x max_y f(x, y)` enter through [`saddle_to_vi`], which stacks the
//! partial gradients into `F(x, y) = (∇_x f, -∇_y f)`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, invalid, Error, Result};
use crate::geometry::{validate_blocks, BoxBounds, SimplexBlock};
use crate::math::{self, ln, sqrt};

/// Feasible set of a problem, i.e. the domain of `g`.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintSpec {
    /// Product of scaled simplices laid out consecutively.
    SimplexProduct(Vec<SimplexBlock>),
    Box(BoxBounds),
    Free(usize),
}

impl ConstraintSpec {
    pub fn simplex_product(blocks: Vec<SimplexBlock>) -> Result<Self> {
        validate_blocks(&blocks)?;
        Ok(ConstraintSpec::SimplexProduct(blocks))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConstraintSpec::SimplexProduct(blocks) => blocks.iter().map(|b| b.len).sum(),
            ConstraintSpec::Box(b) => b.len(),
            ConstraintSpec::Free(n) => *n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConstraintSpec::SimplexProduct(_) => "simplex-product",
            ConstraintSpec::Box(_) => "box",
            ConstraintSpec::Free(_) => "free",
        }
    }

    /// Constraint on the concatenated space `(x, y)`.
    pub fn product(&self, other: &ConstraintSpec) -> Result<ConstraintSpec> {
        match (self, other) {
            (ConstraintSpec::SimplexProduct(a), ConstraintSpec::SimplexProduct(b)) => Ok(
                ConstraintSpec::SimplexProduct(a.iter().chain(b).copied().collect()),
            ),
            (ConstraintSpec::Box(a), ConstraintSpec::Box(b)) => {
                let lo = a.lo().iter().chain(b.lo()).copied().collect();
                let hi = a.hi().iter().chain(b.hi()).copied().collect();
                Ok(ConstraintSpec::Box(BoxBounds::new(lo, hi)?))
            }
            (ConstraintSpec::Free(a), ConstraintSpec::Free(b)) => Ok(ConstraintSpec::Free(a + b)),
            _ => Err(invalid(alloc::format!(
                "cannot form the product of a {} and a {} constraint",
                self.name(),
                other.name()
            ))),
        }
    }

    /// Draws a point from the interior of the feasible set: normalized
    /// exponential draws on simplices, uniform on the box shrunk by a `1e-6`
    /// relative margin, uniform on `[-1, 1]^n` when unconstrained.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        match self {
            ConstraintSpec::SimplexProduct(blocks) => {
                for block in blocks {
                    let start = out.len();
                    for _ in 0..block.len {
                        // 1 - u lies in (0, 1], so the draw is finite and positive.
                        let u: f64 = rng.random();
                        out.push(-ln(1.0 - u) + f64::MIN_POSITIVE);
                    }
                    let total: f64 = out[start..].iter().sum();
                    out[start..]
                        .iter_mut()
                        .for_each(|x| *x *= block.scale / total);
                }
            }
            ConstraintSpec::Box(b) => {
                for (&lo, &hi) in b.lo().iter().zip(b.hi()) {
                    let margin = 1e-6 * (hi - lo);
                    let u: f64 = rng.random();
                    out.push(lo + margin + u * (hi - lo - 2.0 * margin));
                }
            }
            ConstraintSpec::Free(n) => {
                for _ in 0..*n {
                    out.push(rng.random_range(-1.0..1.0));
                }
            }
        }
        out
    }
}

type OperatorFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;
type PartialGradientFn = dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync;

/// A monotone variational inequality `0 ∈ F(z) + ∂g(z)`.
///
/// The operator is evaluated through [`VIProblem::eval_into`]; it must be
/// deterministic and free of side effects so that a problem can be shared by
/// concurrent solver runs.
pub struct VIProblem {
    operator: Box<OperatorFn>,
    constraint: ConstraintSpec,
    lipschitz_hint: Option<f64>,
}

impl core::fmt::Debug for VIProblem {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("VIProblem")
            .field("dim", &self.dim())
            .field("constraint", &self.constraint)
            .field("lipschitz_hint", &self.lipschitz_hint)
            .finish_non_exhaustive()
    }
}

impl VIProblem {
    pub fn new<F>(constraint: ConstraintSpec, operator: F) -> Self
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        VIProblem {
            operator: Box::new(operator),
            constraint,
            lipschitz_hint: None,
        }
    }

    pub fn with_lipschitz_hint(mut self, lipschitz: f64) -> Result<Self> {
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(invalid("Lipschitz hint must be positive and finite"));
        }
        self.lipschitz_hint = Some(lipschitz);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.constraint.dim()
    }

    pub fn constraint(&self) -> &ConstraintSpec {
        &self.constraint
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    pub fn eval_into(&self, z: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.dim(), z.len())?;
        check_len(self.dim(), out.len())?;
        (self.operator)(z, out);
        Ok(())
    }

    pub fn eval(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(z, &mut out)?;
        Ok(out)
    }
}

/// `min_x max_y f(x, y)` described by its partial gradients.
pub struct SaddlePointSpec {
    pub grad_x: Box<PartialGradientFn>,
    pub grad_y: Box<PartialGradientFn>,
    pub constraint_x: ConstraintSpec,
    pub constraint_y: ConstraintSpec,
}

impl SaddlePointSpec {
    pub fn new<GX, GY>(
        constraint_x: ConstraintSpec,
        constraint_y: ConstraintSpec,
        grad_x: GX,
        grad_y: GY,
    ) -> Self
    where
        GX: Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
        GY: Fn(&[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        SaddlePointSpec {
            grad_x: Box::new(grad_x),
            grad_y: Box::new(grad_y),
            constraint_x,
            constraint_y,
        }
    }
}

/// Stacks a saddle-point problem into the VI with `F(z) = (∇_x f(x,y), -∇_y f(x,y))`
/// over the product constraint.
pub fn saddle_to_vi(spec: SaddlePointSpec) -> Result<VIProblem> {
    let nx = spec.constraint_x.dim();
    let ny = spec.constraint_y.dim();
    if nx == 0 || ny == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let constraint = spec.constraint_x.product(&spec.constraint_y)?;
    let SaddlePointSpec { grad_x, grad_y, .. } = spec;
    Ok(VIProblem::new(constraint, move |z, out| {
        let (x, y) = z.split_at(nx);
        let (out_x, out_y) = out.split_at_mut(nx);
        grad_x(x, y, out_x);
        grad_y(x, y, out_y);
        out_y.iter_mut().for_each(|v| *v = -*v);
    }))
}

/// Outcome of [`monotonicity_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub samples: usize,
    /// `min <F(z) - F(z'), z - z'>` over the sampled pairs.
    pub min_inner: f64,
    /// `max(1, max |F(z) - F(z')| |z - z'|)`, the scale of the tolerance.
    pub scale: f64,
    pub passed: bool,
}

pub const MONOTONICITY_TOL: f64 = 1e-9;

/// Samples `samples` interior pairs and checks `<F(z) - F(z'), z - z'> >= -1e-9 * scale`.
pub fn monotonicity_check(
    problem: &VIProblem,
    samples: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    if samples == 0 {
        return Err(invalid("monotonicity check needs at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = problem.dim();
    let (mut fz, mut fw) = (vec![0.0; n], vec![0.0; n]);
    let mut min_inner = f64::INFINITY;
    let mut scale: f64 = 1.0;
    for _ in 0..samples {
        let z = problem.constraint.sample_interior(&mut rng);
        let w = problem.constraint.sample_interior(&mut rng);
        problem.eval_into(&z, &mut fz)?;
        problem.eval_into(&w, &mut fw)?;
        let df: Vec<f64> = fz.iter().zip(&fw).map(|(a, b)| a - b).collect();
        let dz: Vec<f64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
        if let Some(index) = math::first_non_finite(&df) {
            return Err(Error::NonFinite { index });
        }
        min_inner = min_inner.min(math::dot(&df, &dz));
        scale = scale.max(sqrt(math::norm_sq(&df)) * sqrt(math::norm_sq(&dz)));
    }
    Ok(MonotonicityReport {
        samples,
        min_inner,
        scale,
        passed: min_inner >= -MONOTONICITY_TOL * scale,
    })
}
