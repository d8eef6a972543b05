//! Legendre functions, Bregman distances and the projections used by the
//! proximal step.
//!
//! A [`Geometry`] fixes a Legendre function `h` on `R^n` together with the
//! strong-convexity constant `sigma` of `h` on the feasible set it is meant to
//! be used with. Four families are supported:
//!
//! | kind               | `h(x)`                                              | `sigma`             |
//! |--------------------|-----------------------------------------------------|---------------------|
//! | Euclidean          | `1/2 |x|^2`                                         | `1`                 |
//! | negative entropy   | `sum x_i log x_i`                                   | `min_b 1 / T_b`     |
//! | Fermi-Dirac box    | `sum (x-a) log(x-a) + (b-x) log(b-x)`               | `min_i 4 / (b - a)` |
//! | Hellinger box      | `-sum sqrt((x-a)(b-x))`                             | `min_i 2 / (b - a)` |
//!
//! The negative entropy carries a list of simplex blocks with scales `T_b`;
//! its `sigma` is the strong-convexity constant on the product of the scaled
//! simplices.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Error, Result};
use crate::math::{self, abs, exp, hypot, ln, sqrt, xlogx};

/// Dual coordinates are clamped to this magnitude before exponentiation.
pub const DUAL_CLAMP: f64 = 700.0;

/// Gradients are rejected for coordinates this close to the boundary.
pub const BOUNDARY_EPS: f64 = 1e-300;

/// Smallest distance to the boundary of a point produced by an inverse
/// gradient or an entropic prox. A clamped dual coordinate maps to roughly
/// `e^-700`, which is closer than [`BOUNDARY_EPS`]; lifting such points to this
/// margin keeps every iterate acceptable to [`Geometry::gradient`].
pub const INTERIOR_MARGIN: f64 = 2.0 * BOUNDARY_EPS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    Euclidean,
    NegativeEntropy,
    FermiDirac,
    Hellinger,
}

impl GeometryKind {
    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Euclidean => "euclidean",
            GeometryKind::NegativeEntropy => "negative-entropy",
            GeometryKind::FermiDirac => "fermi-dirac",
            GeometryKind::Hellinger => "hellinger",
        }
    }
}

/// A run of `len` consecutive coordinates constrained to sum to `scale`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexBlock {
    pub len: usize,
    pub scale: f64,
}

impl SimplexBlock {
    pub fn new(len: usize, scale: f64) -> Result<Self> {
        if len == 0 {
            return Err(invalid("simplex block must have at least one coordinate"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("simplex scale must be positive and finite"));
        }
        Ok(SimplexBlock { len, scale })
    }
}

pub(crate) fn validate_blocks(blocks: &[SimplexBlock]) -> Result<usize> {
    if blocks.is_empty() {
        return Err(invalid("at least one simplex block is required"));
    }
    let mut dim = 0;
    for b in blocks {
        SimplexBlock::new(b.len, b.scale)?;
        dim += b.len;
    }
    Ok(dim)
}

/// Per-coordinate bounds `lo_i < hi_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBounds")]
pub struct BoxBounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Deserialize)]
struct RawBounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl TryFrom<RawBounds> for BoxBounds {
    type Error = Error;

    fn try_from(raw: RawBounds) -> Result<Self> {
        BoxBounds::new(raw.lo, raw.hi)
    }
}

impl BoxBounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_len(lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(invalid("box must have at least one coordinate"));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite()) {
                return Err(Error::NonFinite { index: i });
            }
            if !(l < h) {
                return Err(invalid(alloc::format!(
                    "box bounds must satisfy lo < hi (coordinate {i}: {l} >= {h})"
                )));
            }
        }
        Ok(BoxBounds { lo, hi })
    }

    /// The box `[lo, hi]^n`.
    pub fn uniform(n: usize, lo: f64, hi: f64) -> Result<Self> {
        BoxBounds::new(vec![lo; n], vec![hi; n])
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    fn max_width(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| h - l)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Domain {
    Euclidean {
        dim: usize,
    },
    NegativeEntropy {
        dim: usize,
        blocks: Vec<SimplexBlock>,
    },
    FermiDirac(BoxBounds),
    Hellinger(BoxBounds),
}

/// A Legendre function together with its strong-convexity constant.
///
/// Geometries are immutable; every operation is a pure function of its
/// arguments.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    domain: Domain,
    sigma: f64,
}

impl Geometry {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        Ok(Geometry {
            domain: Domain::Euclidean { dim },
            sigma: 1.0,
        })
    }

    /// Negative entropy over a product of scaled simplices.
    pub fn negative_entropy(blocks: Vec<SimplexBlock>) -> Result<Self> {
        let dim = validate_blocks(&blocks)?;
        let max_scale = blocks.iter().map(|b| b.scale).fold(0.0, f64::max);
        Ok(Geometry {
            domain: Domain::NegativeEntropy { dim, blocks },
            sigma: 1.0 / max_scale,
        })
    }

    /// Negative entropy over a single simplex of scale `scale`.
    pub fn negative_entropy_simplex(dim: usize, scale: f64) -> Result<Self> {
        Geometry::negative_entropy(vec![SimplexBlock::new(dim, scale)?])
    }

    pub fn fermi_dirac(bounds: BoxBounds) -> Self {
        let sigma = 4.0 / bounds.max_width();
        Geometry {
            domain: Domain::FermiDirac(bounds),
            sigma,
        }
    }

    pub fn hellinger(bounds: BoxBounds) -> Self {
        let sigma = 2.0 / bounds.max_width();
        Geometry {
            domain: Domain::Hellinger(bounds),
            sigma,
        }
    }

    pub fn kind(&self) -> GeometryKind {
        match self.domain {
            Domain::Euclidean { .. } => GeometryKind::Euclidean,
            Domain::NegativeEntropy { .. } => GeometryKind::NegativeEntropy,
            Domain::FermiDirac(_) => GeometryKind::FermiDirac,
            Domain::Hellinger(_) => GeometryKind::Hellinger,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.domain {
            Domain::Euclidean { dim } | Domain::NegativeEntropy { dim, .. } => *dim,
            Domain::FermiDirac(b) | Domain::Hellinger(b) => b.len(),
        }
    }

    /// Strong-convexity constant of `h` on the feasible set it was built for.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Simplex blocks of a negative-entropy geometry.
    pub fn blocks(&self) -> Option<&[SimplexBlock]> {
        match &self.domain {
            Domain::NegativeEntropy { blocks, .. } => Some(blocks),
            _ => None,
        }
    }

    /// Box of a Fermi-Dirac or Hellinger geometry, which is also `dom h`.
    pub fn bounds(&self) -> Option<&BoxBounds> {
        match &self.domain {
            Domain::FermiDirac(b) | Domain::Hellinger(b) => Some(b),
            _ => None,
        }
    }

    fn name(&self) -> &'static str {
        self.kind().name()
    }

    fn domain_error(&self, index: usize, value: f64) -> Error {
        Error::Domain {
            geometry: self.name(),
            index,
            value,
        }
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        check_len(self.dim(), x.len())?;
        match math::first_non_finite(x) {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }

    /// `h(x)`. Boundary points are accepted for the entropies (`0 log 0 = 0`).
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        match &self.domain {
            Domain::Euclidean { .. } => Ok(0.5 * math::norm_sq(x)),
            Domain::NegativeEntropy { .. } => {
                let mut acc = 0.0;
                for (i, &xi) in x.iter().enumerate() {
                    if xi < 0.0 {
                        return Err(self.domain_error(i, xi));
                    }
                    acc += xlogx(xi);
                }
                Ok(acc)
            }
            Domain::FermiDirac(b) => {
                let mut acc = 0.0;
                for (i, (&xi, (&lo, &hi))) in x.iter().zip(b.lo.iter().zip(&b.hi)).enumerate() {
                    if xi < lo || xi > hi {
                        return Err(self.domain_error(i, xi));
                    }
                    acc += xlogx(xi - lo) + xlogx(hi - xi);
                }
                Ok(acc)
            }
            Domain::Hellinger(b) => {
                let mut acc = 0.0;
                for (i, (&xi, (&lo, &hi))) in x.iter().zip(b.lo.iter().zip(&b.hi)).enumerate() {
                    if xi < lo || xi > hi {
                        return Err(self.domain_error(i, xi));
                    }
                    acc -= sqrt((xi - lo) * (hi - xi));
                }
                Ok(acc)
            }
        }
    }

    /// `∇h(x)`; `x` must be strictly interior.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; x.len()];
        self.gradient_into(x, &mut out)?;
        Ok(out)
    }

    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_input(x)?;
        check_len(x.len(), out.len())?;
        match &self.domain {
            Domain::Euclidean { .. } => out.copy_from_slice(x),
            Domain::NegativeEntropy { .. } => {
                for (i, (o, &xi)) in out.iter_mut().zip(x).enumerate() {
                    if !(xi > BOUNDARY_EPS) {
                        return Err(self.domain_error(i, xi));
                    }
                    *o = 1.0 + ln(xi);
                }
            }
            Domain::FermiDirac(b) => {
                for (i, (o, &xi)) in out.iter_mut().zip(x).enumerate() {
                    let (below, above) = (xi - b.lo[i], b.hi[i] - xi);
                    if !(below > BOUNDARY_EPS && above > BOUNDARY_EPS) {
                        return Err(self.domain_error(i, xi));
                    }
                    *o = ln(below) - ln(above);
                }
            }
            Domain::Hellinger(b) => {
                for (i, (o, &xi)) in out.iter_mut().zip(x).enumerate() {
                    let (below, above) = (xi - b.lo[i], b.hi[i] - xi);
                    if !(below > BOUNDARY_EPS && above > BOUNDARY_EPS) {
                        return Err(self.domain_error(i, xi));
                    }
                    let mid = 0.5 * (b.lo[i] + b.hi[i]);
                    *o = (xi - mid) / sqrt(below * above);
                }
            }
        }
        Ok(())
    }

    /// `(∇h)^{-1}(t)`, always strictly interior to `dom h` for the box
    /// geometries.
    pub fn gradient_inverse(&self, t: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; t.len()];
        self.gradient_inverse_into(t, &mut out)?;
        Ok(out)
    }

    pub fn gradient_inverse_into(&self, t: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_input(t)?;
        check_len(t.len(), out.len())?;
        match &self.domain {
            Domain::Euclidean { .. } => out.copy_from_slice(t),
            Domain::NegativeEntropy { .. } => {
                for (o, &ti) in out.iter_mut().zip(t) {
                    *o = exp(clamp_dual(ti) - 1.0).max(INTERIOR_MARGIN);
                }
            }
            Domain::FermiDirac(b) => {
                for (i, (o, &ti)) in out.iter_mut().zip(t).enumerate() {
                    let (lo, hi) = (b.lo[i], b.hi[i]);
                    let ti = clamp_dual(ti);
                    // Measure from the nearer endpoint so both tails keep precision.
                    let x = if ti >= 0.0 {
                        hi - (hi - lo) / (1.0 + exp(ti))
                    } else {
                        lo + (hi - lo) / (1.0 + exp(-ti))
                    };
                    *o = strictly_inside(x, lo, hi);
                }
            }
            Domain::Hellinger(b) => {
                for (i, (o, &ti)) in out.iter_mut().zip(t).enumerate() {
                    let (lo, hi) = (b.lo[i], b.hi[i]);
                    let radius = 0.5 * (hi - lo);
                    // t = u / sqrt(1 - u^2) with u = (x - mid) / radius, so
                    // u = t / sqrt(1 + t^2) and 1 - |u| = 1 / (s (s + |t|)).
                    let s = hypot(1.0, ti);
                    let gap = radius / (s * (s + abs(ti)));
                    let x = if ti >= 0.0 { hi - gap } else { lo + gap };
                    *o = strictly_inside(x, lo, hi);
                }
            }
        }
        Ok(())
    }

    /// `D_h(x, y) = h(x) - h(y) - <∇h(y), x - y>`.
    pub fn bregman_distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let grad_y = self.gradient(y)?;
        let hx = self.value(x)?;
        let hy = self.value(y)?;
        let inner: f64 = grad_y
            .iter()
            .zip(x.iter().zip(y))
            .map(|(g, (xi, yi))| g * (xi - yi))
            .sum();
        Ok(hx - hy - inner)
    }

    /// `(∇h)^{-1}( ((phi - 1) ∇h(z) + ∇h(zbar_prev)) / phi )`.
    pub fn mirror_combine(&self, z: &[f64], zbar_prev: &[f64], phi: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; z.len()];
        let mut scratch = vec![0.0; z.len()];
        self.mirror_combine_into(z, zbar_prev, phi, &mut scratch, &mut out)?;
        Ok(out)
    }

    /// Allocation-free [`Geometry::mirror_combine`]; `scratch` receives the
    /// combined dual point.
    pub fn mirror_combine_into(
        &self,
        z: &[f64],
        zbar_prev: &[f64],
        phi: f64,
        scratch: &mut [f64],
        out: &mut [f64],
    ) -> Result<()> {
        check_len(z.len(), zbar_prev.len())?;
        self.gradient_into(z, scratch)?;
        self.gradient_into(zbar_prev, out)?;
        for (s, g_bar) in scratch.iter_mut().zip(out.iter()) {
            *s = ((phi - 1.0) * *s + g_bar) / phi;
        }
        self.gradient_inverse_into(scratch, out)
    }
}

#[inline]
fn clamp_dual(t: f64) -> f64 {
    t.clamp(-DUAL_CLAMP, DUAL_CLAMP)
}

/// Moves `x` at least [`INTERIOR_MARGIN`] (and at least one ulp) inside `[lo, hi]`.
#[inline]
fn strictly_inside(x: f64, lo: f64, hi: f64) -> f64 {
    let floor = (lo + INTERIOR_MARGIN).max(lo.next_up());
    let ceil = (hi - INTERIOR_MARGIN).min(hi.next_down());
    x.clamp(floor, ceil)
}

/// Element-level work done by a projection, used to check complexity claims.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub element_reads: usize,
    pub comparisons: usize,
}

fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(invalid("simplex scale must be positive and finite"))
    }
}

/// KL projection of a positive vector onto the simplex of scale `scale`:
/// plain normalization `scale * x / |x|_1`.
pub fn project_simplex_kl(x: &[f64], scale: f64) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    project_simplex_kl_in_place(&mut out, scale, &mut OpCount::default())?;
    Ok(out)
}

/// In-place KL projection. One reduction pass and one scaling pass, no
/// ordering of the entries.
pub fn project_simplex_kl_in_place(x: &mut [f64], scale: f64, ops: &mut OpCount) -> Result<()> {
    check_scale(scale)?;
    let mut total = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        ops.element_reads += 1;
        ops.comparisons += 1;
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::Domain {
                geometry: GeometryKind::NegativeEntropy.name(),
                index: i,
                value: xi,
            });
        }
        total += xi;
    }
    let factor = scale / total;
    for xi in x.iter_mut() {
        ops.element_reads += 1;
        *xi *= factor;
    }
    Ok(())
}

/// Euclidean projection onto `{v >= 0 : sum v = scale}` by sorting and
/// thresholding.
pub fn project_simplex_euclidean(x: &[f64], scale: f64) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    let mut sorted = vec![0.0; x.len()];
    project_simplex_euclidean_in_place(&mut out, scale, &mut sorted, &mut OpCount::default())?;
    Ok(out)
}

/// In-place Euclidean simplex projection; `sorted` is scratch of the same
/// length as `x`.
pub fn project_simplex_euclidean_in_place(
    x: &mut [f64],
    scale: f64,
    sorted: &mut [f64],
    ops: &mut OpCount,
) -> Result<()> {
    check_scale(scale)?;
    check_len(x.len(), sorted.len())?;
    if x.is_empty() {
        return Err(invalid("cannot project an empty vector"));
    }
    if let Some(index) = math::first_non_finite(x) {
        return Err(Error::NonFinite { index });
    }
    sorted.copy_from_slice(x);
    ops.element_reads += x.len();
    sorted.sort_unstable_by(|a, b| {
        ops.comparisons += 1;
        b.total_cmp(a)
    });

    // Largest k with u_k - (sum_{j<=k} u_j - scale) / k > 0; k = 1 always qualifies.
    let mut cumulative = 0.0;
    let mut threshold = sorted[0] - scale;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - scale) / (k + 1) as f64;
        ops.comparisons += 1;
        if u - candidate > 0.0 {
            threshold = candidate;
        } else {
            break;
        }
    }
    for xi in x.iter_mut() {
        ops.element_reads += 1;
        *xi = (*xi - threshold).max(0.0);
    }
    Ok(())
}

/// Componentwise clamp onto `[lo, hi]`.
pub fn project_box_euclidean(x: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    project_box_in_place(&mut out, lo, hi);
    out
}

pub fn project_box_in_place(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    debug_assert!(x.len() == lo.len() && x.len() == hi.len());
    for ((xi, &l), &h) in x.iter_mut().zip(lo).zip(hi) {
        *xi = xi.max(l).min(h);
    }
}
