//! Brute-force and analytic reference computations.
//!
//! Nothing here calls the routines it is used to validate: projections are
//! checked against KKT systems solved by bisection or active-set enumeration,
//! gradients against central differences, and the Cournot solver against a
//! best-response iteration.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::math::{abs, exp};
use crate::problems::CournotInstance;

/// Deviation between an oracle and an implementation.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub oracle: Vec<f64>,
    pub implementation: Vec<f64>,
    pub max_abs_dev: f64,
    pub max_rel_dev: f64,
    pub tolerance: f64,
    /// `max_abs_dev <= tolerance`.
    pub passed: bool,
}

impl OracleReport {
    pub fn compare(
        quantity: impl Into<String>,
        oracle: Vec<f64>,
        implementation: Vec<f64>,
        tolerance: f64,
    ) -> Self {
        let mut max_abs_dev: f64 = if oracle.len() == implementation.len() {
            0.0
        } else {
            f64::INFINITY
        };
        let mut max_rel_dev: f64 = max_abs_dev;
        for (o, i) in oracle.iter().zip(&implementation) {
            let d = abs(o - i);
            // NaN deviations must fail the comparison.
            max_abs_dev = if d.is_nan() {
                f64::INFINITY
            } else {
                max_abs_dev.max(d)
            };
            max_rel_dev = max_rel_dev.max(d / abs(*o).max(f64::MIN_POSITIVE));
        }
        OracleReport {
            quantity: quantity.into(),
            passed: max_abs_dev <= tolerance,
            oracle,
            implementation,
            max_abs_dev,
            max_rel_dev,
            tolerance,
        }
    }
}

const BISECTION_ITERS: usize = 2000;

/// Minimizer of `KL(v, x)` over `{v >= 0 : sum v = scale}`, by bisection on the
/// multiplier `nu` of the stationarity condition `v_i = x_i exp(-nu)`.
pub fn kl_projection_oracle(x: &[f64], scale: f64) -> Result<Vec<f64>> {
    if x.is_empty() || !x.iter().all(|v| *v > 0.0 && v.is_finite()) || !(scale > 0.0) {
        return Err(Error::Oracle(
            "KL oracle needs a nonempty positive vector".into(),
        ));
    }
    let excess = |nu: f64| x.iter().map(|xi| xi * exp(-nu)).sum::<f64>() - scale;
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut widen = 0;
    while excess(lo) < 0.0 || excess(hi) > 0.0 {
        lo *= 2.0;
        hi *= 2.0;
        widen += 1;
        if widen > 64 {
            return Err(Error::Oracle("could not bracket the KL multiplier".into()));
        }
    }
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let nu = 0.5 * (lo + hi);
    Ok(x.iter().map(|xi| xi * exp(-nu)).collect())
}

/// Largest dimension accepted by [`euclidean_projection_oracle`].
pub const ENUMERATION_MAX_DIM: usize = 16;

/// Euclidean projection onto the scaled simplex by enumerating every support
/// set `S`: the candidate `v_S = x_S - tau`, `v = 0` elsewhere, with `tau` from
/// `sum v = scale`. The projection is the feasible candidate closest to `x`.
pub fn euclidean_projection_oracle(x: &[f64], scale: f64) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 || n > ENUMERATION_MAX_DIM {
        return Err(Error::Oracle(alloc::format!(
            "enumeration oracle supports 1..={ENUMERATION_MAX_DIM} coordinates"
        )));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let members = mask.count_ones() as f64;
        let sum: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| x[i]).sum();
        let tau = (sum - scale) / members;
        let v: Vec<f64> = (0..n)
            .map(|i| {
                if mask & (1 << i) != 0 {
                    x[i] - tau
                } else {
                    0.0
                }
            })
            .collect();
        if v.iter().any(|vi| *vi < 0.0) {
            continue;
        }
        let dist: f64 = v.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, v));
        }
    }
    best.map(|(_, v)| v)
        .ok_or_else(|| Error::Oracle("no feasible support set".into()))
}

/// Central differences `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn finite_difference_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    let mut out = vec![0.0; x.len()];
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        out[i] = (up - down) / (2.0 * h);
    }
    out
}

/// Damping of the best-response iteration.
pub const BEST_RESPONSE_DAMPING: f64 = 0.5;
const BEST_RESPONSE_TOL: f64 = 1e-12;
const BEST_RESPONSE_MAX_SWEEPS: usize = 1_000_000;

/// Nash equilibrium of a Cournot game by damped best responses.
///
/// Firms update in turn; each moves halfway toward its clamped quadratic best
/// response `clamp((a - c_i - b sum_{j != i} x_j) / 2b, 0, C_i)`. Stops once a
/// full sweep moves no coordinate by more than `1e-12`.
pub fn cournot_equilibrium_oracle(inst: &CournotInstance) -> Result<Vec<f64>> {
    let n = inst.firms;
    let mut x = vec![0.0; n];
    let mut total = 0.0;
    for _ in 0..BEST_RESPONSE_MAX_SWEEPS {
        let mut largest_move: f64 = 0.0;
        for ((xi, cost), cap) in x.iter_mut().zip(&inst.cost).zip(&inst.capacity) {
            let others = total - *xi;
            let response = ((inst.a - cost - inst.b * others) / (2.0 * inst.b)).clamp(0.0, *cap);
            let step = BEST_RESPONSE_DAMPING * (response - *xi);
            *xi += step;
            total = others + *xi;
            largest_move = largest_move.max(abs(step));
        }
        if largest_move < BEST_RESPONSE_TOL {
            return Ok(x);
        }
    }
    Err(Error::Oracle(
        "best-response iteration did not converge".into(),
    ))
}

/// Duality gap `max_j (M x)_j - min_i (M^T y)_i` of the game
/// `min_x max_y <M x, y>`; zero exactly at saddle points.
pub fn matrix_game_gap(m: &DenseMatrix, x: &[f64], y: &[f64]) -> f64 {
    let (rows, cols) = (m.rows(), m.cols());
    let mut worst_for_x = f64::NEG_INFINITY;
    for j in 0..rows {
        let v: f64 = (0..cols).map(|i| m[(j, i)] * x[i]).sum();
        worst_for_x = worst_for_x.max(v);
    }
    let mut best_for_x = f64::INFINITY;
    for i in 0..cols {
        let v: f64 = (0..rows).map(|j| m[(j, i)] * y[j]).sum();
        best_for_x = best_for_x.min(v);
    }
    worst_for_x - best_for_x
}
