//! Worst-case power allocation over parallel Gaussian channels:
//! `max_{p ∈ Δ_P} min_{n ∈ Δ_N} sum_i log(1 + beta_i p_i / (mu_i + n_i))`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Result};
use crate::geometry::SimplexBlock;
use crate::math::ln;
use crate::vi::{saddle_to_vi, ConstraintSpec, SaddlePointSpec, VIProblem};

pub const DEFAULT_TOTAL_POWER: f64 = 500.0;
pub const DEFAULT_TOTAL_NOISE: f64 = 50.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianChannelInstance {
    pub m: usize,
    pub beta: Vec<f64>,
    pub mu: Vec<f64>,
    pub total_power: f64,
    pub total_noise: f64,
}

impl GaussianChannelInstance {
    pub fn new(beta: Vec<f64>, mu: Vec<f64>, total_power: f64, total_noise: f64) -> Result<Self> {
        check_len(beta.len(), mu.len())?;
        if beta.is_empty() {
            return Err(invalid("at least one channel is required"));
        }
        if !beta.iter().chain(&mu).all(|v| *v > 0.0 && v.is_finite()) {
            return Err(invalid("beta and mu must be positive and finite"));
        }
        if !(total_power > 0.0 && total_noise > 0.0) {
            return Err(invalid("total power and noise must be positive"));
        }
        Ok(GaussianChannelInstance {
            m: beta.len(),
            beta,
            mu,
            total_power,
            total_noise,
        })
    }

    /// `beta` uniform on `(0, P]^m` and `mu` uniform on `(1, N + 1]^m`.
    pub fn generate<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Self> {
        let (p, n) = (DEFAULT_TOTAL_POWER, DEFAULT_TOTAL_NOISE);
        // 1 - u with u in [0, 1) lands in (0, 1].
        let beta = (0..m).map(|_| p * (1.0 - rng.random::<f64>())).collect();
        let mu = (0..m)
            .map(|_| 1.0 + n * (1.0 - rng.random::<f64>()))
            .collect();
        GaussianChannelInstance::new(beta, mu, p, n)
    }

    /// `Δ^m_P × Δ^m_N`, power block first.
    pub fn constraint(&self) -> ConstraintSpec {
        ConstraintSpec::SimplexProduct(self.blocks())
    }

    pub fn blocks(&self) -> Vec<SimplexBlock> {
        vec![
            SimplexBlock {
                len: self.m,
                scale: self.total_power,
            },
            SimplexBlock {
                len: self.m,
                scale: self.total_noise,
            },
        ]
    }
}

/// Total capacity `sum_i log(1 + beta_i p_i / (mu_i + n_i))`.
pub fn gaussian_capacity(p: &[f64], n: &[f64], inst: &GaussianChannelInstance) -> f64 {
    (0..inst.m)
        .map(|i| ln(1.0 + inst.beta[i] * p[i] / (inst.mu[i] + n[i])))
        .sum()
}

/// `∂C/∂p_i = beta_i / (mu_i + n_i + beta_i p_i)`.
pub fn capacity_grad_power(p: &[f64], n: &[f64], inst: &GaussianChannelInstance, out: &mut [f64]) {
    for i in 0..inst.m {
        out[i] = inst.beta[i] / (inst.mu[i] + n[i] + inst.beta[i] * p[i]);
    }
}

/// `∂C/∂n_i = -beta_i p_i / ((mu_i + n_i)(mu_i + n_i + beta_i p_i))`.
pub fn capacity_grad_noise(p: &[f64], n: &[f64], inst: &GaussianChannelInstance, out: &mut [f64]) {
    for i in 0..inst.m {
        let base = inst.mu[i] + n[i];
        out[i] = -inst.beta[i] * p[i] / (base * (base + inst.beta[i] * p[i]));
    }
}

/// `F(p, n) = (-∂C/∂p, ∂C/∂n)`: the power block maximizes, so it is posed as
/// minimizing `-C` in the saddle form `min_p max_n -C(p, n)`.
pub fn gaussian_problem(inst: &GaussianChannelInstance) -> Result<VIProblem> {
    let blocks = inst.blocks();
    let shared = Arc::new(inst.clone());
    let (gp, gn) = (shared.clone(), shared);
    saddle_to_vi(SaddlePointSpec::new(
        ConstraintSpec::SimplexProduct(vec![blocks[0]]),
        ConstraintSpec::SimplexProduct(vec![blocks[1]]),
        move |p, n, out| {
            capacity_grad_power(p, n, &gp, out);
            out.iter_mut().for_each(|v| *v = -*v);
        },
        move |p, n, out| {
            capacity_grad_noise(p, n, &gn, out);
            out.iter_mut().for_each(|v| *v = -*v);
        },
    ))
}
