//! Cournot oligopoly with linear inverse demand `P(x) = a - b x` and
//! capacities `0 <= x_i <= C_i`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Result};
use crate::geometry::BoxBounds;
use crate::vi::{ConstraintSpec, VIProblem};

/// Location/scale of the log-normal draws used by [`CournotInstance::generate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CournotSampling {
    pub ln_mean_a: f64,
    pub ln_mean_b: f64,
    pub ln_mean_capacity: f64,
    pub ln_sigma: f64,
}

impl Default for CournotSampling {
    fn default() -> Self {
        CournotSampling {
            ln_mean_a: 2.0,
            ln_mean_b: 0.0,
            ln_mean_capacity: 2.0,
            ln_sigma: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CournotInstance {
    pub firms: usize,
    pub a: f64,
    pub b: f64,
    pub cost: Vec<f64>,
    pub capacity: Vec<f64>,
}

impl CournotInstance {
    pub fn new(a: f64, b: f64, cost: Vec<f64>, capacity: Vec<f64>) -> Result<Self> {
        check_len(cost.len(), capacity.len())?;
        if cost.is_empty() {
            return Err(invalid("at least one firm is required"));
        }
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(invalid("demand parameters a, b must be positive"));
        }
        if !capacity.iter().all(|c| *c > 0.0 && c.is_finite()) {
            return Err(invalid("capacities must be positive"));
        }
        if !cost.iter().all(|c| *c > 0.0 && *c < a) {
            return Err(invalid("costs must lie in (0, a)"));
        }
        Ok(CournotInstance {
            firms: cost.len(),
            a,
            b,
            cost,
            capacity,
        })
    }

    /// `firms` identical firms.
    pub fn symmetric(firms: usize, a: f64, b: f64, cost: f64, capacity: f64) -> Result<Self> {
        CournotInstance::new(a, b, alloc::vec![cost; firms], alloc::vec![capacity; firms])
    }

    /// Log-normal `a`, `b`, `C` and costs uniform in `[C_i/100, C_i/5]`. A firm
    /// whose cost would reach `a` has its capacity and cost redrawn.
    pub fn generate<R: Rng + ?Sized>(
        firms: usize,
        sampling: &CournotSampling,
        rng: &mut R,
    ) -> Result<Self> {
        let lognormal = |mean| {
            LogNormal::new(mean, sampling.ln_sigma).map_err(|e| invalid(alloc::format!("{e}")))
        };
        let (dist_a, dist_b, dist_c) = (
            lognormal(sampling.ln_mean_a)?,
            lognormal(sampling.ln_mean_b)?,
            lognormal(sampling.ln_mean_capacity)?,
        );
        let a = dist_a.sample(rng);
        let b = dist_b.sample(rng);
        let mut cost = Vec::with_capacity(firms);
        let mut capacity = Vec::with_capacity(firms);
        for _ in 0..firms {
            loop {
                let cap: f64 = dist_c.sample(rng);
                let c = rng.random_range(cap / 100.0..=cap / 5.0);
                if c < a {
                    cost.push(c);
                    capacity.push(cap);
                    break;
                }
            }
        }
        CournotInstance::new(a, b, cost, capacity)
    }

    pub fn bounds(&self) -> BoxBounds {
        BoxBounds::new(alloc::vec![0.0; self.firms], self.capacity.clone())
            .expect("capacities are validated positive")
    }

    pub fn constraint(&self) -> ConstraintSpec {
        ConstraintSpec::Box(self.bounds())
    }

    /// `u_i(x) = x_i P(x_T) - c_i x_i`.
    pub fn utility(&self, x: &[f64], firm: usize) -> f64 {
        let total: f64 = x.iter().sum();
        x[firm] * (self.a - self.b * total) - self.cost[firm] * x[firm]
    }
}

/// `F_i(x) = -∂u_i/∂x_i = b x_T + b x_i + c_i - a` on `[0, C]`.
pub fn cournot_problem(inst: &CournotInstance) -> VIProblem {
    let shared = Arc::new(inst.clone());
    VIProblem::new(inst.constraint(), move |x, out| {
        let total: f64 = x.iter().sum();
        for i in 0..x.len() {
            out[i] = shared.b * total + shared.b * x[i] + shared.cost[i] - shared.a;
        }
    })
}
