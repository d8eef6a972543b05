//! Two-player zero-sum game `min_{x ∈ Δ} max_{y ∈ Δ} <M x, y>` for placing a
//! server on a network against an adversarial request origin.

use alloc::sync::Arc;
use alloc::vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::SimplexBlock;
use crate::linalg::{spectral_norm, DenseMatrix};
use crate::math::ln;
use crate::vi::{saddle_to_vi, ConstraintSpec, SaddlePointSpec, VIProblem};

use super::graph::{graph_distance_matrix, Graph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixGameInstance {
    pub n: usize,
    /// Seed the random graph was drawn with.
    pub graph_seed: u64,
    /// Hop-count distance matrix of the graph.
    pub distances: DenseMatrix,
}

impl MatrixGameInstance {
    pub fn from_graph(graph: &Graph, graph_seed: u64) -> Result<Self> {
        Ok(MatrixGameInstance {
            n: graph.len(),
            graph_seed,
            distances: graph_distance_matrix(graph)?,
        })
    }

    /// A connected Erdős–Rényi graph with edge probability `2 ln n / n`,
    /// resampled until connected.
    pub fn generate<R: Rng + ?Sized>(n: usize, graph_seed: u64, rng: &mut R) -> Result<Self> {
        let p = if n <= 1 {
            0.0
        } else {
            (2.0 * ln(n as f64) / n as f64).min(1.0)
        };
        loop {
            let g = Graph::erdos_renyi(n, p, rng);
            if g.is_connected() {
                return MatrixGameInstance::from_graph(&g, graph_seed);
            }
        }
    }

    /// Constraint `Δ^n × Δ^n`.
    pub fn constraint(&self) -> ConstraintSpec {
        let block = SimplexBlock {
            len: self.n,
            scale: 1.0,
        };
        ConstraintSpec::SimplexProduct(vec![block, block])
    }
}

/// `F(x, y) = (M^T y, -M x)` over `Δ^n × Δ^n` with Lipschitz hint `|M|_2`.
pub fn matrix_game_problem(inst: &MatrixGameInstance) -> Result<VIProblem> {
    operator_for(&inst.distances, inst.constraint())
}

pub(crate) fn operator_for(m: &DenseMatrix, constraint: ConstraintSpec) -> Result<VIProblem> {
    let ConstraintSpec::SimplexProduct(blocks) = &constraint else {
        unreachable!("matrix games live on simplex products")
    };
    let (cx, cy) = (
        ConstraintSpec::SimplexProduct(vec![blocks[0]]),
        ConstraintSpec::SimplexProduct(vec![blocks[1]]),
    );
    let lipschitz = spectral_norm(m);
    let shared = Arc::new(m.clone());
    let (mx, my) = (shared.clone(), shared);
    let problem = saddle_to_vi(SaddlePointSpec::new(
        cx,
        cy,
        move |_x, y, out| mx.tr_mul_vec_into(y, out),
        move |x, _y, out| my.mul_vec_into(x, out),
    ))?;
    if lipschitz > 0.0 {
        problem.with_lipschitz_hint(lipschitz)
    } else {
        Ok(problem)
    }
}
