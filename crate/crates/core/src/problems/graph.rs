//! Unweighted undirected graphs and hop-count distance matrices.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        let n = self.len();
        if a >= n || b >= n {
            return Err(invalid(alloc::format!(
                "edge ({a}, {b}) out of range for {n} vertices"
            )));
        }
        if a != b && !self.adjacency[a].contains(&b) {
            self.adjacency[a].push(b);
            self.adjacency[b].push(a);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn bfs(&self, source: usize, dist: &mut [usize]) {
        dist.fill(usize::MAX);
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let mut dist = vec![0; self.len()];
        self.bfs(0, &mut dist);
        dist.iter().all(|&d| d != usize::MAX)
    }

    /// Erdős–Rényi graph `G(n, p)`.
    pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut g = Graph::new(n);
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < p {
                    g.adjacency[a].push(b);
                    g.adjacency[b].push(a);
                }
            }
        }
        g
    }
}

/// Shortest-path hop counts by breadth-first search from every vertex.
pub fn graph_distance_matrix(graph: &Graph) -> Result<DenseMatrix> {
    let n = graph.len();
    let mut m = DenseMatrix::zeros(n, n);
    let mut dist = vec![0; n];
    for s in 0..n {
        graph.bfs(s, &mut dist);
        for (t, &d) in dist.iter().enumerate() {
            if d == usize::MAX {
                return Err(Error::DisconnectedGraph { vertex: t });
            }
            m[(s, t)] = d as f64;
        }
    }
    Ok(m)
}
