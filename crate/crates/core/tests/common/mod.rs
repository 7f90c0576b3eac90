#![allow(dead_code)]

use ggn_core::graph::SignedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Undirected graph on `n` nodes where each pair is an edge with probability
/// `density`, weights drawn from {-2, -1, -0.5, 0.5, 1, 2}.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> SignedGraph {
    const WEIGHTS: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                edges.push((u, v, WEIGHTS[rng.random_range(0..WEIGHTS.len())]));
            }
        }
    }
    SignedGraph::with_nodes(n, false, edges).unwrap()
}

/// Dense symmetric adjacency of an undirected graph.
pub fn dense_adjacency(g: &SignedGraph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for e in g.edges() {
        a[e.src][e.dst] += e.weight;
        if !g.is_directed() {
            a[e.dst][e.src] += e.weight;
        }
    }
    a
}

/// Team-game utility straight from the definition: signed weight to every
/// teammate minus `c` times the team size.
pub fn utility_from_scratch(a: &[Vec<f64>], assignment: &[usize], c: f64, i: usize) -> f64 {
    let n = a.len();
    let gain: f64 = (0..n).filter(|&j| j != i && assignment[j] == assignment[i]).map(|j| a[i][j]).sum();
    let size = assignment.iter().filter(|&&t| t == assignment[i]).count();
    gain - c * size as f64
}
