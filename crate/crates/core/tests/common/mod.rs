#![allow(dead_code)]

use inflap::fixtures::random;
use inflap::{BoundaryPartition, Graph, ScalarField};

/// Seeded connected graph with a valid partition.
pub fn graph_and_partition(seed: u64, n: usize) -> (Graph, BoundaryPartition) {
    let mut rng = random::rng(seed);
    let g = random::connected_graph(&mut rng, n, 0.25).unwrap();
    let p = random::partition(&mut rng, &g, (n / 3).max(1)).unwrap();
    (g, p)
}

pub fn path_graph(n: usize) -> Graph {
    Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
}

pub fn max_abs_diff(a: &ScalarField, b: &ScalarField, on: &[usize]) -> f64 {
    on.iter()
        .map(|&v| (a.raw()[v] - b.raw()[v]).abs())
        .fold(0.0, f64::max)
}
