//! Seeded random graphs, partitions, fields and trees.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dirichlet::DirichletProblem;
use crate::error::Result;
use crate::field::ScalarField;
use crate::graph::{BoundaryPartition, Graph};
use crate::tree::RootedForest;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph: a random spanning tree plus each other pair with probability `p`.
pub fn connected_graph(rng: &mut impl Rng, n: usize, p: f64) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        edges.push((order[k], parent));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Random valid partition of a connected graph with boundary size in `1..=max_boundary`.
pub fn partition(rng: &mut impl Rng, g: &Graph, max_boundary: usize) -> Result<BoundaryPartition> {
    let n = g.vertex_count();
    let cap = max_boundary.clamp(1, n - 1);
    loop {
        let k = rng.gen_range(1..=cap);
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(rng);
        let mut boundary: Vec<usize> = ids[..k].to_vec();
        boundary.sort_unstable();
        let interior: Vec<usize> = ids[k..].to_vec();
        if let Ok(p) = BoundaryPartition::new(g, &interior, &boundary) {
            return Ok(p);
        }
    }
}

/// `max_i (c_i − k_i·d(·, a_i))` with apexes on the boundary: integer valued and subharmonic on `U`.
pub fn cone_max_field(rng: &mut impl Rng, g: &Graph, p: &BoundaryPartition, cones: usize) -> Result<ScalarField> {
    let n = g.vertex_count();
    let mut values = vec![f64::NEG_INFINITY; n];
    for _ in 0..cones.max(1) {
        let apex = *p.boundary().choose(rng).expect("boundary is non-empty");
        let c = rng.gen_range(-5..=5) as f64;
        let k = rng.gen_range(0..=3) as f64;
        let d = g.bfs_distances(&[apex]);
        for v in 0..n {
            let dv = d[v].unwrap_or(n) as f64;
            values[v] = values[v].max(c - k * dv);
        }
    }
    ScalarField::from_values(values)
}

/// Integer values in `-lim..=lim`.
pub fn integer_field(rng: &mut impl Rng, n: usize, lim: i32) -> Result<ScalarField> {
    ScalarField::from_values((0..n).map(|_| rng.gen_range(-lim..=lim) as f64).collect())
}

/// Values in `[lo, hi)` on `vertices`, zero with probability `zero_prob`.
pub fn sparse_field(
    rng: &mut impl Rng,
    n: usize,
    vertices: &[usize],
    lo: f64,
    hi: f64,
    zero_prob: f64,
) -> Result<ScalarField> {
    let mut f = ScalarField::undefined(n);
    for &v in vertices {
        let x = if rng.gen_bool(zero_prob) { 0.0 } else { rng.gen_range(lo..hi) };
        f.set(v, x)?;
    }
    Ok(f)
}

/// Random problem on `n` vertices with `f ≥ 0` and `g ∈ [−1, 1)`.
pub fn finite_width_problem(rng: &mut impl Rng, n: usize) -> Result<DirichletProblem> {
    let graph = connected_graph(rng, n, 2.0 / n as f64)?;
    let p = partition(rng, &graph, (n / 3).max(1))?;
    let f = sparse_field(rng, n, p.interior(), 0.0, 0.5, 0.3)?;
    let g = sparse_field(rng, n, p.boundary(), -1.0, 1.0, 0.0)?;
    DirichletProblem::new(graph, p, f, g)
}

/// Rooted tree with every leaf at depth exactly `depth` and at most `max_nodes` vertices.
/// The leaves are marked as the frontier of a cut.
pub fn frontier_tree(rng: &mut impl Rng, max_nodes: usize, depth: usize) -> Result<RootedForest> {
    let mut edges = Vec::new();
    let mut level = vec![0usize];
    let mut count = 1;
    for d in 0..depth {
        // Every vertex on this level needs a chain down to the frontier.
        let reserve = level.len() * (depth - d);
        let mut budget = max_nodes.saturating_sub(count + reserve);
        let mut next = Vec::new();
        for &v in &level {
            let cost = depth - d;
            let extra = rng.gen_range(0..=2usize).min(budget / cost);
            budget -= extra * cost;
            for _ in 0..1 + extra {
                edges.push((v, count));
                next.push(count);
                count += 1;
            }
        }
        level = next;
    }
    let mut t = RootedForest::new(Graph::from_edges(count, edges)?, &[0])?;
    t.frontier = Some(depth);
    Ok(t)
}

/// Two roots joined through `gap − 1` interior vertices; random subtrees down to depth
/// `branch_depth`, then single rays to depth `depth`.
pub fn two_root_tree(
    rng: &mut impl Rng,
    gap: usize,
    branch_depth: usize,
    depth: usize,
) -> Result<RootedForest> {
    let gap = gap.max(1);
    let mut edges = Vec::new();
    for k in 0..gap {
        edges.push((k, k + 1));
    }
    let mut count = gap + 1;
    let roots = [0, gap];
    // Attach descendants to the roots and the connecting path, tracking tree depth.
    let mut frontier: Vec<(usize, usize)> = (0..=gap).map(|k| (k, k.min(gap - k))).collect();
    while let Some((v, d)) = frontier.pop() {
        if d >= depth {
            continue;
        }
        // Interior path vertices may stay childless; everything else continues down.
        let min = if v > 0 && v < gap { 0 } else { 1 };
        let kids = if d < branch_depth { rng.gen_range(min..=2usize) } else { 1 };
        for _ in 0..kids {
            edges.push((v, count));
            frontier.push((count, d + 1));
            count += 1;
        }
    }
    let mut t = RootedForest::new(Graph::from_edges(count, edges)?, &roots)?;
    t.frontier = Some(depth);
    Ok(t)
}
