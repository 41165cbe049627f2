//! Named graphs, oracles and generators shared by the test suites and the CLI.

pub mod oracles;
pub mod counterexamples;
pub mod random;

use serde::Serialize;

use crate::error::{arg, Result};
use crate::field::ScalarField;
use crate::graph::{compute_boundary, BoundaryPartition, Graph};
use crate::oracle::{truncate, GraphOracle};
use crate::tree::RootedForest;

pub use oracles::{BinaryTree, HalfLine, HalfPlane};
pub use counterexamples::{fig1, fig2, Fig1, Fig2, Fig3};

/// A finite graph with its partition and whichever fields the fixture defines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphFixture {
    pub name: String,
    pub graph: Graph,
    pub partition: BoundaryPartition,
    pub u: Option<ScalarField>,
    pub f: Option<ScalarField>,
    pub g: Option<ScalarField>,
    /// Root set when the graph is a tree.
    pub roots: Option<Vec<usize>>,
}

impl GraphFixture {
    fn new(name: impl Into<String>, graph: Graph, partition: BoundaryPartition) -> Self {
        Self {
            name: name.into(),
            graph,
            partition,
            u: None,
            f: None,
            g: None,
            roots: None,
        }
    }
}

fn path_graph(n: usize) -> Result<Graph> {
    Graph::from_edges(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)))
}

/// Path `0 ∼ 1 ∼ … ∼ n−1` with both ends on the boundary, `g = (0, n − 1)`.
pub fn path(n: usize) -> Result<GraphFixture> {
    if n < 3 {
        return arg("path fixture needs at least 3 vertices");
    }
    let graph = path_graph(n)?;
    let interior: Vec<usize> = (1..n - 1).collect();
    let partition = BoundaryPartition::new(&graph, &interior, &[0, n - 1])?;
    let mut fx = GraphFixture::new(format!("path{n}"), graph, partition);
    fx.f = Some(ScalarField::constant_on(n, &interior, 0.0)?);
    fx.g = Some(ScalarField::from_pairs(n, [(0, 0.0), (n - 1, (n - 1) as f64)])?);
    Ok(fx)
}

/// Star with center `0` and leaves `1..=values.len()` carrying `values`.
pub fn star(values: &[f64]) -> Result<GraphFixture> {
    let n = values.len() + 1;
    let graph = Graph::from_edges(n, (1..n).map(|i| (0, i)))?;
    let leaves: Vec<usize> = (1..n).collect();
    let partition = BoundaryPartition::new(&graph, &[0], &leaves)?;
    let mut fx = GraphFixture::new("star", graph, partition);
    fx.f = Some(ScalarField::constant_on(n, &[0], 0.0)?);
    fx.g = Some(ScalarField::from_pairs(n, leaves.iter().map(|&v| (v, values[v - 1])))?);
    Ok(fx)
}

/// `w × h` lattice; vertex `(x, y)` has id `y·w + x`.
pub fn grid_graph(w: usize, h: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = y * w + x;
            if x + 1 < w {
                edges.push((v, v + 1));
            }
            if y + 1 < h {
                edges.push((v, v + w));
            }
        }
    }
    Graph::from_edges(w * h, edges)
}

/// `w × h` lattice with the bottom row as boundary.
pub fn grid_one_side(w: usize, h: usize) -> Result<GraphFixture> {
    let graph = grid_graph(w, h)?;
    let boundary: Vec<usize> = (0..w).collect();
    let interior: Vec<usize> = (w..w * h).collect();
    let partition = BoundaryPartition::new(&graph, &interior, &boundary)?;
    Ok(GraphFixture::new(format!("grid{w}x{h}-side"), graph, partition))
}

/// `k × k` interior inside its frame, `g = x`-coordinate; corners are outside the problem.
pub fn framed_grid(k: usize) -> Result<GraphFixture> {
    let w = k + 2;
    let graph = grid_graph(w, w)?;
    let interior: Vec<usize> = (1..=k).flat_map(|y| (1..=k).map(move |x| y * w + x)).collect();
    let partition = compute_boundary(&graph, &interior)?;
    partition.validate(&graph)?;
    let n = graph.vertex_count();
    let mut fx = GraphFixture::new(format!("framed{k}"), graph, partition);
    let fr = &fx.partition;
    fx.f = Some(ScalarField::constant_on(n, fr.interior(), 0.0)?);
    fx.g = Some(ScalarField::from_pairs(n, fr.boundary().iter().map(|&v| (v, (v % w) as f64)))?);
    Ok(fx)
}

/// Chain `x̄ ∼ a ∼ b ∼ c` with `f = (1, 2, 0)`.
pub fn chain() -> Result<GraphFixture> {
    let graph = path_graph(4)?.with_labels(["xbar", "a", "b", "c"].map(String::from).to_vec())?;
    let partition = BoundaryPartition::new(&graph, &[1, 2, 3], &[0])?;
    let mut fx = GraphFixture::new("chain", graph, partition);
    fx.f = Some(ScalarField::from_pairs(4, [(1, 1.0), (2, 2.0), (3, 0.0)])?);
    fx.g = Some(ScalarField::from_pairs(4, [(0, 0.0)])?);
    fx.roots = Some(vec![0]);
    Ok(fx)
}

/// Roots `0 ∼ 1`, each with a ray of `len` vertices, `g = (0, 1)`, `f ≡ 0`.
pub fn two_root_rays(len: usize) -> Result<GraphFixture> {
    let n = 2 + 2 * len;
    let mut edges = vec![(0, 1)];
    for (root, start) in [(0, 2), (1, 2 + len)] {
        let mut prev = root;
        for v in start..start + len {
            edges.push((prev, v));
            prev = v;
        }
    }
    let graph = Graph::from_edges(n, edges)?;
    let interior: Vec<usize> = (2..n).collect();
    let partition = BoundaryPartition::new(&graph, &interior, &[0, 1])?;
    let mut fx = GraphFixture::new(format!("two-root-rays{len}"), graph, partition);
    fx.f = Some(ScalarField::constant_on(n, &interior, 0.0)?);
    fx.g = Some(ScalarField::from_pairs(n, [(0, 0.0), (1, 1.0)])?);
    fx.roots = Some(vec![0, 1]);
    Ok(fx)
}

/// Materialized truncation of an oracle as a plain fixture (outer sphere on the boundary).
pub fn truncated<O: GraphOracle>(name: &str, o: &O, r: usize) -> Result<GraphFixture> {
    let t = truncate(o, r)?;
    let labels = t.keys.iter().map(|k| o.label(k)).collect();
    let graph = t.graph.with_labels(labels)?;
    Ok(GraphFixture::new(format!("{name}-r{r}"), graph, t.partition))
}

fn forest_fixture(name: String, t: RootedForest, f: ScalarField) -> GraphFixture {
    let n = t.vertex_count();
    let roots = t.roots.clone();
    let mut fx = GraphFixture::new(name, t.graph, t.partition);
    fx.g = ScalarField::constant_on(n, &roots, 0.0).ok();
    fx.f = Some(f);
    fx.roots = Some(roots);
    fx
}

/// Deterministic family of fixtures for a seed.
pub fn standard_suite(seed: u64) -> Result<Vec<GraphFixture>> {
    let mut rng = random::rng(seed);
    let mut out = vec![
        truncated("half-line", &HalfLine, 8)?,
        truncated("half-plane", &HalfPlane::new(8)?, 6)?,
        truncated("binary-tree", &BinaryTree, 5)?,
    ];
    for k in 0..4 {
        let t = random::frontier_tree(&mut rng, 400, 8)?;
        let n = t.vertex_count();
        let f = random::sparse_field(&mut rng, n, t.partition.interior(), 0.0, 1.0, 0.5)?;
        out.push(forest_fixture(format!("random-tree-{k}"), t, f));
    }
    for k in 0..4 {
        let n = 8 + 5 * k;
        let graph = random::connected_graph(&mut rng, n, 0.15)?;
        let partition = random::partition(&mut rng, &graph, n / 3)?;
        let mut fx = GraphFixture::new(format!("random-graph-{k}"), graph, partition);
        fx.g = Some(random::sparse_field(&mut rng, n, fx.partition.boundary(), -1.0, 1.0, 0.0)?);
        fx.f = Some(ScalarField::constant_on(n, fx.partition.interior(), 0.0)?);
        out.push(fx);
    }
    Ok(out)
}

/// Fixture names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "path", "star", "grid", "framed-grid", "chain", "two-root", "fig1", "fig2", "half-line", "half-plane",
    "binary-tree", "fig3",
];

/// `name` or `name:param`, e.g. `fig1:8`, `path:6`, `fig3:60`.
pub fn by_name(spec: &str) -> Result<GraphFixture> {
    let (name, param) = match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    };
    let int = |default: usize| -> Result<usize> {
        match param {
            None => Ok(default),
            Some(p) => p.parse().map_err(|_| crate::Error::Argument(format!("bad parameter `{p}` for {name}"))),
        }
    };
    match name {
        "path" => path(int(4)?),
        "star" => star(&[0.0, 2.0, 1.0]),
        "grid" => {
            let k = int(5)?;
            grid_one_side(k, k)
        }
        "framed-grid" => framed_grid(int(5)?),
        "chain" => chain(),
        "two-root" => two_root_rays(int(3)?),
        "fig1" => {
            let fx = fig1(int(4)?)?;
            let mut out = GraphFixture::new(format!("fig1-{}", fx.n), fx.graph, fx.partition);
            out.u = Some(fx.u);
            Ok(out)
        }
        "fig2" => {
            let fx = fig2(0.5, int(3)?)?;
            let mut out = GraphFixture::new(format!("fig2-{}", fx.n), fx.graph, fx.partition);
            out.u = Some(fx.u);
            Ok(out)
        }
        "half-line" => truncated("half-line", &HalfLine, int(8)?),
        "half-plane" => truncated("half-plane", &HalfPlane::new(8)?, int(6)?),
        "binary-tree" => truncated("binary-tree", &BinaryTree, int(5)?),
        "fig3" => {
            let k = int(8)?;
            let o = Fig3::new(k)?;
            let (t, keys) = RootedForest::materialize(&o, k + 2)?;
            let n = t.vertex_count();
            let f = ScalarField::from_pairs(n, t.partition.interior().iter().map(|&v| (v, o.f(&keys[v]))))?;
            let labels = keys.iter().map(|k| o.label(k)).collect();
            let mut fx = forest_fixture(format!("fig3-{k}"), t, f);
            fx.graph = fx.graph.with_labels(labels)?;
            Ok(fx)
        }
        _ => arg(format!("unknown fixture `{name}`; known: {}", NAMES.join(", "))),
    }
}
