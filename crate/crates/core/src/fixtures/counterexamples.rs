//! Finite versions of the three counterexample graphs.

use crate::error::{arg, Result};
use crate::field::ScalarField;
use crate::graph::{BoundaryPartition, Graph};
use crate::oracle::GraphOracle;

/// Star `x ∼ x_i`, pendants `x_i ∼ y_i`, doubling edges `x_i ∼ x_{2i}`.
#[derive(Debug, Clone)]
pub struct Fig1 {
    pub n: usize,
    pub graph: Graph,
    pub partition: BoundaryPartition,
    /// `u(x) = 0`, `u(x_i) = 2i`, `u(y_i) = 1`.
    pub u: ScalarField,
    /// Interior vertices whose neighborhood matches the infinite graph (`x` and `x_i` with `2i ≤ n`).
    pub faithful: Vec<usize>,
}

impl Fig1 {
    pub const X: usize = 0;

    pub fn x_(&self, i: usize) -> usize {
        i
    }

    pub fn y_(&self, i: usize) -> usize {
        self.n + i
    }
}

pub fn fig1(n: usize) -> Result<Fig1> {
    if n < 2 {
        return arg("fig1 needs n ≥ 2");
    }
    let mut edges = Vec::new();
    for i in 1..=n {
        edges.push((0, i));
        edges.push((i, n + i));
        if 2 * i <= n {
            edges.push((i, 2 * i));
        }
    }
    let mut labels = vec!["x".to_string()];
    labels.extend((1..=n).map(|i| format!("x{i}")));
    labels.extend((1..=n).map(|i| format!("y{i}")));
    let graph = Graph::from_edges(2 * n + 1, edges)?.with_labels(labels)?;
    let interior: Vec<usize> = (0..=n).collect();
    let boundary: Vec<usize> = (n + 1..=2 * n).collect();
    let partition = BoundaryPartition::new(&graph, &interior, &boundary)?;
    let mut values = vec![0.0; 2 * n + 1];
    for i in 1..=n {
        values[i] = 2.0 * i as f64;
        values[n + i] = 1.0;
    }
    let u = ScalarField::from_values(values)?;
    let mut faithful = vec![Fig1::X];
    faithful.extend((1..=n).filter(|&i| 2 * i <= n));
    Ok(Fig1 {
        n,
        graph,
        partition,
        u,
        faithful,
    })
}

/// Hub `x` joined to the boundary vertex `x̄` and to `2n` rays.
///
/// Ray `y_i` carries slope `s_i = ε(1 − 2^{−i})`, ray `z_i` slope `−s_i`. Each ray has
/// `m = 2^{n+1} − 1` interior vertices and a boundary terminal holding the linear value.
#[derive(Debug, Clone)]
pub struct Fig2 {
    pub eps: f64,
    pub n: usize,
    pub ray_len: usize,
    pub graph: Graph,
    pub partition: BoundaryPartition,
    pub u: ScalarField,
    /// `L(u, ·)` of the infinite graph: `ε` at the hub, `s_i` on ray `i`.
    pub slopes: Vec<f64>,
}

impl Fig2 {
    pub const X_BAR: usize = 0;
    pub const X: usize = 1;

    /// Vertex `j` (1-based; `ray_len + 1` is the terminal) of ray `i`, `y` side if `upper`.
    pub fn ray_vertex(&self, i: usize, upper: bool, j: usize) -> usize {
        let ray = 2 * (i - 1) + usize::from(!upper);
        2 + ray * (self.ray_len + 1) + (j - 1)
    }

    /// `s_i = ε − ε/2^i`.
    pub fn slope(&self, i: usize) -> f64 {
        self.eps - self.eps / 2f64.powi(i as i32)
    }
}

pub fn fig2(eps: f64, n: usize) -> Result<Fig2> {
    if !(eps > 0.0) || !eps.is_finite() {
        return arg("fig2 needs ε > 0");
    }
    if !(2..=12).contains(&n) {
        return arg("fig2 supports 2 ≤ n ≤ 12");
    }
    let m = (1usize << (n + 1)) - 1;
    let count = 2 + 2 * n * (m + 1);
    let mut edges = vec![(Fig2::X_BAR, Fig2::X)];
    let mut values = vec![0.0; count];
    let mut slopes = vec![0.0; count];
    let mut boundary = vec![Fig2::X_BAR];
    let mut labels = vec!["xbar".to_string(), "x".to_string()];
    for i in 1..=n {
        let s = eps - eps / 2f64.powi(i as i32);
        for (side, sign) in [("y", 1.0), ("z", -1.0)] {
            let start = labels.len();
            let mut prev = Fig2::X;
            for j in 1..=m + 1 {
                let v = start + j - 1;
                edges.push((prev, v));
                values[v] = sign * s * j as f64;
                slopes[v] = s;
                labels.push(format!("{side}{i}_{j}"));
                prev = v;
            }
            boundary.push(prev);
        }
    }
    slopes[Fig2::X] = eps;
    let graph = Graph::from_edges(count, edges)?.with_labels(labels)?;
    let interior: Vec<usize> = (1..count).filter(|v| !boundary.contains(v)).collect();
    let partition = BoundaryPartition::new(&graph, &interior, &boundary)?;
    Ok(Fig2 {
        eps,
        n,
        ray_len: m,
        graph,
        partition,
        u: ScalarField::from_values(values)?,
        slopes,
    })
}

/// Half-lines `1..=k_max` glued at the root `x̄`; ray `k` carries `f = 1` at depth `k`.
#[derive(Debug, Clone, Copy)]
pub struct Fig3 {
    pub k_max: usize,
}

/// `(ray, depth)`; the root is `(0, 0)`.
pub type RayKey = (usize, usize);

impl Fig3 {
    pub fn new(k_max: usize) -> Result<Self> {
        if k_max < 2 {
            return arg("fig3 needs k_max ≥ 2");
        }
        Ok(Self { k_max })
    }

    pub fn f(&self, key: &RayKey) -> f64 {
        if key.0 > 0 && key.1 == key.0 {
            1.0
        } else {
            0.0
        }
    }

    /// Closed form `−min(j, k)` at depth `j` of ray `k`.
    pub fn expected_u(&self, key: &RayKey) -> f64 {
        -(key.1.min(key.0) as f64)
    }
}

impl GraphOracle for Fig3 {
    type Key = RayKey;

    fn boundary_seed(&self) -> Vec<RayKey> {
        vec![(0, 0)]
    }

    fn neighbors(&self, v: &RayKey) -> Vec<RayKey> {
        match *v {
            (0, 0) => (1..=self.k_max).map(|k| (k, 1)).collect(),
            (k, 1) => vec![(0, 0), (k, 2)],
            (k, j) => vec![(k, j - 1), (k, j + 1)],
        }
    }

    fn is_boundary(&self, v: &RayKey) -> bool {
        *v == (0, 0)
    }
}
