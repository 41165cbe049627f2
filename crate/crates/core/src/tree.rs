//! `Δ∞u = f`, `f ≥ 0`, on trees with a bounded root set.
//!
//! With `F(x) = f(x) + max_{children} F` (empty max 0), the sublinear solution
//! satisfies `u(x) = u(x^par) − F(x)` wherever the parent is unique.

use serde::Serialize;

use crate::dirichlet::{solve_bounded, DirichletProblem, SolveReport, SolverOptions};
use crate::error::{arg, Error, Result};
use crate::field::ScalarField;
use crate::graph::{BoundaryPartition, Graph};
use crate::oracle::{truncate, GraphOracle};

/// A tree whose root set is the boundary `δU`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootedForest {
    pub graph: Graph,
    pub partition: BoundaryPartition,
    pub roots: Vec<usize>,
    /// `|x| = d(x, δU)`.
    pub depth: Vec<usize>,
    /// Unique neighbor one level up, when there is exactly one.
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// Largest distance between two roots.
    pub m: usize,
    /// Depth at which the tree was cut; vertices there lack their children.
    pub frontier: Option<usize>,
}

impl RootedForest {
    pub fn new(graph: Graph, roots: &[usize]) -> Result<Self> {
        let n = graph.vertex_count();
        if roots.is_empty() {
            return arg("a rooted tree needs at least one root");
        }
        if !graph.is_connected() || graph.edge_count() + 1 != n {
            return Err(Error::InvalidGraph("not a tree (must be connected and acyclic)".into()));
        }
        let mut roots = roots.to_vec();
        roots.sort_unstable();
        roots.dedup();
        let dist = graph.bfs_distances(&roots);
        let depth: Vec<usize> = dist.iter().map(|d| d.unwrap_or(0)).collect();
        let mut m = 0;
        for &a in &roots {
            let from_a = graph.bfs_distances(&[a]);
            for &b in &roots {
                m = m.max(from_a[b].unwrap_or(0));
            }
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for x in 0..n {
            let up: Vec<usize> = graph
                .neighbors(x)
                .iter()
                .copied()
                .filter(|&y| depth[y] + 1 == depth[x])
                .collect();
            if up.len() == 1 {
                parent[x] = Some(up[0]);
            }
            children[x] = graph
                .neighbors(x)
                .iter()
                .copied()
                .filter(|&y| depth[y] == depth[x] + 1)
                .collect();
        }
        let interior: Vec<usize> = (0..n).filter(|&x| depth[x] > 0).collect();
        let partition = BoundaryPartition::new(&graph, &interior, &roots)?;
        Ok(Self {
            graph,
            partition,
            roots,
            depth,
            parent,
            children,
            m,
            frontier: None,
        })
    }

    /// All vertices of a tree oracle with `|x| ≤ cap`, with their keys.
    pub fn materialize<O: GraphOracle>(o: &O, cap: usize) -> Result<(Self, Vec<O::Key>)> {
        if cap < 2 {
            return arg("materialization depth must be at least 2");
        }
        let t = truncate(o, cap - 1)?;
        let mut forest = Self::new(t.graph, &t.inner_boundary)?;
        if forest.depth != t.depth {
            return Err(Error::OracleIntegrity("tree depths disagree with the oracle".into()));
        }
        forest.frontier = Some(cap);
        Ok((forest, t.keys))
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Vertices whose whole neighborhood is present.
    pub fn is_materialized(&self, x: usize) -> bool {
        self.frontier.is_none_or(|cap| self.depth[x] < cap)
    }

    /// Interior vertices sorted by depth, then id.
    fn by_depth(&self) -> Vec<usize> {
        let mut order: Vec<usize> = self.partition.interior().to_vec();
        order.sort_by_key(|&x| (self.depth[x], x));
        order
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupPathSum {
    /// `F` on interior vertices with `|x| ≤ depth_cap`.
    pub values: ScalarField,
    pub divergent: Vec<usize>,
    pub depth_cap: usize,
}

fn check_rhs(t: &RootedForest, f: &ScalarField) -> Result<()> {
    for &x in t.partition.interior() {
        let v = f.require(x)?;
        if v < 0.0 {
            return arg(format!("f({x}) = {v} is negative"));
        }
    }
    Ok(())
}

/// Bellman pass from depth `depth_cap` upward.
pub fn sup_path_sum(
    t: &RootedForest,
    f: &ScalarField,
    depth_cap: usize,
    divergence_threshold: f64,
) -> Result<SupPathSum> {
    check_rhs(t, f)?;
    let n = t.vertex_count();
    let mut sums = vec![0.0; n];
    let mut values = ScalarField::undefined(n);
    let mut divergent = Vec::new();
    for &x in t.by_depth().iter().rev() {
        if t.depth[x] > depth_cap {
            continue;
        }
        let below = if t.depth[x] == depth_cap {
            0.0
        } else {
            t.children[x].iter().map(|&c| sums[c]).fold(0.0, f64::max)
        };
        sums[x] = f.raw()[x] + below;
        if !(sums[x] <= divergence_threshold) {
            divergent.push(x);
            sums[x] = sums[x].min(f64::MAX);
        }
        values.set(x, sums[x])?;
    }
    divergent.sort_unstable();
    Ok(SupPathSum {
        values,
        divergent,
        depth_cap,
    })
}

/// Default cutoff above which `F` is treated as infinite.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LazySupPathSum {
    /// `F` at each cap on the vertices of depth `≤ depth`, in key order of the first cap.
    pub caps: Vec<usize>,
    pub per_cap: Vec<Vec<f64>>,
    /// Vertex indices (into the base set) flagged divergent.
    pub divergent: Vec<usize>,
}

/// `F` on an infinite tree oracle from doubling caps; a vertex is divergent when
/// `F` moves by more than `tol` between the last two caps or exceeds the threshold.
pub fn sup_path_sum_lazy<O: GraphOracle>(
    o: &O,
    f: impl Fn(&O::Key) -> f64,
    depth: usize,
    caps: &[usize],
    tol: f64,
    threshold: f64,
) -> Result<(Vec<O::Key>, LazySupPathSum)> {
    if caps.len() < 2 || caps.windows(2).any(|w| w[0] >= w[1]) || caps[0] < depth.max(2) {
        return arg("need at least two increasing caps, all at least the base depth");
    }
    let mut base: Vec<O::Key> = Vec::new();
    let mut per_cap = Vec::new();
    for &cap in caps {
        let (forest, keys) = RootedForest::materialize(o, cap)?;
        let rhs = ScalarField::from_pairs(
            forest.vertex_count(),
            forest.partition.interior().iter().map(|&x| (x, f(&keys[x]))),
        )?;
        let sums = sup_path_sum(&forest, &rhs, cap, f64::INFINITY)?;
        if base.is_empty() {
            base = forest
                .partition
                .interior()
                .iter()
                .filter(|&&x| forest.depth[x] <= depth)
                .map(|&x| keys[x].clone())
                .collect();
        }
        // Ids of the first cap are a prefix of every later one.
        let ids: Vec<usize> = (0..keys.len()).filter(|&x| forest.depth[x] > 0 && forest.depth[x] <= depth).collect();
        per_cap.push(ids.iter().map(|&x| sums.values.raw()[x]).collect::<Vec<_>>());
    }
    let last = &per_cap[per_cap.len() - 1];
    let prev = &per_cap[per_cap.len() - 2];
    let divergent = (0..last.len())
        .filter(|&i| !(last[i] <= threshold) || (last[i] - prev[i]).abs() > tol)
        .collect();
    Ok((
        base,
        LazySupPathSum {
            caps: caps.to_vec(),
            per_cap,
            divergent,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeSolution {
    pub u: ScalarField,
    pub sums: SupPathSum,
    /// Report of the finite solve on `{|x| ≤ M + 1}`, when one was made.
    pub reduced: Option<SolveReport>,
}

/// `u(x̄) = g0` and `u(x) = u(x^par) − F(x)` below it.
pub fn solve_single_root(t: &RootedForest, f: &ScalarField, g0: f64, depth_cap: usize) -> Result<TreeSolution> {
    if t.roots.len() != 1 {
        return arg(format!("expected one root, found {}", t.roots.len()));
    }
    let sums = sup_path_sum(t, f, depth_cap, DIVERGENCE_THRESHOLD)?;
    if let Some(&vertex) = sums.divergent.first() {
        return Err(Error::NoSublinearSolution { vertex });
    }
    let mut u = ScalarField::undefined(t.vertex_count());
    u.set(t.roots[0], g0)?;
    extend_down(t, &sums, &mut u, 0)?;
    Ok(TreeSolution {
        u,
        sums,
        reduced: None,
    })
}

fn extend_down(t: &RootedForest, sums: &SupPathSum, u: &mut ScalarField, above: usize) -> Result<()> {
    for x in t.by_depth() {
        if t.depth[x] <= above || t.depth[x] > sums.depth_cap {
            continue;
        }
        let par = t.parent[x].ok_or_else(|| Error::Precondition {
            vertex: x,
            reason: "vertex has no unique parent".into(),
        })?;
        u.set(x, u.require(par)? - sums.values.require(x)?)?;
    }
    Ok(())
}

/// Reduction to the finite slab `{|x| ≤ M + 1}` with right-hand side `2F` on its last level.
pub fn solve_bounded_boundary(
    t: &RootedForest,
    f: &ScalarField,
    g: &ScalarField,
    depth_cap: usize,
    opts: &SolverOptions,
) -> Result<TreeSolution> {
    let sums = sup_path_sum(t, f, depth_cap, DIVERGENCE_THRESHOLD)?;
    if let Some(&vertex) = sums.divergent.first() {
        return Err(Error::NoSublinearSolution { vertex });
    }
    let slab = t.m + 1;
    if depth_cap < slab {
        return arg(format!("depth cap {depth_cap} is below the slab depth {slab}"));
    }
    let keep: Vec<usize> = (0..t.vertex_count()).filter(|&x| t.depth[x] <= slab).collect();
    let mut local = vec![usize::MAX; t.vertex_count()];
    for (i, &x) in keep.iter().enumerate() {
        local[x] = i;
    }
    let edges = t
        .graph
        .edges()
        .filter(|&(a, b)| local[a] != usize::MAX && local[b] != usize::MAX)
        .map(|(a, b)| (local[a], local[b]));
    let sub = Graph::from_edges(keep.len(), edges)?;
    let interior: Vec<usize> = keep.iter().filter(|&&x| t.depth[x] > 0).map(|&x| local[x]).collect();
    let roots: Vec<usize> = t.roots.iter().map(|&x| local[x]).collect();
    let partition = BoundaryPartition::new(&sub, &interior, &roots)?;
    let mut rhs = ScalarField::undefined(keep.len());
    let mut data = ScalarField::undefined(keep.len());
    for &x in &keep {
        if t.depth[x] == 0 {
            data.set(local[x], g.require(x)?)?;
        } else if t.depth[x] == slab {
            rhs.set(local[x], 2.0 * sums.values.require(x)?)?;
        } else {
            rhs.set(local[x], f.require(x)?)?;
        }
    }
    let prob = DirichletProblem::new(sub, partition, rhs, data)?;
    let report = solve_bounded(&prob, opts)?;
    if !report.converged {
        return Err(Error::NonConvergence {
            iterations: report.iterations,
            last_update: report.final_update,
        });
    }
    let mut u = ScalarField::undefined(t.vertex_count());
    for &x in &keep {
        u.set(x, report.solution.require(local[x])?)?;
    }
    extend_down(t, &sums, &mut u, slab)?;
    Ok(TreeSolution {
        u,
        sums,
        reduced: Some(report),
    })
}
