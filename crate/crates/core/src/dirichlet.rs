//! Bounded solutions of `Δ∞u = f` with Dirichlet data on finite-width problems.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::field::ScalarField;
use crate::graph::{connected_components, BoundaryPartition, Graph};
use crate::operator::{infinity_laplacian, residual_norm};

/// `Δ∞u = f` on `U`, `u = g` on `δU`.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    pub graph: Graph,
    pub partition: BoundaryPartition,
    pub f: ScalarField,
    pub g: ScalarField,
}

impl DirichletProblem {
    pub fn new(
        graph: Graph,
        partition: BoundaryPartition,
        f: ScalarField,
        g: ScalarField,
    ) -> Result<Self> {
        partition.validate(&graph)?;
        let n = graph.vertex_count();
        if f.len() != n || g.len() != n {
            return arg("f and g must be indexed by the graph's vertices");
        }
        for &x in partition.interior() {
            if !f.is_defined(x) {
                return arg(format!("f undefined at interior vertex {x}"));
            }
        }
        for &y in partition.boundary() {
            if !g.is_defined(y) {
                return arg(format!("g undefined at boundary vertex {y}"));
            }
        }
        Ok(Self {
            graph,
            partition,
            f,
            g,
        })
    }

    /// Homogeneous problem `Δ∞u = 0`.
    pub fn homogeneous(graph: Graph, partition: BoundaryPartition, g: ScalarField) -> Result<Self> {
        let f = ScalarField::constant_on(graph.vertex_count(), partition.interior(), 0.0)?;
        Self::new(graph, partition, f, g)
    }

    pub fn width(&self) -> usize {
        self.partition.width()
    }

    pub fn g_max(&self) -> f64 {
        self.partition
            .boundary()
            .iter()
            .filter_map(|&y| self.g.get(y))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn g_min(&self) -> f64 {
        self.partition
            .boundary()
            .iter()
            .filter_map(|&y| self.g.get(y))
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |f|` over `U`.
    pub fn f_sup(&self) -> f64 {
        self.partition
            .interior()
            .iter()
            .filter_map(|&x| self.f.get(x))
            .fold(0.0, |a, b| a.max(b.abs()))
    }

    /// A pair of interior vertices where `f` takes opposite strict signs.
    pub fn sign_change(&self) -> Option<(usize, usize)> {
        let interior = self.partition.interior();
        let pos = interior.iter().copied().find(|&x| self.f.raw()[x] > 0.0)?;
        let neg = interior.iter().copied().find(|&x| self.f.raw()[x] < 0.0)?;
        Some((pos, neg))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.partition.interior().iter().all(|&x| self.f.raw()[x] == 0.0)
    }

    /// Initial field equal to `g` on `δU` and `value(x)` on `U`.
    pub fn field_with(&self, value: impl Fn(usize) -> f64) -> Result<ScalarField> {
        let n = self.graph.vertex_count();
        let mut u = ScalarField::undefined(n);
        for &y in self.partition.boundary() {
            u.set(y, self.g.raw()[y])?;
        }
        for &x in self.partition.interior() {
            u.set(x, value(x))?;
        }
        Ok(u)
    }

    /// `max g + F·h(|x|)` with `h(d) = d(2W + 1 − d)`; satisfies `Δ∞v ≤ −2F ≤ f`.
    pub fn supersolution(&self) -> Result<ScalarField> {
        let (top, slack, w) = (self.g_max(), self.f_sup(), self.width() as f64);
        self.field_with(|x| {
            let d = self.partition.depth(x).unwrap_or(0) as f64;
            top + slack * d * (2.0 * w + 1.0 - d)
        })
    }

    /// `min g − F·h(|x|)`; satisfies `Δ∞v ≥ 2F ≥ f`.
    pub fn subsolution(&self) -> Result<ScalarField> {
        let (bottom, slack, w) = (self.g_min(), self.f_sup(), self.width() as f64);
        self.field_with(|x| {
            let d = self.partition.depth(x).unwrap_or(0) as f64;
            bottom - slack * d * (2.0 * w + 1.0 - d)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// In-place updates in ascending vertex order.
    GaussSeidel,
    /// Every vertex updated from the previous iterate.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub mode: SweepMode,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 1_000_000,
            mode: SweepMode::GaussSeidel,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_mode(mut self, mode: SweepMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    fn check(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return arg(format!("tolerance must be positive, got {}", self.tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dpp,
    Bracketed,
    SteepestPath,
    TreeReduction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub solution: ScalarField,
    pub iterations: usize,
    pub residual: f64,
    /// `max |upper − lower|` when a two-sided run was made.
    pub bracket_gap: Option<f64>,
    pub converged: bool,
    /// Sup-norm change of the last sweep.
    pub final_update: f64,
    pub method: Method,
}

impl SolveReport {
    /// Turns a non-converged report into an error.
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                iterations: self.iterations,
                last_update: self.final_update,
            })
        }
    }
}

/// Interior adjacency flattened for the sweep loops.
struct Stencil {
    interior: Vec<usize>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    rhs: Vec<f64>,
}

impl Stencil {
    fn new(prob: &DirichletProblem) -> Result<Self> {
        let interior = prob.partition.interior().to_vec();
        let mut offsets = Vec::with_capacity(interior.len() + 1);
        let mut targets = Vec::new();
        let mut rhs = Vec::with_capacity(interior.len());
        offsets.push(0);
        for &x in &interior {
            let nbrs = prob.graph.neighbors(x);
            if nbrs.is_empty() {
                return Err(Error::DegenerateVertex(x));
            }
            targets.extend(nbrs.iter().map(|&y| y as u32));
            offsets.push(targets.len());
            rhs.push(prob.f.raw()[x]);
        }
        Ok(Self {
            interior,
            offsets,
            targets,
            rhs,
        })
    }

    #[inline]
    fn update(&self, i: usize, u: &[f64]) -> f64 {
        let nbrs = &self.targets[self.offsets[i]..self.offsets[i + 1]];
        // Four independent lanes; values are finite so plain comparisons suffice.
        let mut hi = [f64::NEG_INFINITY; 4];
        let mut lo = [f64::INFINITY; 4];
        let mut chunks = nbrs.chunks_exact(4);
        for c in &mut chunks {
            for k in 0..4 {
                let v = u[c[k] as usize];
                hi[k] = if v > hi[k] { v } else { hi[k] };
                lo[k] = if v < lo[k] { v } else { lo[k] };
            }
        }
        for &y in chunks.remainder() {
            let v = u[y as usize];
            hi[0] = if v > hi[0] { v } else { hi[0] };
            lo[0] = if v < lo[0] { v } else { lo[0] };
        }
        let hi = hi[0].max(hi[1]).max(hi[2].max(hi[3]));
        let lo = lo[0].min(lo[1]).min(lo[2].min(lo[3]));
        0.5 * (hi + lo - self.rhs[i])
    }

    fn sweep(&self, mode: SweepMode, u: &mut [f64], scratch: &mut Vec<f64>) -> f64 {
        match mode {
            SweepMode::GaussSeidel => {
                let mut change: f64 = 0.0;
                for (i, &x) in self.interior.iter().enumerate() {
                    let new = self.update(i, u);
                    change = change.max((new - u[x]).abs());
                    u[x] = new;
                }
                change
            }
            SweepMode::Jacobi => {
                let frozen: &[f64] = u;
                if self.interior.len() >= 4096 {
                    scratch.clear();
                    scratch.par_extend((0..self.interior.len()).into_par_iter().map(|i| self.update(i, frozen)));
                } else {
                    scratch.clear();
                    scratch.extend((0..self.interior.len()).map(|i| self.update(i, frozen)));
                }
                let mut change: f64 = 0.0;
                for (i, &x) in self.interior.iter().enumerate() {
                    change = change.max((scratch[i] - u[x]).abs());
                    u[x] = scratch[i];
                }
                change
            }
        }
    }
}

/// DPP iteration `u ← (max + min − f)/2` on `U`, `u = g` on `δU`.
pub fn dpp_iterate(
    prob: &DirichletProblem,
    init: &ScalarField,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    dpp_iterate_observed(prob, init, opts, |_, _| {})
}

/// Like [`dpp_iterate`], calling `observe(sweep, values)` after every sweep.
/// `values` is indexed by vertex id; entries outside `U ∪ δU` are zero.
pub fn dpp_iterate_observed(
    prob: &DirichletProblem,
    init: &ScalarField,
    opts: &SolverOptions,
    mut observe: impl FnMut(usize, &[f64]),
) -> Result<SolveReport> {
    opts.check()?;
    let n = prob.graph.vertex_count();
    if init.len() != n {
        return arg("initial field has the wrong length");
    }
    let mut u = vec![0.0; n];
    for &y in prob.partition.boundary() {
        let v = init.require(y)?;
        if v != prob.g.raw()[y] {
            return arg(format!("initial field differs from g at boundary vertex {y}"));
        }
        u[y] = v;
    }
    for &x in prob.partition.interior() {
        u[x] = init.require(x)?;
    }
    let stencil = Stencil::new(prob)?;
    let mut scratch = Vec::with_capacity(stencil.interior.len());
    let mut iterations = 0;
    let mut change = f64::INFINITY;
    while iterations < opts.max_iter {
        change = stencil.sweep(opts.mode, &mut u, &mut scratch);
        iterations += 1;
        observe(iterations, &u);
        if change < opts.tol {
            break;
        }
    }
    if stencil.interior.is_empty() {
        change = 0.0;
    }
    let solution = prob.field_with(|x| u[x])?;
    let residual = residual_norm(&prob.graph, &prob.partition, &solution, &prob.f)?;
    Ok(SolveReport {
        solution,
        iterations,
        residual,
        bracket_gap: None,
        converged: change < opts.tol,
        final_update: change,
        method: Method::Dpp,
    })
}

/// Upper and lower DPP runs; returns the upper limit with the bracket gap.
pub fn solve_bounded(prob: &DirichletProblem, opts: &SolverOptions) -> Result<SolveReport> {
    if let Some((positive, negative)) = prob.sign_change() {
        return Err(Error::SignChangingRhs { positive, negative });
    }
    let upper = dpp_iterate(prob, &prob.supersolution()?, opts)?;
    let lower = dpp_iterate(prob, &prob.subsolution()?, opts)?;
    let gap = prob
        .partition
        .interior()
        .iter()
        .map(|&x| (upper.solution.raw()[x] - lower.solution.raw()[x]).abs())
        .fold(0.0, f64::max);
    Ok(SolveReport {
        iterations: upper.iterations + lower.iterations,
        bracket_gap: Some(gap),
        converged: upper.converged && lower.converged,
        final_update: upper.final_update.max(lower.final_update),
        method: Method::Bracketed,
        ..upper
    })
}

/// Exact solution of the homogeneous problem by repeated steepest-path peeling.
pub fn steepest_path_solve(prob: &DirichletProblem) -> Result<SolveReport> {
    if !prob.is_homogeneous() {
        return arg("steepest-path peeling requires f ≡ 0");
    }
    let g = &prob.graph;
    let n = g.vertex_count();
    let mut fixed = vec![false; n];
    let mut free = vec![false; n];
    let mut value = vec![0.0; n];
    for &y in prob.partition.boundary() {
        fixed[y] = true;
        value[y] = prob.g.raw()[y];
    }
    for &x in prob.partition.interior() {
        free[x] = true;
    }
    let mut peels = 0;
    loop {
        let fixed_list: Vec<usize> = (0..n).filter(|&v| fixed[v]).collect();
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for &b in &fixed_list {
            let dist = free_distances(g, b, &free);
            for &a in &fixed_list {
                if a == b {
                    continue;
                }
                // Shortest path from `a` to `b` whose inner vertices are all free.
                let Some(len) = g.neighbors(a).iter().filter_map(|&w| dist[w]).min().map(|d| d + 1) else {
                    continue;
                };
                let slope = (value[b] - value[a]) / len as f64;
                let better = match best {
                    None => true,
                    Some((s, ba, bb, _)) => slope > s || (slope == s && (a, b) < (ba, bb)),
                };
                if better {
                    best = Some((slope, a, b, len));
                }
            }
        }
        let Some((slope, a, b, len)) = best else { break };
        let dist_b = free_distances(g, b, &free);
        let mut cur = a;
        for step in 1..len {
            let next = g
                .neighbors(cur)
                .iter()
                .copied()
                .find(|&w| free[w] && dist_b[w] == Some(len - step))
                .ok_or_else(|| Error::InternalConsistency("steepest path reconstruction".into()))?;
            value[next] = value[a] + slope * step as f64;
            free[next] = false;
            fixed[next] = true;
            cur = next;
        }
        peels += 1;
    }
    // Free components touching a single fixed vertex are constant.
    let remaining: Vec<usize> = (0..n).filter(|&v| free[v]).collect();
    for comp in connected_components(g, &remaining) {
        let anchor = comp
            .iter()
            .flat_map(|&v| g.neighbors(v).iter().copied())
            .find(|&w| fixed[w])
            .ok_or_else(|| Error::InternalConsistency("free component without anchor".into()))?;
        for v in comp {
            value[v] = value[anchor];
        }
    }
    let solution = prob.field_with(|x| value[x])?;
    let residual = residual_norm(g, &prob.partition, &solution, &prob.f)?;
    Ok(SolveReport {
        solution,
        iterations: peels,
        residual,
        bracket_gap: None,
        converged: true,
        final_update: 0.0,
        method: Method::SteepestPath,
    })
}

/// Distances from `b` to free vertices along paths through free vertices only.
fn free_distances(g: &Graph, b: usize, free: &[bool]) -> Vec<Option<usize>> {
    let starts: Vec<usize> = g.neighbors(b).iter().copied().filter(|&w| free[w]).collect();
    let mut dist = vec![None; g.vertex_count()];
    if starts.is_empty() {
        return dist;
    }
    let inner = g.bfs_filtered(&starts, |v| free[v]);
    for (v, d) in inner.into_iter().enumerate() {
        if free[v] {
            dist[v] = d.map(|d| d + 1);
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ComparisonVerdict {
    /// `sup_U(u − v) ≤ sup_δU(u − v) + tol`; `witness` attains `sup_U(u − v)`.
    Holds { witness: usize, interior_sup: f64, boundary_sup: f64 },
    Fails { witness: usize, interior_sup: f64, boundary_sup: f64 },
    /// `u` is not a subsolution or `v` not a supersolution at `vertex`.
    HypothesisViolated { vertex: usize, detail: String },
}

impl ComparisonVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ComparisonVerdict::Holds { .. })
    }
}

/// Comparison for `Δ∞u ≥ h ≥ Δ∞v` on `U` with `h` of one sign.
pub fn verify_comparison(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    v: &ScalarField,
    h: &ScalarField,
    tol: f64,
) -> Result<ComparisonVerdict> {
    let interior = p.interior();
    let pos = interior.iter().find(|&&x| h.get(x).is_some_and(|a| a > 0.0));
    let neg = interior.iter().find(|&&x| h.get(x).is_some_and(|a| a < 0.0));
    if let (Some(&positive), Some(&negative)) = (pos, neg) {
        return Err(Error::SignChangingRhs { positive, negative });
    }
    for &x in interior {
        let hx = h.require(x)?;
        let lu = infinity_laplacian(g, u, x)?;
        if lu < hx - tol {
            return Ok(ComparisonVerdict::HypothesisViolated {
                vertex: x,
                detail: format!("Δ∞u = {lu:e} < h = {hx:e}"),
            });
        }
        let lv = infinity_laplacian(g, v, x)?;
        if lv > hx + tol {
            return Ok(ComparisonVerdict::HypothesisViolated {
                vertex: x,
                detail: format!("Δ∞v = {lv:e} > h = {hx:e}"),
            });
        }
    }
    let mut boundary_sup = f64::NEG_INFINITY;
    for &y in p.boundary() {
        boundary_sup = boundary_sup.max(u.require(y)? - v.require(y)?);
    }
    let mut interior_sup = f64::NEG_INFINITY;
    let mut witness = interior.first().copied().unwrap_or(0);
    for &x in interior {
        let d = u.require(x)? - v.require(x)?;
        if d > interior_sup {
            interior_sup = d;
            witness = x;
        }
    }
    Ok(if interior_sup <= boundary_sup + tol {
        ComparisonVerdict::Holds {
            witness,
            interior_sup,
            boundary_sup,
        }
    } else {
        ComparisonVerdict::Fails {
            witness,
            interior_sup,
            boundary_sup,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_problem(n: usize, g0: f64, g1: f64) -> DirichletProblem {
        let graph = Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap();
        let interior: Vec<usize> = (1..n - 1).collect();
        let p = BoundaryPartition::new(&graph, &interior, &[0, n - 1]).unwrap();
        let g = ScalarField::from_pairs(n, [(0, g0), (n - 1, g1)]).unwrap();
        DirichletProblem::homogeneous(graph, p, g).unwrap()
    }

    #[test]
    fn path_interpolates_linearly() {
        let prob = path_problem(4, 0.0, 3.0);
        let init = prob.field_with(|_| 0.0).unwrap();
        let r = dpp_iterate(&prob, &init, &SolverOptions::default()).unwrap();
        assert!(r.converged);
        for (v, want) in [(1, 1.0), (2, 2.0)] {
            assert!((r.solution.raw()[v] - want).abs() < 1e-8);
        }
        assert_eq!(r.solution.get(3), Some(3.0));
    }

    #[test]
    fn single_interior_vertex_with_source() {
        let graph = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let p = BoundaryPartition::new(&graph, &[1], &[0, 2]).unwrap();
        let f = ScalarField::from_pairs(3, [(1, 0.8)]).unwrap();
        let g = ScalarField::from_pairs(3, [(0, 0.0), (2, 0.0)]).unwrap();
        let prob = DirichletProblem::new(graph, p, f, g).unwrap();
        let r = solve_bounded(&prob, &SolverOptions::default()).unwrap();
        assert!((r.solution.raw()[1] + 0.4).abs() < 1e-12);
    }

    #[test]
    fn sign_changing_rhs_is_rejected() {
        let graph = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let p = BoundaryPartition::new(&graph, &[1, 2], &[0, 3]).unwrap();
        let f = ScalarField::from_pairs(4, [(1, 1.0), (2, -1.0)]).unwrap();
        let g = ScalarField::from_pairs(4, [(0, 0.0), (3, 0.0)]).unwrap();
        let prob = DirichletProblem::new(graph, p, f, g).unwrap();
        assert!(matches!(
            solve_bounded(&prob, &SolverOptions::default()),
            Err(Error::SignChangingRhs { positive: 1, negative: 2 })
        ));
    }

    #[test]
    fn non_convergence_is_reported() {
        let prob = path_problem(12, 0.0, 1.0);
        let init = prob.field_with(|_| 0.0).unwrap();
        let opts = SolverOptions::default().with_max_iter(3);
        let r = dpp_iterate(&prob, &init, &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
        assert!(r.into_converged().is_err());
    }

    #[test]
    fn peeling_star() {
        let graph = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let p = BoundaryPartition::new(&graph, &[0], &[1, 2, 3]).unwrap();
        let g = ScalarField::from_pairs(4, [(1, 0.0), (2, 2.0), (3, 0.5)]).unwrap();
        let prob = DirichletProblem::homogeneous(graph, p, g).unwrap();
        let r = steepest_path_solve(&prob).unwrap();
        assert_eq!(r.solution.get(0), Some(1.0));
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn comparison_on_swapped_roles_is_a_hypothesis_violation() {
        // u = (0,1,0) is superharmonic and v = 0 harmonic: u is not a subsolution.
        let graph = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let p = BoundaryPartition::new(&graph, &[1], &[0, 2]).unwrap();
        let u = ScalarField::from_values(vec![0.0, 1.0, 0.0]).unwrap();
        let v = ScalarField::from_values(vec![0.0; 3]).unwrap();
        let h = ScalarField::from_pairs(3, [(1, 0.0)]).unwrap();
        let verdict = verify_comparison(&graph, &p, &u, &v, &h, 1e-12).unwrap();
        assert!(matches!(verdict, ComparisonVerdict::HypothesisViolated { vertex: 1, .. }));
        let verdict = verify_comparison(&graph, &p, &v, &u, &h, 1e-12).unwrap();
        assert!(verdict.holds());
    }
}
