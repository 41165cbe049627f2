//! ε-graphs on planar domains and convergence studies for the homogeneous problem.
//!
//! Vertices are grid samples of `Ω` with spacing `h` plus samples of `∂Ω`;
//! `x ∼ y` iff the intrinsic distance of `Ω̄` is below `ε`.

use rayon::prelude::*;
use serde::Serialize;

use crate::dirichlet::{dpp_iterate, DirichletProblem, SolveReport, SolverOptions};
use crate::error::{arg, Error, Result};
use crate::field::ScalarField;
use crate::graph::{BoundaryPartition, Graph};

pub type Point = [f64; 2];

fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Distance from `p` to the segment `[a, b]`.
fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    dist(p, [a[0] + t * d[0], a[1] + t * d[1]])
}

/// Shortest path from `a` to `b` avoiding the open disk of radius `rho` at the origin.
fn around_disk(a: Point, b: Point, rho: f64) -> f64 {
    let straight = dist(a, b);
    if segment_distance([0.0, 0.0], a, b) >= rho {
        return straight;
    }
    let (ra, rb) = (norm(a).max(rho), norm(b).max(rho));
    let cos = ((a[0] * b[0] + a[1] * b[1]) / (norm(a) * norm(b))).clamp(-1.0, 1.0);
    let theta = cos.acos();
    let arc = theta - (rho / ra).clamp(-1.0, 1.0).acos() - (rho / rb).clamp(-1.0, 1.0).acos();
    if arc <= 0.0 {
        return straight;
    }
    (ra * ra - rho * rho).max(0.0).sqrt() + (rb * rb - rho * rho).max(0.0).sqrt() + rho * arc
}

/// Open interval of `t ∈ (0, 1)` on which `s + t·d > c`.
fn above(s: f64, d: f64, c: f64) -> (f64, f64) {
    if d == 0.0 {
        return if s > c { (0.0, 1.0) } else { (1.0, 0.0) };
    }
    let t = (c - s) / d;
    if d > 0.0 { (t.max(0.0), 1.0) } else { (0.0, t.min(1.0)) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Domain {
    /// `[x0, x1] × [y0, y1]`.
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
    /// `r_in ≤ |x| ≤ r_out`.
    Annulus { r_in: f64, r_out: f64 },
    /// `[0, 2]² ∖ (1, 2]²`.
    LShape,
    /// `|x| ≥ radius`, sampled inside `[−window, window]²`.
    ExteriorDisk { radius: f64, window: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Site {
    Inside,
    Boundary,
    Outside,
}

impl Domain {
    pub fn unit_square() -> Self {
        Domain::Rect { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 }
    }

    pub fn is_convex(&self) -> bool {
        matches!(self, Domain::Rect { .. })
    }

    /// Sampling window `(lo, hi)` in both coordinates.
    pub fn window(&self) -> (Point, Point) {
        match *self {
            Domain::Rect { x0, y0, x1, y1 } => ([x0, y0], [x1, y1]),
            Domain::Annulus { r_out, .. } => ([-r_out, -r_out], [r_out, r_out]),
            Domain::LShape => ([0.0, 0.0], [2.0, 2.0]),
            Domain::ExteriorDisk { window, .. } => ([-window, -window], [window, window]),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Domain::Rect { x0, y0, x1, y1 } => x1 > x0 && y1 > y0,
            Domain::Annulus { r_in, r_out } => r_in > 0.0 && r_out > r_in,
            Domain::LShape => true,
            Domain::ExteriorDisk { radius, window } => radius > 0.0 && window > radius,
        };
        if ok {
            Ok(())
        } else {
            arg(format!("degenerate domain {self:?}"))
        }
    }

    /// Grid spacing actually used: the window side divided into whole cells.
    fn grid_step(&self, h: f64) -> f64 {
        let (lo, hi) = self.window();
        let unit = match self {
            Domain::LShape => 1.0,
            _ => (hi[0] - lo[0]).min(hi[1] - lo[1]),
        };
        unit / (unit / h).ceil()
    }

    /// Classifies a grid point; `tol` absorbs rounding of grid coordinates.
    fn site(&self, p: Point, tol: f64) -> Site {
        match *self {
            Domain::Rect { x0, y0, x1, y1 } => {
                let inside = p[0] > x0 + tol && p[0] < x1 - tol && p[1] > y0 + tol && p[1] < y1 - tol;
                if inside {
                    Site::Inside
                } else if p[0] >= x0 - tol && p[0] <= x1 + tol && p[1] >= y0 - tol && p[1] <= y1 + tol {
                    Site::Boundary
                } else {
                    Site::Outside
                }
            }
            Domain::Annulus { r_in, r_out } => {
                let r = norm(p);
                if r > r_in + tol && r < r_out - tol {
                    Site::Inside
                } else {
                    // Circle samples are generated separately.
                    Site::Outside
                }
            }
            Domain::LShape => {
                let in_box = |q: Point, t: f64| q[0] > t && q[0] < 2.0 - t && q[1] > t && q[1] < 2.0 - t;
                let notch = |q: Point, t: f64| q[0] > 1.0 + t && q[1] > 1.0 + t;
                if in_box(p, tol) && !notch(p, -tol) {
                    Site::Inside
                } else if in_box(p, -tol) && !notch(p, tol) {
                    Site::Boundary
                } else {
                    Site::Outside
                }
            }
            Domain::ExteriorDisk { radius, window } => {
                let strict = p[0].abs() < window - tol && p[1].abs() < window - tol;
                if norm(p) <= radius + tol {
                    Site::Outside
                } else if strict {
                    Site::Inside
                } else if p[0].abs() <= window + tol && p[1].abs() <= window + tol {
                    Site::Boundary
                } else {
                    Site::Outside
                }
            }
        }
    }

    /// Samples of circular boundary pieces at arc spacing at most `h`.
    fn circle_samples(&self, h: f64) -> Vec<Point> {
        let circles: Vec<f64> = match *self {
            Domain::Annulus { r_in, r_out } => vec![r_in, r_out],
            Domain::ExteriorDisk { radius, .. } => vec![radius],
            _ => Vec::new(),
        };
        let mut out = Vec::new();
        for r in circles {
            let count = (2.0 * std::f64::consts::PI * r / h).ceil() as usize;
            for k in 0..count {
                let a = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                out.push([r * a.cos(), r * a.sin()]);
            }
        }
        out
    }

    /// Intrinsic distance of the closed domain.
    pub fn geodesic(&self, a: Point, b: Point) -> f64 {
        match *self {
            Domain::Rect { .. } => dist(a, b),
            Domain::Annulus { r_in, .. } => around_disk(a, b, r_in),
            Domain::ExteriorDisk { radius, .. } => around_disk(a, b, radius),
            Domain::LShape => {
                let d = [b[0] - a[0], b[1] - a[1]];
                let (s0, e0) = above(a[0], d[0], 1.0);
                let (s1, e1) = above(a[1], d[1], 1.0);
                if s0.max(s1) < e0.min(e1) {
                    dist(a, [1.0, 1.0]) + dist([1.0, 1.0], b)
                } else {
                    dist(a, b)
                }
            }
        }
    }

    /// Distance to the boundary of the sampled region (frame included).
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match *self {
            Domain::Rect { x0, y0, x1, y1 } => (p[0] - x0).min(x1 - p[0]).min(p[1] - y0).min(y1 - p[1]),
            Domain::Annulus { r_in, r_out } => (norm(p) - r_in).min(r_out - norm(p)),
            Domain::LShape => {
                let corners = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
                (0..6)
                    .map(|i| segment_distance(p, corners[i], corners[(i + 1) % 6]))
                    .fold(f64::INFINITY, f64::min)
            }
            Domain::ExteriorDisk { radius, window } => {
                (norm(p) - radius).min(window - p[0].abs()).min(window - p[1].abs())
            }
        }
    }
}

/// Role of a boundary sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Interior,
    Boundary,
    /// Artificial window edge of an unbounded domain.
    Frame,
}

#[derive(Debug, Clone)]
pub struct EpsilonGraph {
    pub domain: Domain,
    pub points: Vec<Point>,
    pub kinds: Vec<SampleKind>,
    pub graph: Graph,
    pub partition: BoundaryPartition,
    pub eps: f64,
    pub h: f64,
}

pub fn build_epsilon_graph(domain: Domain, eps: f64, h: f64) -> Result<EpsilonGraph> {
    domain.validate()?;
    if !(eps > 0.0) || !(h > 0.0) || h > eps / 4.0 * (1.0 + 1e-12) {
        return arg(format!("need 0 < h ≤ ε/4, got ε = {eps}, h = {h}"));
    }
    let step = domain.grid_step(h);
    let (lo, hi) = domain.window();
    let tol = step * 1e-6;
    let nx = ((hi[0] - lo[0]) / step).round() as usize;
    let ny = ((hi[1] - lo[1]) / step).round() as usize;
    let mut points = Vec::new();
    let mut kinds = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let p = [lo[0] + i as f64 * step, lo[1] + j as f64 * step];
            let kind = match domain.site(p, tol) {
                Site::Inside => SampleKind::Interior,
                Site::Boundary if matches!(domain, Domain::ExteriorDisk { .. }) => SampleKind::Frame,
                Site::Boundary => SampleKind::Boundary,
                Site::Outside => continue,
            };
            points.push(p);
            kinds.push(kind);
        }
    }
    for p in domain.circle_samples(step) {
        points.push(p);
        kinds.push(SampleKind::Boundary);
    }
    if !kinds.contains(&SampleKind::Interior) {
        return arg("no interior samples; decrease h");
    }

    // Bucket by ε-cells so candidate pairs come from the 3×3 block.
    let cells_x = ((hi[0] - lo[0]) / eps).floor() as usize + 1;
    let cells_y = ((hi[1] - lo[1]) / eps).floor() as usize + 1;
    let cell = |p: Point| {
        let cx = (((p[0] - lo[0]) / eps).floor().max(0.0) as usize).min(cells_x - 1);
        let cy = (((p[1] - lo[1]) / eps).floor().max(0.0) as usize).min(cells_y - 1);
        (cx, cy)
    };
    let mut buckets = vec![Vec::new(); cells_x * cells_y];
    for (v, &p) in points.iter().enumerate() {
        let (cx, cy) = cell(p);
        buckets[cy * cells_x + cx].push(v);
    }
    let adjacency: Vec<Vec<usize>> = (0..points.len())
        .into_par_iter()
        .map(|v| {
            let (cx, cy) = cell(points[v]);
            let mut out = Vec::new();
            for by in cy.saturating_sub(1)..=(cy + 1).min(cells_y - 1) {
                for bx in cx.saturating_sub(1)..=(cx + 1).min(cells_x - 1) {
                    for &w in &buckets[by * cells_x + bx] {
                        if w == v {
                            continue;
                        }
                        // Evaluate in a fixed orientation so the relation is symmetric.
                        let (a, b) = if v < w { (v, w) } else { (w, v) };
                        if domain.geodesic(points[a], points[b]) < eps {
                            out.push(w);
                        }
                    }
                }
            }
            out.sort_unstable();
            out
        })
        .collect();
    let graph = Graph::from_adjacency(adjacency)?;
    let interior: Vec<usize> = (0..points.len()).filter(|&v| kinds[v] == SampleKind::Interior).collect();
    // Boundary samples not adjacent to the interior are dropped from the problem.
    let boundary: Vec<usize> = (0..points.len())
        .filter(|&v| kinds[v] != SampleKind::Interior)
        .filter(|&v| graph.neighbors(v).iter().any(|&w| kinds[w] == SampleKind::Interior))
        .collect();
    let partition = BoundaryPartition::new(&graph, &interior, &boundary).map_err(|e| match e {
        Error::InvalidPartition(msg) => Error::InvalidPartition(format!("ε-graph: {msg}")),
        other => other,
    })?;
    Ok(EpsilonGraph {
        domain,
        points,
        kinds,
        graph,
        partition,
        eps,
        h: step,
    })
}

/// Analytic functions used as data and references.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    Constant { c: f64 },
    Affine { a: f64, b: f64, c: f64 },
    /// `|x − center|`.
    Cone { center: Point },
    /// `|x|^{4/3} − |y|^{4/3}`.
    Aronsson,
}

impl Profile {
    pub fn eval(&self, p: Point) -> f64 {
        match *self {
            Profile::Constant { c } => c,
            Profile::Affine { a, b, c } => a * p[0] + b * p[1] + c,
            Profile::Cone { center } => dist(p, center),
            Profile::Aronsson => p[0].abs().powf(4.0 / 3.0) - p[1].abs().powf(4.0 / 3.0),
        }
    }
}

impl EpsilonGraph {
    /// `u(x) = φ(x)` at every vertex.
    pub fn sample(&self, phi: impl Fn(Point) -> f64) -> Result<ScalarField> {
        ScalarField::from_values(self.points.iter().map(|&p| phi(p)).collect())
    }

    /// `Δ∞^ε u = ε²·f` with `g` on `∂Ω` and `sup g` on the frame.
    pub fn problem(&self, f: impl Fn(Point) -> f64, g: impl Fn(Point) -> f64) -> Result<DirichletProblem> {
        let n = self.points.len();
        let true_boundary = self
            .partition
            .boundary()
            .iter()
            .filter(|&&v| self.kinds[v] == SampleKind::Boundary);
        let cap = true_boundary
            .map(|&v| g(self.points[v]))
            .fold(f64::NEG_INFINITY, f64::max);
        let mut data = ScalarField::undefined(n);
        for &v in self.partition.boundary() {
            let value = match self.kinds[v] {
                SampleKind::Frame => cap,
                _ => g(self.points[v]),
            };
            data.set(v, value)?;
        }
        let scale = self.eps * self.eps;
        let rhs = ScalarField::from_pairs(
            n,
            self.partition.interior().iter().map(|&v| (v, scale * f(self.points[v]))),
        )?;
        DirichletProblem::new(self.graph.clone(), self.partition.clone(), rhs, data)
    }

    /// Interior samples at distance at least `2ε` from the boundary.
    pub fn inner_samples(&self) -> Vec<usize> {
        self.partition
            .interior()
            .iter()
            .copied()
            .filter(|&v| self.domain.boundary_distance(self.points[v]) >= 2.0 * self.eps)
            .collect()
    }
}

/// Solves the discrete problem from the supersolution start.
pub fn solve_epsilon(
    eg: &EpsilonGraph,
    f: impl Fn(Point) -> f64,
    g: impl Fn(Point) -> f64,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    let prob = eg.problem(f, g)?;
    if let Some((positive, negative)) = prob.sign_change() {
        return Err(Error::SignChangingRhs { positive, negative });
    }
    dpp_iterate(&prob, &prob.supersolution()?, opts)
}

/// Max and min of `u` over each closed ε-ball (the vertex and its neighbors).
pub fn envelopes(eg: &EpsilonGraph, u: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    let n = eg.graph.vertex_count();
    let mut upper = ScalarField::undefined(n);
    let mut lower = ScalarField::undefined(n);
    for v in 0..n {
        let mut hi = u.require(v)?;
        let mut lo = hi;
        for &w in eg.graph.neighbors(v) {
            let x = u.require(w)?;
            hi = hi.max(x);
            lo = lo.min(x);
        }
        upper.set(v, hi)?;
        lower.set(v, lo)?;
    }
    Ok((upper, lower))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    /// `min Δ∞^ε(u^ε)` over `Ω_{2ε}` samples.
    pub upper_min: f64,
    /// `max Δ∞^ε(u_ε)` over `Ω_{2ε}` samples.
    pub lower_max: f64,
    pub samples: usize,
}

/// Signs of the discrete operator applied to the ε-envelopes on `Ω_{2ε}`.
pub fn envelope_check(eg: &EpsilonGraph, u: &ScalarField) -> Result<EnvelopeCheck> {
    let (upper, lower) = envelopes(eg, u)?;
    let inner = eg.inner_samples();
    let mut upper_min = f64::INFINITY;
    let mut lower_max = f64::NEG_INFINITY;
    for &v in &inner {
        upper_min = upper_min.min(crate::operator::infinity_laplacian(&eg.graph, &upper, v)?);
        lower_max = lower_max.max(crate::operator::infinity_laplacian(&eg.graph, &lower, v)?);
    }
    Ok(EnvelopeCheck {
        upper_min,
        lower_max,
        samples: inner.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub h: f64,
    pub vertices: usize,
    /// `max |u − reference|` over interior samples; `None` if the solve failed.
    pub sup_error: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Every row solved and errors strictly decrease down the table.
    pub fn strictly_decreasing(&self) -> bool {
        let errs: Option<Vec<f64>> = self.rows.iter().map(|r| r.sup_error).collect();
        match errs {
            Some(e) => e.windows(2).all(|w| w[1] < w[0]),
            None => false,
        }
    }
}

/// Solutions and the table of a convergence study.
#[derive(Debug, Clone)]
pub struct Study {
    pub table: ConvergenceTable,
    pub solutions: Vec<Option<(EpsilonGraph, ScalarField)>>,
}

/// Builds and solves for each `ε` (largest first) with `h = ε / h_ratio`.
pub fn convergence_study(
    domain: Domain,
    g: Profile,
    reference: Profile,
    eps_list: &[f64],
    h_ratio: f64,
    opts: &SolverOptions,
) -> Result<Study> {
    if h_ratio < 4.0 {
        return arg("h ratio must be at least 4");
    }
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.total_cmp(a));
    let mut rows = Vec::new();
    let mut solutions = Vec::new();
    for eps in eps_sorted {
        let h = eps / h_ratio;
        let outcome = build_epsilon_graph(domain, eps, h)
            .and_then(|eg| solve_epsilon(&eg, |_| 0.0, |p| g.eval(p), opts).map(|r| (eg, r)));
        match outcome {
            Ok((eg, report)) => {
                let err = eg
                    .partition
                    .interior()
                    .iter()
                    .map(|&v| (report.solution.raw()[v] - reference.eval(eg.points[v])).abs())
                    .fold(0.0, f64::max);
                rows.push(ConvergenceRow {
                    eps,
                    h: eg.h,
                    vertices: eg.points.len(),
                    sup_error: Some(err),
                    iterations: report.iterations,
                    residual: report.residual,
                    converged: report.converged,
                    failure: None,
                });
                solutions.push(Some((eg, report.solution)));
            }
            Err(e) => {
                rows.push(ConvergenceRow {
                    eps,
                    h,
                    vertices: 0,
                    sup_error: None,
                    iterations: 0,
                    residual: f64::NAN,
                    converged: false,
                    failure: Some(e.to_string()),
                });
                solutions.push(None);
            }
        }
    }
    Ok(Study {
        table: ConvergenceTable { rows },
        solutions,
    })
}
