//! The discrete infinity Laplacian, slopes and subharmonicity tests.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::graph::{BoundaryPartition, Graph};

/// Default absolute tolerance for sign classifications.
pub const DEFAULT_TOL: f64 = 1e-9;

/// One-sided slopes of a field at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeReport {
    pub s_plus: f64,
    pub s_minus: f64,
    pub slope: f64,
}

fn neighbor_extremes(g: &Graph, u: &ScalarField, x: usize) -> Result<(f64, f64)> {
    let nbrs = g.neighbors(x);
    if nbrs.is_empty() {
        return Err(Error::DegenerateVertex(x));
    }
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for &y in nbrs {
        let v = u.require(y)?;
        hi = hi.max(v);
        lo = lo.min(v);
    }
    Ok((hi, lo))
}

/// `Δ∞u(x) = max_{y∼x} u(y) + min_{y∼x} u(y) − 2u(x)`.
pub fn infinity_laplacian(g: &Graph, u: &ScalarField, x: usize) -> Result<f64> {
    let (hi, lo) = neighbor_extremes(g, u, x)?;
    let ux = u.require(x)?;
    Ok((hi - ux) - (ux - lo))
}

pub fn slopes(g: &Graph, u: &ScalarField, x: usize) -> Result<SlopeReport> {
    let (hi, lo) = neighbor_extremes(g, u, x)?;
    let ux = u.require(x)?;
    let s_plus = hi - ux;
    let s_minus = ux - lo;
    Ok(SlopeReport {
        s_plus,
        s_minus,
        slope: s_plus.abs().max(s_minus.abs()),
    })
}

/// `max_{x∈U} |Δ∞u(x) − f(x)|`.
pub fn residual_norm(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    f: &ScalarField,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &x in p.interior() {
        worst = worst.max((infinity_laplacian(g, u, x)? - f.require(x)?).abs());
    }
    Ok(worst)
}

/// Pointwise outcome of a per-vertex test, in interior order.
pub type VertexFlags = Vec<(usize, bool)>;

/// `L(u,x) = S⁺u(x)` at every interior vertex, within `tol`.
pub fn check_condition_ii(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    tol: f64,
) -> Result<VertexFlags> {
    p.interior()
        .iter()
        .map(|&x| {
            let s = slopes(g, u, x)?;
            Ok((x, s.slope <= s.s_plus + tol))
        })
        .collect()
}

/// For each `r` in `1..=r_cap`, the max/min of `u` over the ball `B_r(x)` and over the sphere `S_r(x)`.
struct RadialExtremes {
    ball_max: Vec<f64>,
    sphere_max: Vec<f64>,
}

fn radial_extremes(g: &Graph, u: &ScalarField, x: usize, r_cap: usize) -> Result<RadialExtremes> {
    let mut ball_max = vec![f64::NEG_INFINITY; r_cap + 1];
    let mut sphere_max = vec![f64::NEG_INFINITY; r_cap + 1];
    ball_max[0] = u.require(x)?;
    sphere_max[0] = ball_max[0];
    for (y, d) in g.ball(x, r_cap) {
        if d > 0 {
            let v = u.require(y)?;
            sphere_max[d] = sphere_max[d].max(v);
        }
    }
    for r in 1..=r_cap {
        ball_max[r] = ball_max[r - 1].max(sphere_max[r]);
    }
    Ok(RadialExtremes {
        ball_max,
        sphere_max,
    })
}

fn radial_condition(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    r_max: usize,
    tol: f64,
    sphere: bool,
) -> Result<VertexFlags> {
    if r_max == 0 {
        return crate::error::arg("r_max must be at least 1");
    }
    p.interior()
        .iter()
        .map(|&x| {
            let cap = r_max.min(p.depth(x).unwrap_or(0));
            let slope = slopes(g, u, x)?.slope;
            let ux = u.require(x)?;
            let ext = radial_extremes(g, u, x, cap)?;
            let ok = (1..=cap).all(|r| {
                let top = if sphere { ext.sphere_max[r] } else { ext.ball_max[r] };
                slope * r as f64 <= top - ux + tol
            });
            Ok((x, ok))
        })
        .collect()
}

/// `L(u,x)·r ≤ max_{B_r(x)} u − u(x)` for every `1 ≤ r ≤ min(r_max, d(x, δU))`.
pub fn check_condition_iii(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    r_max: usize,
    tol: f64,
) -> Result<VertexFlags> {
    radial_condition(g, p, u, r_max, tol, false)
}

/// Variant of condition (iii) with the sphere `S_r(x)` in place of the ball.
pub fn check_sphere_condition(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    r_max: usize,
    tol: f64,
) -> Result<VertexFlags> {
    radial_condition(g, p, u, r_max, tol, true)
}

/// `(max_{S_r(x)} u − u(x)) / r`.
pub fn sphere_ratio(g: &Graph, u: &ScalarField, x: usize, r: usize) -> Result<f64> {
    if r == 0 {
        return crate::error::arg("radius must be at least 1");
    }
    let ext = radial_extremes(g, u, x, r)?;
    if ext.sphere_max[r] == f64::NEG_INFINITY {
        return crate::error::arg(format!("sphere of radius {r} around {x} is empty"));
    }
    Ok((ext.sphere_max[r] - u.require(x)?) / r as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    Harmonic,
    StrictlySubharmonic,
    StrictlySuperharmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    Harmonic,
    Subharmonic,
    Superharmonic,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexClass {
    pub vertex: usize,
    pub residual: f64,
    pub class: Class,
}

/// Residual `Δ∞u − f` and its sign at every interior vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicityReport {
    pub tolerance: f64,
    pub vertices: Vec<VertexClass>,
}

impl HarmonicityReport {
    pub fn overall(&self) -> Overall {
        let sub = self.is_subharmonic();
        let sup = self.is_superharmonic();
        match (sub, sup) {
            (true, true) => Overall::Harmonic,
            (true, false) => Overall::Subharmonic,
            (false, true) => Overall::Superharmonic,
            (false, false) => Overall::Neither,
        }
    }

    pub fn is_subharmonic(&self) -> bool {
        self.vertices.iter().all(|v| v.class != Class::StrictlySuperharmonic)
    }

    pub fn is_superharmonic(&self) -> bool {
        self.vertices.iter().all(|v| v.class != Class::StrictlySubharmonic)
    }

    /// Vertex with the most negative residual, if any is below `−tol`.
    pub fn worst_subharmonic_violation(&self) -> Option<&VertexClass> {
        self.vertices
            .iter()
            .filter(|v| v.class == Class::StrictlySuperharmonic)
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
    }

    pub fn worst_superharmonic_violation(&self) -> Option<&VertexClass> {
        self.vertices
            .iter()
            .filter(|v| v.class == Class::StrictlySubharmonic)
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
    }

    pub fn min_residual(&self) -> f64 {
        self.vertices.iter().map(|v| v.residual).fold(f64::INFINITY, f64::min)
    }

    pub fn get(&self, vertex: usize) -> Option<&VertexClass> {
        self.vertices.iter().find(|v| v.vertex == vertex)
    }
}

/// Classifies `Δ∞u − f` on `U`; a missing `f` means `f ≡ 0`.
pub fn classify(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    f: Option<&ScalarField>,
    tol: f64,
) -> Result<HarmonicityReport> {
    if !(tol >= 0.0) {
        return crate::error::arg(format!("tolerance must be non-negative, got {tol}"));
    }
    let mut vertices = Vec::with_capacity(p.interior().len());
    for &x in p.interior() {
        let rhs = match f {
            Some(f) => f.require(x)?,
            None => 0.0,
        };
        let residual = infinity_laplacian(g, u, x)? - rhs;
        let class = if residual > tol {
            Class::StrictlySubharmonic
        } else if residual < -tol {
            Class::StrictlySuperharmonic
        } else {
            Class::Harmonic
        };
        vertices.push(VertexClass {
            vertex: x,
            residual,
            class,
        });
    }
    Ok(HarmonicityReport {
        tolerance: tol,
        vertices,
    })
}

/// Errors with the worst vertex unless `Δ∞u ≥ −tol` on `U`.
pub fn require_subharmonic(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    tol: f64,
) -> Result<()> {
    let report = classify(g, p, u, None, tol)?;
    match report.worst_subharmonic_violation() {
        None => Ok(()),
        Some(v) => Err(Error::Precondition {
            vertex: v.vertex,
            reason: format!("field is not infinity subharmonic (Δ∞u = {:e})", v.residual),
        }),
    }
}
