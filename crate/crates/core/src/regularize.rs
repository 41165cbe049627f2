//! Steepening a subharmonic field on its flat set.
//!
//! On each component `K` of `O_ε = {x ∈ U : L(u,x) ≤ ε}` the field is replaced by
//! `w_ε(x) = max_{y ∈ δK} (u(y) − ε·d_K(x, y))`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::field::ScalarField;
use crate::graph::{connected_components, intrinsic_distances_from, outer_boundary, BoundaryPartition, Graph};
use crate::operator::{infinity_laplacian, require_subharmonic, slopes, DEFAULT_TOL};

/// Membership rule for the flat set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FlatRule {
    /// `L(u,x) ≤ ε`.
    #[default]
    AtMost,
    /// `L(u,x) < ε`; does not preserve subharmonicity in general.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatComponent {
    pub vertices: Vec<usize>,
    /// `δK` in the ambient graph.
    pub boundary: Vec<usize>,
    /// `distances[j][i] = d_K(vertices[i], boundary[j])`.
    pub distances: Vec<Vec<Option<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatSet {
    pub epsilon: f64,
    pub rule: FlatRule,
    pub vertices: Vec<usize>,
    pub components: Vec<FlatComponent>,
}

impl FlatSet {
    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizeOptions<'a> {
    pub rule: FlatRule,
    /// Tolerance of the subharmonicity precondition.
    pub tol: f64,
    /// Per-vertex slopes to use instead of `L(u,x)` computed from the graph.
    /// Lets a finite fixture stand in for a vertex of infinite degree.
    pub slopes: Option<&'a [f64]>,
}

impl Default for RegularizeOptions<'_> {
    fn default() -> Self {
        Self {
            rule: FlatRule::AtMost,
            tol: DEFAULT_TOL,
            slopes: None,
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return arg(format!("ε must be positive and finite, got {eps}"));
    }
    Ok(())
}

pub fn flat_set(g: &Graph, p: &BoundaryPartition, u: &ScalarField, eps: f64) -> Result<FlatSet> {
    flat_set_with(g, p, u, eps, &RegularizeOptions::default())
}

pub fn flat_set_with(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    eps: f64,
    opts: &RegularizeOptions,
) -> Result<FlatSet> {
    check_eps(eps)?;
    if let Some(s) = opts.slopes {
        if s.len() != g.vertex_count() {
            return arg("slope override has the wrong length");
        }
    }
    let mut vertices = Vec::new();
    for &x in p.interior() {
        let slope = match opts.slopes {
            Some(s) => s[x],
            None => slopes(g, u, x)?.slope,
        };
        let flat = match opts.rule {
            FlatRule::AtMost => slope <= eps,
            FlatRule::Strict => slope < eps,
        };
        if flat {
            vertices.push(x);
        }
    }
    let components = connected_components(g, &vertices)
        .into_par_iter()
        .map(|k| {
            let mut mask = vec![false; g.vertex_count()];
            for &v in &k {
                mask[v] = true;
            }
            let boundary = outer_boundary(g, &k);
            let distances = boundary
                .iter()
                .map(|&y| {
                    let d = intrinsic_distances_from(g, &mask, y);
                    k.iter().map(|&x| d[x]).collect()
                })
                .collect();
            FlatComponent {
                vertices: k,
                boundary,
                distances,
            }
        })
        .collect::<Vec<_>>();
    Ok(FlatSet {
        epsilon: eps,
        rule: opts.rule,
        vertices,
        components,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizedField {
    pub epsilon: f64,
    pub flat: FlatSet,
    pub u_eps: ScalarField,
}

pub fn regularize(g: &Graph, p: &BoundaryPartition, u: &ScalarField, eps: f64) -> Result<RegularizedField> {
    regularize_with(g, p, u, eps, &RegularizeOptions::default())
}

pub fn regularize_with(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    eps: f64,
    opts: &RegularizeOptions,
) -> Result<RegularizedField> {
    check_eps(eps)?;
    require_subharmonic(g, p, u, opts.tol)?;
    let flat = flat_set_with(g, p, u, eps, opts)?;
    let mut u_eps = u.clone();
    for comp in &flat.components {
        if comp.boundary.is_empty() {
            return Err(Error::InternalConsistency(format!(
                "flat component containing {} has empty boundary",
                comp.vertices[0]
            )));
        }
        for (i, &x) in comp.vertices.iter().enumerate() {
            let mut best = f64::NEG_INFINITY;
            for (j, &y) in comp.boundary.iter().enumerate() {
                if let Some(d) = comp.distances[j][i] {
                    best = best.max(u.require(y)? - eps * d as f64);
                }
            }
            if best == f64::NEG_INFINITY {
                return Err(Error::InternalConsistency(format!(
                    "vertex {x} reaches no boundary vertex of its flat component"
                )));
            }
            u_eps.set(x, best)?;
        }
    }
    Ok(RegularizedField {
        epsilon: eps,
        flat,
        u_eps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonRecord {
    pub epsilon: f64,
    pub flat_size: usize,
    /// `min_U Δ∞u_ε`.
    pub min_laplacian: f64,
    /// `min_U L(u_ε, ·)`.
    pub min_slope: f64,
    /// `max (u_ε − u)`, at most zero.
    pub max_excess: f64,
    /// `max_U (u − u_ε)`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop31Report {
    pub records: Vec<EpsilonRecord>,
    /// `max_U (u − u_ε)` at the smallest `ε`.
    pub final_gap: f64,
}

fn violation(property: &str, vertex: usize, detail: String) -> Error {
    Error::PropertyViolation {
        property: property.into(),
        vertex,
        detail,
    }
}

/// Checks subharmonicity, `u_ε ≤ u` with equality off the flat set, `L(u_ε) ≥ ε`,
/// and pointwise monotone convergence along a decreasing `ε` list.
pub fn verify_prop31(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    eps_list: &[f64],
    tol: f64,
) -> Result<Prop31Report> {
    if eps_list.is_empty() {
        return arg("empty ε list");
    }
    if eps_list.windows(2).any(|w| w[0] <= w[1]) {
        return arg("ε list must be strictly decreasing");
    }
    let opts = RegularizeOptions {
        tol,
        ..RegularizeOptions::default()
    };
    let mut records = Vec::new();
    let mut previous: Option<ScalarField> = None;
    for &eps in eps_list {
        let reg = regularize_with(g, p, u, eps, &opts)?;
        let ue = &reg.u_eps;
        let mut min_laplacian = f64::INFINITY;
        let mut min_slope = f64::INFINITY;
        for &x in p.interior() {
            let lap = infinity_laplacian(g, ue, x)?;
            if lap < -tol {
                return Err(violation("subharmonic", x, format!("ε = {eps}: Δ∞u_ε = {lap:e}")));
            }
            let slope = slopes(g, ue, x)?.slope;
            if slope < eps - tol {
                return Err(violation("steep", x, format!("ε = {eps}: L(u_ε) = {slope} < ε")));
            }
            min_laplacian = min_laplacian.min(lap);
            min_slope = min_slope.min(slope);
        }
        let mut max_excess = f64::NEG_INFINITY;
        let mut gap: f64 = 0.0;
        for (v, orig) in u.iter() {
            let now = ue.require(v)?;
            if !reg.flat.contains(v) && now != orig {
                return Err(violation("unchanged off flat set", v, format!("ε = {eps}: {orig} → {now}")));
            }
            if now > orig + tol {
                return Err(violation("below u", v, format!("ε = {eps}: u_ε = {now} > u = {orig}")));
            }
            max_excess = max_excess.max(now - orig);
            if p.is_interior(v) {
                gap = gap.max(orig - now);
            }
        }
        if let Some(prev) = &previous {
            for (v, before) in prev.iter() {
                let now = ue.require(v)?;
                if now < before - tol {
                    return Err(violation(
                        "monotone in ε",
                        v,
                        format!("ε = {eps}: u_ε = {now} dropped below {before}"),
                    ));
                }
            }
        }
        records.push(EpsilonRecord {
            epsilon: eps,
            flat_size: reg.flat.vertices.len(),
            min_laplacian,
            min_slope,
            max_excess,
            gap,
        });
        previous = Some(reg.u_eps);
    }
    let final_gap = records.last().map(|r| r.gap).unwrap_or(0.0);
    Ok(Prop31Report { records, final_gap })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCheck {
    pub holds: bool,
    /// First vertex with `u_ε(x) > sup_δU u − ε|x| + tol`, with both sides.
    pub witness: Option<(usize, f64, f64)>,
    /// `min_U (sup_δU u − ε|x| − u_ε(x))`.
    pub min_slack: f64,
}

/// `u_ε(x) ≤ sup_δU u − ε|x|` at every interior vertex.
pub fn decay_bound_check(
    g: &Graph,
    p: &BoundaryPartition,
    u: &ScalarField,
    eps: f64,
    tol: f64,
) -> Result<DecayCheck> {
    let reg = regularize_with(
        g,
        p,
        u,
        eps,
        &RegularizeOptions {
            tol,
            ..RegularizeOptions::default()
        },
    )?;
    let top = u.max_on(p.boundary())?;
    let mut witness = None;
    let mut min_slack = f64::INFINITY;
    for &x in p.interior() {
        let depth = p
            .depth(x)
            .ok_or_else(|| Error::InternalConsistency(format!("interior vertex {x} has no depth")))?;
        let rhs = top - eps * depth as f64;
        let lhs = reg.u_eps.require(x)?;
        min_slack = min_slack.min(rhs - lhs);
        if lhs > rhs + tol && witness.is_none() {
            witness = Some((x, lhs, rhs));
        }
    }
    Ok(DecayCheck {
        holds: witness.is_none(),
        witness,
        min_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_line(n: usize) -> (Graph, BoundaryPartition) {
        let g = Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap();
        let interior: Vec<usize> = (1..n - 1).collect();
        // The far end is a boundary vertex too so the path is a finite problem.
        let p = BoundaryPartition::new(&g, &interior, &[0, n - 1]).unwrap();
        (g, p)
    }

    #[test]
    fn constant_field_is_entirely_flat() {
        let (g, p) = half_line(6);
        let u = ScalarField::from_values(vec![0.0; 6]).unwrap();
        let flat = flat_set(&g, &p, &u, 0.1).unwrap();
        assert_eq!(flat.vertices, vec![1, 2, 3, 4]);
        assert_eq!(flat.components.len(), 1);
        assert_eq!(flat.components[0].boundary, vec![0, 5]);
    }

    #[test]
    fn steep_field_has_empty_flat_set() {
        let (g, p) = half_line(5);
        let u = ScalarField::from_values((0..5).map(|i| i as f64).collect()).unwrap();
        let reg = regularize(&g, &p, &u, 0.5).unwrap();
        assert!(reg.flat.vertices.is_empty());
        assert_eq!(reg.u_eps, u);
    }

    #[test]
    fn cone_from_both_ends() {
        let (g, p) = half_line(6);
        let u = ScalarField::from_values(vec![0.0; 6]).unwrap();
        let reg = regularize(&g, &p, &u, 0.5).unwrap();
        let want = [0.0, -0.5, -1.0, -1.0, -0.5, 0.0];
        assert_eq!(reg.u_eps.raw(), &want);
    }

    #[test]
    fn non_subharmonic_input_is_rejected() {
        let (g, p) = half_line(3);
        let u = ScalarField::from_values(vec![0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(regularize(&g, &p, &u, 0.5), Err(Error::Precondition { vertex: 1, .. })));
    }
}
