//! Bounded solutions of `Δ∞u = 0` on infinite graphs as limits over growing balls.
//!
//! At radius `r` the problem lives on `B_r(δU)` with data `g` on `δU` and the
//! constant `sup g` on `S_{r+1}(δU)`. Each radius warm-starts from the previous
//! solution extended by `sup g`, which is a supersolution of the next problem,
//! so window values can only decrease.

use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

use crate::dirichlet::{dpp_iterate, DirichletProblem, SolverOptions};
use crate::error::{arg, Error, Result};
use crate::field::ScalarField;
use crate::oracle::{truncate, GraphOracle, Truncation};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExhaustionOptions {
    pub radii: Vec<usize>,
    /// Window is `B_{window_r}(δU)`.
    pub window_r: usize,
    pub tol: f64,
    /// Stop as soon as two successive window solutions agree within `tol`.
    pub early_stop: bool,
    /// Also run with the outer cap `inf g` to bracket the limit from below.
    pub lower_bracket: bool,
    /// Allowed increase of a window value between radii.
    pub monotonicity_tol: f64,
    pub solver: SolverOptions,
}

impl Default for ExhaustionOptions {
    fn default() -> Self {
        Self {
            radii: doubling_schedule(4, 64),
            window_r: 4,
            tol: 1e-6,
            early_stop: true,
            lower_bracket: false,
            monotonicity_tol: 1e-10,
            solver: SolverOptions::default().with_tol(1e-12),
        }
    }
}

/// `start, 2·start, 4·start, …` up to `cap`.
pub fn doubling_schedule(start: usize, cap: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut r = start.max(1);
    while r <= cap {
        out.push(r);
        r *= 2;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusRecord {
    pub radius: usize,
    /// Values on the window, in window order.
    pub window: Vec<f64>,
    /// Window values of the `inf g`-capped run.
    pub lower: Option<Vec<f64>>,
    /// Sup-change on the window from the previous radius.
    pub change: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub solver_converged: bool,
}

#[derive(Debug, Clone)]
pub struct ExhaustionRun<K> {
    pub window: Vec<K>,
    pub records: Vec<RadiusRecord>,
    /// Successive window solutions agreed within `tol`.
    pub converged: bool,
    pub truncation: Truncation<K>,
    pub solution: ScalarField,
    pub g_sup: f64,
    pub g_inf: f64,
}

impl<K: Clone + Eq + Hash + Debug> ExhaustionRun<K> {
    pub fn final_window(&self) -> &[f64] {
        &self.records.last().expect("at least one radius").window
    }

    /// Largest `upper − lower` over the window at the last radius.
    pub fn bracket_gap(&self) -> Option<f64> {
        let last = self.records.last()?;
        let lower = last.lower.as_ref()?;
        Some(
            last.window
                .iter()
                .zip(lower)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    /// Per-radius fields `sup_{B_r(δU)} |u| / r` evaluated on the final solution.
    pub fn sublinearity(&self, radii: &[usize]) -> Result<SublinearityTrace> {
        let depths = &self.truncation.depth;
        let values = self.solution.raw();
        sublinearity_ratio(
            radii,
            self.truncation
                .partition
                .interior()
                .iter()
                .map(|&v| (depths[v], values[v])),
        )
    }
}

fn capped_problem<K>(t: &Truncation<K>, g: &[f64], cap: f64) -> Result<DirichletProblem> {
    let n = t.graph.vertex_count();
    let mut data = ScalarField::undefined(n);
    for (&v, &x) in t.inner_boundary.iter().zip(g) {
        data.set(v, x)?;
    }
    for &v in &t.outer_sphere {
        data.set(v, cap)?;
    }
    DirichletProblem::homogeneous(t.graph.clone(), t.partition.clone(), data)
}

fn warm_start(prob: &DirichletProblem, prev: Option<&ScalarField>, fill: f64) -> Result<ScalarField> {
    prob.field_with(|v| match prev {
        Some(p) if v < p.len() => p.get(v).unwrap_or(fill),
        _ => fill,
    })
}

/// Exhaustion over `opts.radii` with boundary data `g` on the oracle's seed.
pub fn solve_exhaustion<O: GraphOracle>(
    o: &O,
    g: impl Fn(&O::Key) -> f64,
    opts: &ExhaustionOptions,
) -> Result<ExhaustionRun<O::Key>> {
    if opts.radii.is_empty() {
        return arg("empty radius schedule");
    }
    if opts.radii.windows(2).any(|w| w[0] >= w[1]) {
        return arg("radii must be strictly increasing");
    }
    if opts.window_r == 0 || opts.window_r > opts.radii[0] {
        return arg(format!(
            "window radius {} must lie in 1..={}",
            opts.window_r, opts.radii[0]
        ));
    }
    let seed = o.boundary_seed();
    let data: Vec<f64> = seed.iter().map(&g).collect();
    if let Some(x) = data.iter().find(|x| !x.is_finite()) {
        return arg(format!("boundary value {x} is not finite"));
    }
    let g_sup = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let g_inf = data.iter().copied().fold(f64::INFINITY, f64::min);

    let mut records: Vec<RadiusRecord> = Vec::new();
    let mut window_keys: Vec<O::Key> = Vec::new();
    let mut window_ids: Vec<usize> = Vec::new();
    let mut prev_upper: Option<ScalarField> = None;
    let mut prev_lower: Option<ScalarField> = None;
    let mut last: Option<(Truncation<O::Key>, ScalarField)> = None;
    let mut converged = false;

    for &r in &opts.radii {
        let t = truncate(o, r)?;
        if t.inner_boundary.len() != data.len() {
            return Err(Error::OracleIntegrity("boundary seed changed between radii".into()));
        }
        if window_ids.is_empty() {
            window_ids = t.ball(opts.window_r);
            window_keys = window_ids.iter().map(|&v| t.keys[v].clone()).collect();
        } else if window_ids.iter().zip(&window_keys).any(|(&v, k)| &t.keys[v] != k) {
            return Err(Error::InternalConsistency("window ids moved between radii".into()));
        }

        let prob = capped_problem(&t, &data, g_sup)?;
        let init = warm_start(&prob, prev_upper.as_ref(), g_sup)?;
        let report = dpp_iterate(&prob, &init, &opts.solver)?;
        let window: Vec<f64> = window_ids.iter().map(|&v| report.solution.raw()[v]).collect();

        let lower = if opts.lower_bracket {
            let low_prob = capped_problem(&t, &data, g_inf)?;
            let low_init = warm_start(&low_prob, prev_lower.as_ref(), g_inf)?;
            let low = dpp_iterate(&low_prob, &low_init, &opts.solver)?;
            let vals = window_ids.iter().map(|&v| low.solution.raw()[v]).collect();
            prev_lower = Some(low.solution);
            Some(vals)
        } else {
            None
        };

        let change = match records.last() {
            None => None,
            Some(prev) => {
                for (i, (&now, &before)) in window.iter().zip(&prev.window).enumerate() {
                    if now > before + opts.monotonicity_tol {
                        return Err(Error::InternalConsistency(format!(
                            "window value at {:?} increased from {before} to {now} at radius {r}",
                            window_keys[i]
                        )));
                    }
                }
                Some(
                    window
                        .iter()
                        .zip(&prev.window)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max),
                )
            }
        };
        records.push(RadiusRecord {
            radius: r,
            window,
            lower,
            change,
            iterations: report.iterations,
            residual: report.residual,
            solver_converged: report.converged,
        });
        prev_upper = Some(report.solution.clone());
        last = Some((t, report.solution));
        if change.is_some_and(|c| c < opts.tol) {
            converged = true;
            if opts.early_stop {
                break;
            }
        } else {
            converged = false;
        }
    }
    let (truncation, solution) = last.expect("schedule is non-empty");
    Ok(ExhaustionRun {
        window: window_keys,
        records,
        converged,
        truncation,
        solution,
        g_sup,
        g_inf,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SublinearityTrace {
    /// `(r, sup_{|y| ≤ r} |u(y)| / r)`.
    pub ratios: Vec<(usize, f64)>,
}

impl SublinearityTrace {
    pub fn at(&self, r: usize) -> Option<f64> {
        self.ratios.iter().find(|(s, _)| *s == r).map(|&(_, q)| q)
    }
}

/// `ρ(r) = sup_{|y| ≤ r} |u(y)| / r` from `(depth, value)` samples.
pub fn sublinearity_ratio(
    radii: &[usize],
    samples: impl IntoIterator<Item = (usize, f64)>,
) -> Result<SublinearityTrace> {
    let samples: Vec<(usize, f64)> = samples.into_iter().collect();
    let deepest = samples.iter().map(|s| s.0).max().unwrap_or(0);
    let mut ratios = Vec::with_capacity(radii.len());
    for &r in radii {
        if r == 0 {
            return arg("sublinearity radius must be at least 1");
        }
        if r > deepest {
            return arg(format!("field not sampled up to depth {r} (deepest {deepest})"));
        }
        let sup = samples
            .iter()
            .filter(|s| s.0 <= r)
            .map(|s| s.1.abs())
            .fold(0.0, f64::max);
        ratios.push((r, sup / r as f64));
    }
    Ok(SublinearityTrace { ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling() {
        assert_eq!(doubling_schedule(4, 32), vec![4, 8, 16, 32]);
    }

    #[test]
    fn bounded_field_ratio() {
        let trace = sublinearity_ratio(&[1, 2, 4], (0..=4).map(|d| (d, 3.0))).unwrap();
        assert_eq!(trace.ratios, vec![(1, 3.0), (2, 1.5), (4, 0.75)]);
        assert!(sublinearity_ratio(&[9], [(1, 0.0)]).is_err());
    }

    #[test]
    fn linear_growth_ratio_is_one() {
        let trace = sublinearity_ratio(&[3, 7], (0..=10).map(|d| (d, d as f64))).unwrap();
        assert_eq!(trace.ratios, vec![(3, 1.0), (7, 1.0)]);
    }
}
