//! Infinite graphs used by the exhaustion and tree solvers.

use crate::error::{arg, Result};
use crate::oracle::GraphOracle;

/// `x̄ = 0 ∼ 1 ∼ 2 ∼ …` with `δU = {0}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfLine;

impl GraphOracle for HalfLine {
    type Key = u64;

    fn boundary_seed(&self) -> Vec<u64> {
        vec![0]
    }

    fn neighbors(&self, v: &u64) -> Vec<u64> {
        if *v == 0 {
            vec![1]
        } else {
            vec![v - 1, v + 1]
        }
    }

    fn is_boundary(&self, v: &u64) -> bool {
        *v == 0
    }
}

/// Upper half-plane `ℤ/p × ℕ` with boundary row `y = 0`.
///
/// Periodic in `x` so the boundary is finite; data of period dividing `p`
/// gives the same bounded solution as on `ℤ × ℕ`.
#[derive(Debug, Clone, Copy)]
pub struct HalfPlane {
    pub period: usize,
}

impl HalfPlane {
    pub fn new(period: usize) -> Result<Self> {
        if period < 3 {
            return arg("half-plane period must be at least 3");
        }
        Ok(Self { period })
    }

    /// `0, 1, 0, 1, …` along the boundary row.
    pub fn alternating(key: &(usize, usize)) -> f64 {
        (key.0 % 2) as f64
    }
}

impl GraphOracle for HalfPlane {
    type Key = (usize, usize);

    fn boundary_seed(&self) -> Vec<(usize, usize)> {
        (0..self.period).map(|x| (x, 0)).collect()
    }

    fn neighbors(&self, v: &(usize, usize)) -> Vec<(usize, usize)> {
        let (x, y) = *v;
        let p = self.period;
        let mut out = vec![((x + p - 1) % p, y), ((x + 1) % p, y), (x, y + 1)];
        if y > 0 {
            out.push((x, y - 1));
        }
        out
    }

    fn is_boundary(&self, v: &(usize, usize)) -> bool {
        v.1 == 0
    }
}

/// Rooted binary tree; keys are `(depth, index)` and the root is the only boundary vertex.
#[derive(Debug, Clone, Copy, Default)]
pub struct BinaryTree;

impl GraphOracle for BinaryTree {
    type Key = (u32, u64);

    fn boundary_seed(&self) -> Vec<(u32, u64)> {
        vec![(0, 0)]
    }

    fn neighbors(&self, v: &(u32, u64)) -> Vec<(u32, u64)> {
        let (d, i) = *v;
        let mut out = Vec::with_capacity(3);
        if d > 0 {
            out.push((d - 1, i / 2));
        }
        out.push((d + 1, 2 * i));
        out.push((d + 1, 2 * i + 1));
        out
    }

    fn is_boundary(&self, v: &(u32, u64)) -> bool {
        v.0 == 0
    }
}
