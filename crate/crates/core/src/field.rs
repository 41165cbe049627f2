//! Vertex-indexed real fields with an explicit domain of definition.

use serde::Serialize;

use crate::error::{arg, Error, Result};

/// A map from a declared set of vertices to finite reals.
///
/// Values outside the domain are never observable through the public API.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarField {
    values: Vec<f64>,
    defined: Vec<bool>,
}

impl ScalarField {
    /// An empty field over `n` vertices.
    pub fn undefined(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
            defined: vec![false; n],
        }
    }

    /// A field defined on every vertex.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return arg(format!("non-finite value at vertex {v}"));
        }
        let n = values.len();
        Ok(Self {
            values,
            defined: vec![true; n],
        })
    }

    /// A field over `n` vertices defined only at the listed pairs.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut field = Self::undefined(n);
        for (v, x) in pairs {
            field.set(v, x)?;
        }
        Ok(field)
    }

    /// Constant `value` on every vertex in `domain`.
    pub fn constant_on(n: usize, domain: &[usize], value: f64) -> Result<Self> {
        Self::from_pairs(n, domain.iter().map(|&v| (v, value)))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> Option<f64> {
        match self.defined.get(v) {
            Some(true) => Some(self.values[v]),
            _ => None,
        }
    }

    pub fn is_defined(&self, v: usize) -> bool {
        self.defined.get(v).copied().unwrap_or(false)
    }

    /// Value at `v`, or an argument error naming the missing vertex.
    pub fn require(&self, v: usize) -> Result<f64> {
        self.get(v)
            .ok_or_else(|| Error::Argument(format!("field undefined at vertex {v}")))
    }

    pub fn set(&mut self, v: usize, x: f64) -> Result<()> {
        if v >= self.values.len() {
            return arg(format!("vertex {v} out of range {}", self.values.len()));
        }
        if !x.is_finite() {
            return arg(format!("non-finite value {x} at vertex {v}"));
        }
        self.values[v] = x;
        self.defined[v] = true;
        Ok(())
    }

    /// Defined vertices in ascending order with their values.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.defined
            .iter()
            .enumerate()
            .filter(|(_, &d)| d)
            .map(|(v, _)| (v, self.values[v]))
    }

    pub fn domain(&self) -> Vec<usize> {
        self.iter().map(|(v, _)| v).collect()
    }

    /// Raw value buffer; entries outside the domain are zero.
    pub fn raw(&self) -> &[f64] {
        &self.values
    }

    pub fn max_on(&self, vertices: &[usize]) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        for &v in vertices {
            best = best.max(self.require(v)?);
        }
        Ok(best)
    }

    pub fn min_on(&self, vertices: &[usize]) -> Result<f64> {
        let mut best = f64::INFINITY;
        for &v in vertices {
            best = best.min(self.require(v)?);
        }
        Ok(best)
    }

    /// Pointwise `self - other` on the common domain.
    pub fn difference(&self, other: &ScalarField) -> ScalarField {
        let n = self.len().min(other.len());
        let mut out = ScalarField::undefined(n);
        for v in 0..n {
            if let (Some(a), Some(b)) = (self.get(v), other.get(v)) {
                out.values[v] = a - b;
                out.defined[v] = true;
            }
        }
        out
    }

    /// Applies `op` to each defined value.
    pub fn map(&self, op: impl Fn(f64) -> f64) -> Result<ScalarField> {
        let mut out = ScalarField::undefined(self.len());
        for (v, x) in self.iter() {
            out.set(v, op(x))?;
        }
        Ok(out)
    }

    /// Overlays the defined values of `other` onto a copy of `self`.
    pub fn merged(&self, other: &ScalarField) -> Result<ScalarField> {
        if self.len() != other.len() {
            return arg("cannot merge fields of different lengths");
        }
        let mut out = self.clone();
        for (v, x) in other.iter() {
            out.set(v, x)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_values() {
        assert!(ScalarField::from_values(vec![0.0, f64::NAN]).is_err());
        let mut f = ScalarField::undefined(2);
        assert!(f.set(0, f64::INFINITY).is_err());
        assert!(f.set(5, 1.0).is_err());
    }

    #[test]
    fn domain_is_explicit() {
        let f = ScalarField::from_pairs(4, [(1, 2.0), (3, -1.0)]).unwrap();
        assert_eq!(f.domain(), vec![1, 3]);
        assert_eq!(f.get(0), None);
        assert!(f.require(2).is_err());
        assert_eq!(f.max_on(&[1, 3]).unwrap(), 2.0);
        assert_eq!(f.min_on(&[1, 3]).unwrap(), -1.0);
    }
}
