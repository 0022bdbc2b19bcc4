//! Points of the d-torus (R/Z)^d with mod-1 translation arithmetic.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

#[inline]
fn reduce(x: f64) -> f64 {
    let r = x - x.floor();
    // x.floor() can round r to exactly 1.0 for tiny negative x
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl TorusPoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimError("torus point needs at least one coordinate".into()));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite torus coordinate".into()));
        }
        Ok(TorusPoint {
            coords: coords.iter().map(|&x| reduce(x)).collect(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        TorusPoint {
            coords: vec![0.0; dim],
        }
    }

    /// Circle point (d = 1).
    pub fn circle(x: f64) -> Self {
        TorusPoint {
            coords: vec![reduce(x)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn translate(&self, shift: &TorusPoint) -> Result<TorusPoint> {
        if self.dim() != shift.dim() {
            return Err(Error::DimError(format!(
                "translate: dims {} vs {}",
                self.dim(),
                shift.dim()
            )));
        }
        Ok(TorusPoint {
            coords: self
                .coords
                .iter()
                .zip(&shift.coords)
                .map(|(&a, &b)| reduce(a + b))
                .collect(),
        })
    }

    pub fn neg(&self) -> TorusPoint {
        TorusPoint {
            coords: self.coords.iter().map(|&x| reduce(-x)).collect(),
        }
    }

    /// sup over coordinates of the circle distance min(|x-y|, 1-|x-y|).
    pub fn dist(&self, other: &TorusPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| {
                let d = (a - b).abs();
                d.min(1.0 - d)
            })
            .fold(0.0f64, f64::max)
    }
}

/// Regular grid {i/n} on the circle.
pub fn circle_grid(n: usize) -> Vec<TorusPoint> {
    (0..n).map(|i| TorusPoint::circle(i as f64 / n as f64)).collect()
}
