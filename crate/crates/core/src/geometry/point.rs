use std::fmt;
use std::ops::{Deref, Index};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// A vector in ℝⁿ with finite coordinates.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(LabError::InvalidParameter("point has dimension 0".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(LabError::NonFinite);
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        Point(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn add(&self, other: &[f64]) -> Point {
        Point(self.0.iter().zip(other).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &[f64]) -> Point {
        Point(self.0.iter().zip(other).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|a| a * s).collect())
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.0)
    }
}

impl From<Vec<f64>> for Point {
    /// Unchecked conversion for internally produced coordinates.
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
