use std::ops::Index;

use crate::error::{Error, Result};

/// Norms supported by [`crate::domain::Domain::diameter`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn parse(s: &str) -> Option<Norm> {
        match s {
            "l1" => Some(Norm::L1),
            "l2" => Some(Norm::L2),
            "linf" => Some(Norm::Linf),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        }
    }
}

/// Dense point in the ambient space. Iterates, gradients, LMO atoms and
/// directions all use this type.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Construct from coordinates, rejecting empty and non-finite input.
    pub fn new(coords: Vec<f64>) -> Result<Vector> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument(
                "vector must have at least one coordinate".into(),
            ));
        }
        if let Some(i) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite coordinate at index {i}"
            )));
        }
        Ok(Vector(coords))
    }

    /// Construct without the finiteness check. Intermediate arithmetic may
    /// use this; the solver re-checks finiteness per iteration.
    pub fn from_raw(coords: Vec<f64>) -> Vector {
        debug_assert!(!coords.is_empty());
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Vector {
        Vector(vec![0.0; dim])
    }

    /// Standard basis vector `e_i`, scaled.
    pub fn scaled_basis(dim: usize, i: usize, scale: f64) -> Vector {
        let mut v = vec![0.0; dim];
        v[i] = scale;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self + gamma * dir`
    pub fn add_scaled(&self, gamma: f64, dir: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), dir.dim());
        Vector(
            self.0
                .iter()
                .zip(&dir.0)
                .map(|(a, d)| a + gamma * d)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn norm(&self, norm: Norm) -> f64 {
        match norm {
            Norm::L1 => self.0.iter().map(|v| v.abs()).sum(),
            Norm::L2 => self.0.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::Linf => self.0.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a Vector {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
