//! Dense vectors and the two operations every method here is built from:
//! clipping and the normalized step.

use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

use crate::error::Error;
use crate::math;

/// Gradient norms at or below this are treated as zero by [`normalized_step`].
pub const NORM_EPS: f64 = 1e-30;

/// A dense real vector.
#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn zeros(d: usize) -> Self {
        Vector(alloc::vec![0.0; d])
    }

    pub fn from_fn(d: usize, f: impl FnMut(usize) -> f64) -> Self {
        Vector((0..d).map(f).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &[f64]) {
        for (s, xi) in self.0.iter_mut().zip(x) {
            *s += a * xi;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for s in &mut self.0 {
            *s *= a;
        }
    }

    /// `self - other`
    pub fn sub(&self, other: &[f64]) -> Vector {
        Vector(self.0.iter().zip(other).map(|(a, b)| a - b).collect())
    }

    /// `self + other`
    pub fn add(&self, other: &[f64]) -> Vector {
        Vector(self.0.iter().zip(other).map(|(a, b)| a + b).collect())
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

/// Scales `v` by `min{1, lambda / ||v||}`.
///
/// `lambda = f64::INFINITY` is accepted and returns `v` unchanged. Zero,
/// negative or NaN thresholds are rejected.
pub fn clip(v: &[f64], lambda: f64) -> Result<Vector, Error> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::invalid("clipping threshold must be positive"));
    }
    if lambda == f64::INFINITY {
        return Ok(Vector::from(v));
    }
    let n = norm(v);
    if n <= lambda {
        return Ok(Vector::from(v));
    }
    let s = lambda / n;
    Ok(Vector(v.iter().map(|x| x * s).collect()))
}

/// `x - gamma * g / ||g||`, or `x` itself when `||g|| <= NORM_EPS`.
pub fn normalized_step(x: &[f64], g: &[f64], gamma: f64) -> Vector {
    let n = norm(g);
    if n <= NORM_EPS {
        return Vector::from(x);
    }
    let s = gamma / n;
    Vector(x.iter().zip(g).map(|(xi, gi)| xi - s * gi).collect())
}

/// `x - gamma * g`
pub fn plain_step(x: &[f64], g: &[f64], gamma: f64) -> Vector {
    Vector(x.iter().zip(g).map(|(xi, gi)| xi - gamma * gi).collect())
}
