//! The zero-chain hard instance and its Bernoulli-revealed estimators.

use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use super::prog;
use crate::error::{check_dim, Error};
use crate::math;
use crate::oracle::{Objective, OracleSample, StochasticOracle};
use crate::rng::RngStream;
use crate::vector::Vector;

// Psi is flushed to zero just above 1/2, where exp(1 - 1/u^2) underflows anyway.
const PSI_FLUSH: f64 = 1e-6;

/// `Psi(t) = 0` for `t <= 1/2`, `exp(1 - 1/(2t - 1)^2)` otherwise.
pub fn psi(t: f64) -> f64 {
    if t <= 0.5 + PSI_FLUSH {
        return 0.0;
    }
    let u = 2.0 * t - 1.0;
    math::exp(1.0 - 1.0 / (u * u))
}

pub fn psi_d1(t: f64) -> f64 {
    if t <= 0.5 + PSI_FLUSH {
        return 0.0;
    }
    let u = 2.0 * t - 1.0;
    psi(t) * 4.0 / (u * u * u)
}

pub fn psi_d2(t: f64) -> f64 {
    if t <= 0.5 + PSI_FLUSH {
        return 0.0;
    }
    let u = 2.0 * t - 1.0;
    let u2 = u * u;
    let u4 = u2 * u2;
    psi(t) * (16.0 / (u4 * u2) - 24.0 / u4)
}

/// `Phi(t) = sqrt(e) * integral_{-inf}^t exp(-s^2 / 2) ds`.
pub fn phi(t: f64) -> f64 {
    math::sqrt(E) * math::sqrt(2.0 * PI) * math::normal_cdf(t)
}

pub fn phi_d1(t: f64) -> f64 {
    math::sqrt(E) * math::exp(-0.5 * t * t)
}

pub fn phi_d2(t: f64) -> f64 {
    -t * phi_d1(t)
}

/// The smooth step `Gamma` and the indicator `Theta_i` built from it.
///
/// `Gamma(t) = int_{1/4}^t Lambda / int_{1/4}^{1/2} Lambda` with the bump
/// `Lambda(t) = exp(-1 / (100 (t - 1/4)(1/2 - t)))` on `(1/4, 1/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothIndicator {
    normalizer: f64,
}

const QUAD_TOL: f64 = 1e-15;

impl SmoothIndicator {
    pub fn new() -> Self {
        SmoothIndicator { normalizer: math::integrate(&Self::bump, 0.25, 0.5, QUAD_TOL) }
    }

    pub fn bump(t: f64) -> f64 {
        if t <= 0.25 || t >= 0.5 {
            return 0.0;
        }
        math::exp(-1.0 / (100.0 * (t - 0.25) * (0.5 - t)))
    }

    /// `int_{1/4}^{1/2} Lambda`
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn step(&self, t: f64) -> f64 {
        if t <= 0.25 {
            0.0
        } else if t >= 0.5 {
            1.0
        } else {
            (math::integrate(&Self::bump, 0.25, t, QUAD_TOL) / self.normalizer).clamp(0.0, 1.0)
        }
    }

    /// `Theta_i(x)` for 1-based `i`.
    pub fn theta(&self, i: usize, x: &[f64]) -> f64 {
        assert!(i >= 1 && i <= x.len(), "index out of range");
        let tail: f64 = x[i - 1..].iter().map(|v| {
            let g = self.step(v.abs());
            g * g
        }).sum();
        self.step(1.0 - math::sqrt(tail))
    }

    /// `Theta_i(x)` for every `i`, in one pass.
    pub fn theta_all(&self, x: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; x.len()];
        let mut tail = 0.0;
        for i in (0..x.len()).rev() {
            let g = self.step(x[i].abs());
            tail += g * g;
            out[i] = self.step(1.0 - math::sqrt(tail));
        }
        out
    }
}

impl Default for SmoothIndicator {
    fn default() -> Self {
        Self::new()
    }
}

/// Which reveal weights a [`HardInstance`] applies to its gradient estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GradientEstimator {
    /// Weights `Theta_i(x)`; smooth in `x`.
    #[default]
    Smoothed,
    /// Weights `1{i > prog_{1/4}(x)}`.
    Plain,
}

/// `x -> alpha * F_T(beta * x)` with the chain function
/// `F_T(x) = -Psi(1) Phi(x_1) + sum_{i=2}^T [Psi(-x_{i-1}) Phi(-x_i) - Psi(x_{i-1}) Phi(x_i)]`.
///
/// As a [`StochasticOracle`] it draws `xi ~ Ber(theta)` per round and reveals
/// the next chain coordinate only when `xi = 1`.
#[derive(Clone, Debug)]
pub struct HardInstance {
    t: usize,
    alpha_scale: f64,
    beta_scale: f64,
    theta: f64,
    estimator: GradientEstimator,
    indicator: SmoothIndicator,
}

impl HardInstance {
    pub fn new(t: usize, theta: f64) -> Result<Self, Error> {
        Self::scaled(t, 1.0, 1.0, theta)
    }

    pub fn scaled(t: usize, alpha_scale: f64, beta_scale: f64, theta: f64) -> Result<Self, Error> {
        if t == 0 {
            return Err(Error::invalid("chain length must be at least 1"));
        }
        if !(alpha_scale > 0.0 && beta_scale > 0.0) || !alpha_scale.is_finite() || !beta_scale.is_finite() {
            return Err(Error::invalid("rescaling factors must be finite and positive"));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::invalid("reveal probability must lie in (0, 1]"));
        }
        Ok(HardInstance {
            t,
            alpha_scale,
            beta_scale,
            theta,
            estimator: GradientEstimator::Smoothed,
            indicator: SmoothIndicator::new(),
        })
    }

    pub fn with_estimator(mut self, estimator: GradientEstimator) -> Self {
        self.estimator = estimator;
        self
    }

    pub fn chain_length(&self) -> usize {
        self.t
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha_scale(&self) -> f64 {
        self.alpha_scale
    }

    pub fn beta_scale(&self) -> f64 {
        self.beta_scale
    }

    pub fn estimator(&self) -> GradientEstimator {
        self.estimator
    }

    pub fn indicator(&self) -> &SmoothIndicator {
        &self.indicator
    }

    /// `Theta_i(x)` on the unscaled chain coordinates.
    pub fn smoothed_indicator(&self, i: usize, x: &[f64]) -> f64 {
        self.indicator.theta(i, x)
    }

    fn scaled_point(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| self.beta_scale * v).collect()
    }

    fn reveal_weights(&self, y: &[f64]) -> Vec<f64> {
        match self.estimator {
            GradientEstimator::Smoothed => self.indicator.theta_all(y),
            GradientEstimator::Plain => hessian_weights(y),
        }
    }

    fn draw_factor(&self, rng: &mut RngStream) -> f64 {
        let xi = if rng.bernoulli(self.theta) { 1.0 } else { 0.0 };
        xi / self.theta - 1.0
    }

    fn estimate_grad(&self, x: &[f64], factor: f64) -> Vector {
        let y = self.scaled_point(x);
        let mut g = chain_grad(&y);
        let w = self.reveal_weights(&y);
        let s = self.alpha_scale * self.beta_scale;
        for (gi, wi) in g.iter_mut().zip(&w) {
            *gi *= s * (1.0 + wi * factor);
        }
        g
    }

    fn estimate_hess_vec(&self, x: &[f64], v: &[f64], factor: f64) -> Vector {
        let y = self.scaled_point(x);
        let mut h = chain_hess_vec(&y, v);
        let w = hessian_weights(&y);
        let s = self.alpha_scale * self.beta_scale * self.beta_scale;
        for (hi, wi) in h.iter_mut().zip(&w) {
            *hi *= s * (1.0 + wi * factor);
        }
        h
    }

    /// One draw of the zero-chain gradient estimator.
    pub fn zero_chain_grad(&self, x: &[f64], rng: &mut RngStream) -> Result<Vector, Error> {
        check_dim(self.t, x.len())?;
        let factor = self.draw_factor(rng);
        Ok(self.estimate_grad(x, factor))
    }

    /// One draw of the zero-chain Hessian-vector estimator.
    pub fn zero_chain_hess_vec(&self, x: &[f64], v: &[f64], rng: &mut RngStream) -> Result<Vector, Error> {
        check_dim(self.t, x.len())?;
        check_dim(self.t, v.len())?;
        let factor = self.draw_factor(rng);
        Ok(self.estimate_hess_vec(x, v, factor))
    }
}

// 1{i > prog_{1/4}(y)}
fn hessian_weights(y: &[f64]) -> Vec<f64> {
    let k = prog(y, 0.25).0;
    (0..y.len()).map(|i| if i + 1 > k { 1.0 } else { 0.0 }).collect()
}

fn chain_value(y: &[f64]) -> f64 {
    let mut f = -psi(1.0) * phi(y[0]);
    for i in 1..y.len() {
        f += psi(-y[i - 1]) * phi(-y[i]) - psi(y[i - 1]) * phi(y[i]);
    }
    f
}

fn chain_grad(y: &[f64]) -> Vector {
    let t = y.len();
    Vector::from_fn(t, |j| {
        let mut g = if j == 0 {
            -psi(1.0) * phi_d1(y[0])
        } else {
            -psi(-y[j - 1]) * phi_d1(-y[j]) - psi(y[j - 1]) * phi_d1(y[j])
        };
        if j + 1 < t {
            g += -psi_d1(-y[j]) * phi(-y[j + 1]) - psi_d1(y[j]) * phi(y[j + 1]);
        }
        g
    })
}

fn chain_hess_vec(y: &[f64], v: &[f64]) -> Vector {
    let t = y.len();
    let diag = |j: usize| {
        let mut h = if j == 0 {
            -psi(1.0) * phi_d2(y[0])
        } else {
            psi(-y[j - 1]) * phi_d2(-y[j]) - psi(y[j - 1]) * phi_d2(y[j])
        };
        if j + 1 < t {
            h += psi_d2(-y[j]) * phi(-y[j + 1]) - psi_d2(y[j]) * phi(y[j + 1]);
        }
        h
    };
    // off(j) couples j and j + 1
    let off = |j: usize| psi_d1(-y[j]) * phi_d1(-y[j + 1]) - psi_d1(y[j]) * phi_d1(y[j + 1]);
    Vector::from_fn(t, |j| {
        let mut r = diag(j) * v[j];
        if j + 1 < t {
            r += off(j) * v[j + 1];
        }
        if j > 0 {
            r += off(j - 1) * v[j - 1];
        }
        r
    })
}

impl Objective for HardInstance {
    fn dim(&self) -> usize {
        self.t
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.alpha_scale * chain_value(&self.scaled_point(x))
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let mut g = chain_grad(&self.scaled_point(x));
        g.scale(self.alpha_scale * self.beta_scale);
        g
    }

    fn hess_vec(&self, x: &[f64], v: &[f64]) -> Vector {
        let mut h = chain_hess_vec(&self.scaled_point(x), v);
        h.scale(self.alpha_scale * self.beta_scale * self.beta_scale);
        h
    }
}

impl StochasticOracle for HardInstance {
    fn dim(&self) -> usize {
        self.t
    }

    fn objective(&self) -> &dyn Objective {
        self
    }

    fn gradient(&mut self, x: &[f64], rng: &mut RngStream) -> Result<Vector, Error> {
        self.zero_chain_grad(x, rng)
    }

    fn gradient_pair(&mut self, x: &[f64], prev: &[f64], rng: &mut RngStream) -> Result<OracleSample, Error> {
        check_dim(self.t, x.len())?;
        check_dim(self.t, prev.len())?;
        let factor = self.draw_factor(rng);
        Ok(OracleSample {
            grad: self.estimate_grad(x, factor),
            grad_prev: Some(self.estimate_grad(prev, factor)),
            hess_vec: None,
        })
    }

    fn gradient_and_hess_vec(
        &mut self,
        x: &[f64],
        at: &[f64],
        dir: &[f64],
        grad_rng: &mut RngStream,
        hess_rng: &mut RngStream,
    ) -> Result<OracleSample, Error> {
        let grad = self.zero_chain_grad(x, grad_rng)?;
        let hv = self.zero_chain_hess_vec(at, dir, hess_rng)?;
        Ok(OracleSample { grad, grad_prev: None, hess_vec: Some(hv) })
    }
}
