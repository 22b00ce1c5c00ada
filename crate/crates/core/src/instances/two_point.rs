//! The two-point Bernoulli quadratic.

use crate::error::{check_dim, Error};
use crate::math;
use crate::oracle::{Objective, OracleSample, StochasticOracle};
use crate::rng::RngStream;
use crate::vector::Vector;

/// The constant `c'` in the calibration of [`TwoPointInstance::calibrated`].
pub const CALIBRATION_C_PRIME: f64 = 0.125;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `f(x, xi) = (L/2)(||beta x||^2 - 2 beta x_1 xi + r^2)` with `xi ~ s Ber(r)`,
/// so `F(x) = (L/2) ||beta x - theta_s||^2`, `theta_s = (r s, 0, ..., 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwoPointInstance {
    pub d: usize,
    pub l: f64,
    pub r: f64,
    pub beta_scale: f64,
    pub sign: Sign,
}

impl TwoPointInstance {
    pub fn new(d: usize, l: f64, r: f64, beta_scale: f64, sign: Sign) -> Result<Self, Error> {
        if d == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if !(l > 0.0 && l.is_finite()) || !(beta_scale > 0.0 && beta_scale.is_finite()) {
            return Err(Error::invalid("curvature and rescaling must be finite and positive"));
        }
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::invalid("Bernoulli parameter must lie in (0, 1]"));
        }
        Ok(TwoPointInstance { d, l, r, beta_scale, sign })
    }

    /// The instance that is `Delta`-suboptimal at the origin, `L_bar`
    /// mean-squared smooth and has central `p`-th moment at most `sigma1^p`,
    /// for target accuracy `eps <= c' sqrt(L_bar Delta)`.
    pub fn calibrated(
        d: usize,
        eps: f64,
        sigma1: f64,
        p: f64,
        l_bar: f64,
        delta: f64,
        sign: Sign,
    ) -> Result<Self, Error> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(Error::invalid("moment order p must lie in (1, 2]"));
        }
        if !(eps > 0.0) || !(delta > 0.0) || !(l_bar > 0.0) || !(sigma1 >= 0.0) {
            return Err(Error::invalid("eps, Delta, L_bar must be positive and sigma1 non-negative"));
        }
        let c = CALIBRATION_C_PRIME;
        if eps > c * math::sqrt(l_bar * delta) {
            return Err(Error::invalid("eps exceeds c' sqrt(L_bar Delta)"));
        }
        let big_c = math::powf(2.0, 1.0 / p) * core::f64::consts::SQRT_2 / c;
        let r = if sigma1 == 0.0 {
            1.0
        } else {
            math::powf(big_c * eps / sigma1, p / (p - 1.0)).min(1.0)
        };
        let l = 2.0 * delta / (r * r);
        let beta = eps * core::f64::consts::SQRT_2 / (c * l * r);
        Self::new(d, l, r, beta, sign)
    }

    fn theta_s(&self) -> f64 {
        self.r * self.sign.value()
    }

    /// One draw of `xi`, either `0` or `s`.
    fn draw_xi(&self, rng: &mut RngStream) -> f64 {
        if rng.bernoulli(self.r) {
            self.sign.value()
        } else {
            0.0
        }
    }

    fn stoch_grad_at(&self, x: &[f64], xi: f64) -> Vector {
        let lb = self.l * self.beta_scale;
        Vector::from_fn(self.d, |i| {
            let shift = if i == 0 { xi } else { 0.0 };
            lb * (self.beta_scale * x[i] - shift)
        })
    }

    /// One draw of `grad f(x, xi)`.
    pub fn stoch_grad(&self, x: &[f64], rng: &mut RngStream) -> Result<Vector, Error> {
        check_dim(self.d, x.len())?;
        let xi = self.draw_xi(rng);
        Ok(self.stoch_grad_at(x, xi))
    }

    /// `E||grad f(x, xi) - grad F(x)||^p` by enumerating both outcomes.
    pub fn exact_central_moment(&self, p: f64) -> f64 {
        let lb = self.l * self.beta_scale;
        // |xi - r s| is 1 - r with probability r and r otherwise
        math::powf(lb, p) * (self.r * math::powf(1.0 - self.r, p) + (1.0 - self.r) * math::powf(self.r, p))
    }

    /// The bound `2 (L beta)^p r (1 - r)`.
    pub fn central_moment_bound(&self, p: f64) -> f64 {
        2.0 * math::powf(self.l * self.beta_scale, p) * self.r * (1.0 - self.r)
    }
}

impl Objective for TwoPointInstance {
    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        let ts = self.theta_s();
        let sq: f64 = x
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let c = self.beta_scale * v - if i == 0 { ts } else { 0.0 };
                c * c
            })
            .sum();
        0.5 * self.l * sq
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        self.stoch_grad_at(x, self.theta_s())
    }

    fn hess_vec(&self, _x: &[f64], v: &[f64]) -> Vector {
        let c = self.l * self.beta_scale * self.beta_scale;
        Vector::from_fn(v.len(), |i| c * v[i])
    }
}

impl StochasticOracle for TwoPointInstance {
    fn dim(&self) -> usize {
        self.d
    }

    fn objective(&self) -> &dyn Objective {
        self
    }

    fn gradient(&mut self, x: &[f64], rng: &mut RngStream) -> Result<Vector, Error> {
        self.stoch_grad(x, rng)
    }

    fn gradient_pair(&mut self, x: &[f64], prev: &[f64], rng: &mut RngStream) -> Result<OracleSample, Error> {
        check_dim(self.d, x.len())?;
        check_dim(self.d, prev.len())?;
        let xi = self.draw_xi(rng);
        Ok(OracleSample {
            grad: self.stoch_grad_at(x, xi),
            grad_prev: Some(self.stoch_grad_at(prev, xi)),
            hess_vec: None,
        })
    }

    fn gradient_and_hess_vec(
        &mut self,
        x: &[f64],
        at: &[f64],
        dir: &[f64],
        grad_rng: &mut RngStream,
        _hess_rng: &mut RngStream,
    ) -> Result<OracleSample, Error> {
        check_dim(self.d, at.len())?;
        check_dim(self.d, dir.len())?;
        let grad = self.stoch_grad(x, grad_rng)?;
        Ok(OracleSample { grad, grad_prev: None, hess_vec: Some(Objective::hess_vec(self, at, dir)) })
    }
}
