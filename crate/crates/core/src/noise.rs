//! Zero-mean noise families calibrated to a target central p-th moment.
//!
//! A [`NoiseSpec`] is built by [`calibrate`] so that `E||Z||^p = sigma1^p`
//! exactly for the family and geometry chosen, in any dimension.

use rand_distr::{Distribution, Pareto};

use crate::error::Error;
use crate::math;
use crate::rng::RngStream;
use crate::vector::{norm, Vector};

/// Tail index of the symmetric Pareto family is `p + PARETO_SHAPE_OFFSET`.
pub const PARETO_SHAPE_OFFSET: f64 = 0.2;

/// Spike probability used when none is given for the two-point family.
pub const DEFAULT_TWO_POINT_R: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum NoiseFamily {
    Gaussian,
    SymmetricPareto,
    /// `Z = m (b - r) e_1` with `b ~ Ber(r)`.
    TwoPointBernoulli { r: f64 },
}

/// How a scalar family is lifted to `R^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Geometry {
    /// Independent coordinates.
    Coordinatewise,
    /// Uniform direction times a scalar radius.
    Spherical,
    /// Noise only on the first coordinate.
    Spike,
}

impl NoiseFamily {
    pub fn default_geometry(&self) -> Geometry {
        match self {
            NoiseFamily::Gaussian => Geometry::Coordinatewise,
            NoiseFamily::SymmetricPareto => Geometry::Spherical,
            NoiseFamily::TwoPointBernoulli { .. } => Geometry::Spike,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum NoiseParams {
    Zero,
    /// Per-coordinate standard deviation in one dimension; rescaled per `d`.
    Gaussian { sigma: f64 },
    Pareto { shape: f64, scale: f64 },
    TwoPoint { r: f64, magnitude: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseSpec {
    pub family: NoiseFamily,
    pub p: f64,
    pub sigma1: f64,
    pub geometry: Geometry,
    pub params: NoiseParams,
}

impl NoiseSpec {
    /// No noise at all.
    pub fn zero() -> Self {
        NoiseSpec {
            family: NoiseFamily::Gaussian,
            p: 2.0,
            sigma1: 0.0,
            geometry: Geometry::Coordinatewise,
            params: NoiseParams::Zero,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.params, NoiseParams::Zero)
    }
}

/// Calibrates `family` so that `E||Z||^p = sigma1^p`, using the family's
/// default geometry.
pub fn calibrate(family: NoiseFamily, p: f64, sigma1: f64) -> Result<NoiseSpec, Error> {
    calibrate_with(family, p, sigma1, family.default_geometry())
}

pub fn calibrate_with(
    family: NoiseFamily,
    p: f64,
    sigma1: f64,
    geometry: Geometry,
) -> Result<NoiseSpec, Error> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::invalid("moment order p must lie in (1, 2]"));
    }
    if !(sigma1 >= 0.0) || !sigma1.is_finite() {
        return Err(Error::invalid("sigma1 must be finite and non-negative"));
    }
    match (family, geometry) {
        (NoiseFamily::TwoPointBernoulli { .. }, Geometry::Spike) => {}
        (NoiseFamily::TwoPointBernoulli { .. }, _) | (_, Geometry::Spike) => {
            return Err(Error::invalid("spike geometry is exclusive to the two-point family"));
        }
        _ => {}
    }
    if let NoiseFamily::TwoPointBernoulli { r } = family {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::invalid("two-point spike probability must lie in (0, 1]"));
        }
        if r == 1.0 && sigma1 > 0.0 {
            return Err(Error::invalid("two-point family with r = 1 has no variance to calibrate"));
        }
    }
    if sigma1 == 0.0 {
        return Ok(NoiseSpec { family, p, sigma1, geometry, params: NoiseParams::Zero });
    }
    let params = match family {
        NoiseFamily::Gaussian => NoiseParams::Gaussian { sigma: sigma1 / math::powf(gaussian_abs_moment(p), 1.0 / p) },
        NoiseFamily::SymmetricPareto => {
            let shape = p + PARETO_SHAPE_OFFSET;
            let scale = math::powf(math::powf(sigma1, p) * (shape - p) / shape, 1.0 / p);
            NoiseParams::Pareto { shape, scale }
        }
        NoiseFamily::TwoPointBernoulli { r } => {
            let magnitude = sigma1 / math::powf(two_point_unit_moment(r, p), 1.0 / p);
            NoiseParams::TwoPoint { r, magnitude }
        }
    };
    Ok(NoiseSpec { family, p, sigma1, geometry, params })
}

/// `E|X|^p` for a standard normal `X`.
pub fn gaussian_abs_moment(p: f64) -> f64 {
    math::powf(2.0, p / 2.0) * math::exp(math::ln_gamma((p + 1.0) / 2.0)) / math::sqrt(core::f64::consts::PI)
}

/// `E||Z||^p` for `Z ~ N(0, I_d)`.
pub fn gaussian_norm_moment(d: usize, p: f64) -> f64 {
    let d = d as f64;
    math::powf(2.0, p / 2.0) * math::exp(math::ln_gamma((d + p) / 2.0) - math::ln_gamma(d / 2.0))
}

/// `E|b - r|^p` for `b ~ Ber(r)`.
fn two_point_unit_moment(r: f64, p: f64) -> f64 {
    (1.0 - r) * math::powf(r, p) + r * math::powf(1.0 - r, p)
}

/// `E||Z||^p` in closed form where one exists for the noise geometry.
///
/// `None` for the coordinatewise Pareto lift, whose moment is only bounded.
pub fn exact_pth_moment(spec: &NoiseSpec, d: usize, p: f64) -> Option<f64> {
    match spec.params {
        NoiseParams::Zero => Some(0.0),
        NoiseParams::Gaussian { sigma } => {
            let s = gaussian_scale(sigma, spec.p, d);
            Some(math::powf(s, p) * gaussian_norm_moment(d, p))
        }
        NoiseParams::Pareto { shape, scale } => match spec.geometry {
            Geometry::Spherical if p < shape => Some(shape * math::powf(scale, p) / (shape - p)),
            _ => None,
        },
        NoiseParams::TwoPoint { r, magnitude } => Some(math::powf(magnitude, p) * two_point_unit_moment(r, p)),
    }
}

// coordinate scale making E||Z||^p = sigma1^p in dimension d
fn gaussian_scale(sigma: f64, p: f64, d: usize) -> f64 {
    if d == 1 {
        return sigma;
    }
    let sigma1 = sigma * math::powf(gaussian_abs_moment(p), 1.0 / p);
    sigma1 / math::powf(gaussian_norm_moment(d, p), 1.0 / p)
}

/// One draw of `Z` in `R^d`.
pub fn sample_noise(spec: &NoiseSpec, d: usize, rng: &mut RngStream) -> Vector {
    match spec.params {
        NoiseParams::Zero => Vector::zeros(d),
        NoiseParams::Gaussian { sigma } => {
            // isotropic in either geometry
            let s = gaussian_scale(sigma, spec.p, d);
            Vector::from_fn(d, |_| s * rng.standard_normal())
        }
        NoiseParams::Pareto { shape, scale } => {
            let radius_law = Pareto::new(scale, shape).expect("calibrated Pareto parameters are valid");
            match spec.geometry {
                Geometry::Spherical => {
                    let r = radius_law.sample(rng);
                    if d == 1 {
                        return Vector::from(alloc::vec![rng.sign() * r]);
                    }
                    let mut dir = Vector::from_fn(d, |_| rng.standard_normal());
                    let n = norm(&dir);
                    dir.scale(r / n);
                    dir
                }
                _ => {
                    // d^{-1/p} keeps E||Z||^p <= sigma1^p by subadditivity of t^{p/2}
                    let s = math::powf(d as f64, -1.0 / spec.p);
                    Vector::from_fn(d, |_| {
                        let r = radius_law.sample(rng);
                        s * rng.sign() * r
                    })
                }
            }
        }
        NoiseParams::TwoPoint { r, magnitude } => {
            let b = if rng.bernoulli(r) { 1.0 } else { 0.0 };
            let mut z = Vector::zeros(d);
            z[0] = magnitude * (b - r);
            z
        }
    }
}

/// Monte-Carlo estimate of `E||Z||^p` from `n >= 1000` draws.
pub fn estimate_pth_moment(spec: &NoiseSpec, d: usize, p: f64, n: usize, rng: &mut RngStream) -> Result<f64, Error> {
    if n < 1000 {
        return Err(Error::invalid("moment estimates need at least 1000 draws"));
    }
    let mut acc = 0.0;
    for _ in 0..n {
        acc += math::powf(norm(&sample_noise(spec, d, rng)), p);
    }
    Ok(acc / n as f64)
}
