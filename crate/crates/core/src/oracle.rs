//! Exact objectives and stochastic first/second-order oracles.

use alloc::vec::Vec;

use crate::error::{check_dim, Error};
use crate::noise::{sample_noise, NoiseSpec};
use crate::rng::RngStream;
use crate::vector::Vector;

/// A deterministic differentiable function.
pub trait Objective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vector;
    fn hess_vec(&self, x: &[f64], v: &[f64]) -> Vector;
}

/// What a single oracle round returns.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSample {
    pub grad: Vector,
    /// Gradient at the previous iterate under the same draw.
    pub grad_prev: Option<Vector>,
    /// Hessian-vector product under an independent draw.
    pub hess_vec: Option<Vector>,
}

impl OracleSample {
    pub fn gradient_only(grad: Vector) -> Self {
        OracleSample { grad, grad_prev: None, hess_vec: None }
    }
}

/// A stochastic oracle for some [`Objective`].
///
/// Every method consumes randomness only from the streams passed in, so two
/// calls with identically positioned streams return identical results.
pub trait StochasticOracle {
    fn dim(&self) -> usize;

    /// The exact function being estimated, used for tracing.
    fn objective(&self) -> &dyn Objective;

    /// One draw `xi`, gradient estimate at `x`.
    fn gradient(&mut self, x: &[f64], rng: &mut RngStream) -> Result<Vector, Error>;

    /// One draw `xi`, gradient estimates at `x` and `prev`.
    fn gradient_pair(
        &mut self,
        x: &[f64],
        prev: &[f64],
        rng: &mut RngStream,
    ) -> Result<OracleSample, Error>;

    /// Gradient at `x` drawn from `grad_rng`, and a Hessian-vector product at
    /// `at` along `dir` drawn independently from `hess_rng`.
    fn gradient_and_hess_vec(
        &mut self,
        x: &[f64],
        at: &[f64],
        dir: &[f64],
        grad_rng: &mut RngStream,
        hess_rng: &mut RngStream,
    ) -> Result<OracleSample, Error>;
}

/// Adds state-independent noise to the gradient of an objective.
///
/// The Hessian is returned exactly.
#[derive(Clone, Debug)]
pub struct AdditiveNoiseOracle<F> {
    objective: F,
    noise: NoiseSpec,
}

impl<F: Objective> AdditiveNoiseOracle<F> {
    pub fn new(objective: F, noise: NoiseSpec) -> Self {
        AdditiveNoiseOracle { objective, noise }
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn inner(&self) -> &F {
        &self.objective
    }
}

/// Wraps `objective` with additive noise drawn from `noise`.
pub fn noisy_oracle<F: Objective>(objective: F, noise: NoiseSpec) -> AdditiveNoiseOracle<F> {
    AdditiveNoiseOracle::new(objective, noise)
}

impl<F: Objective> StochasticOracle for AdditiveNoiseOracle<F> {
    fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn objective(&self) -> &dyn Objective {
        &self.objective
    }

    fn gradient(&mut self, x: &[f64], rng: &mut RngStream) -> Result<Vector, Error> {
        check_dim(self.dim(), x.len())?;
        let z = sample_noise(&self.noise, self.dim(), rng);
        Ok(self.objective.gradient(x).add(&z))
    }

    fn gradient_pair(
        &mut self,
        x: &[f64],
        prev: &[f64],
        rng: &mut RngStream,
    ) -> Result<OracleSample, Error> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), prev.len())?;
        let z = sample_noise(&self.noise, self.dim(), rng);
        Ok(OracleSample {
            grad: self.objective.gradient(x).add(&z),
            grad_prev: Some(self.objective.gradient(prev).add(&z)),
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
        check_dim(self.dim(), at.len())?;
        check_dim(self.dim(), dir.len())?;
        let grad = self.gradient(x, grad_rng)?;
        Ok(OracleSample {
            grad,
            grad_prev: None,
            hess_vec: Some(self.objective.hess_vec(at, dir)),
        })
    }
}

/// Records which coordinates an algorithm has been shown and rejects queries
/// that touch anything else.
///
/// Wrapping an oracle in a tracker turns the zero-respecting requirement into
/// a runtime check: every query point must be supported on the union of the
/// supports of earlier responses.
pub struct SupportTracker<'a> {
    inner: &'a mut dyn StochasticOracle,
    revealed: Vec<bool>,
    frontier: usize,
    rounds: usize,
    reveals: usize,
}

impl<'a> SupportTracker<'a> {
    pub fn new(inner: &'a mut dyn StochasticOracle) -> Self {
        let d = inner.dim();
        SupportTracker { inner, revealed: alloc::vec![false; d], frontier: 0, rounds: 0, reveals: 0 }
    }

    /// Query rounds seen.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Sum over rounds of the increase in the highest revealed coordinate.
    pub fn reveals(&self) -> usize {
        self.reveals
    }

    /// Highest revealed coordinate (1-based, 0 if none).
    pub fn frontier(&self) -> usize {
        self.frontier
    }

    fn check(&self, x: &[f64]) -> Result<(), Error> {
        for (i, (xi, seen)) in x.iter().zip(&self.revealed).enumerate() {
            if *xi != 0.0 && !seen {
                return Err(Error::SupportViolation { round: self.rounds, coordinate: i + 1 });
            }
        }
        Ok(())
    }

    fn absorb(&mut self, v: &[f64]) {
        for (i, vi) in v.iter().enumerate() {
            if *vi != 0.0 {
                self.revealed[i] = true;
            }
        }
    }

    fn finish_round(&mut self) {
        let frontier = self.revealed.iter().rposition(|s| *s).map_or(0, |i| i + 1);
        self.reveals += frontier.saturating_sub(self.frontier);
        self.frontier = frontier.max(self.frontier);
        self.rounds += 1;
    }
}

impl StochasticOracle for SupportTracker<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn objective(&self) -> &dyn Objective {
        self.inner.objective()
    }

    fn gradient(&mut self, x: &[f64], rng: &mut RngStream) -> Result<Vector, Error> {
        self.check(x)?;
        let g = self.inner.gradient(x, rng)?;
        self.absorb(&g);
        self.finish_round();
        Ok(g)
    }

    fn gradient_pair(
        &mut self,
        x: &[f64],
        prev: &[f64],
        rng: &mut RngStream,
    ) -> Result<OracleSample, Error> {
        self.check(x)?;
        self.check(prev)?;
        let s = self.inner.gradient_pair(x, prev, rng)?;
        self.absorb(&s.grad);
        if let Some(gp) = &s.grad_prev {
            self.absorb(gp);
        }
        self.finish_round();
        Ok(s)
    }

    fn gradient_and_hess_vec(
        &mut self,
        x: &[f64],
        at: &[f64],
        dir: &[f64],
        grad_rng: &mut RngStream,
        hess_rng: &mut RngStream,
    ) -> Result<OracleSample, Error> {
        self.check(x)?;
        self.check(at)?;
        self.check(dir)?;
        let s = self.inner.gradient_and_hess_vec(x, at, dir, grad_rng, hess_rng)?;
        self.absorb(&s.grad);
        if let Some(hv) = &s.hess_vec {
            self.absorb(hv);
        }
        self.finish_round();
        Ok(s)
    }
}
