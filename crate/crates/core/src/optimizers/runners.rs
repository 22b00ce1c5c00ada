//! The optimization methods as state machines over `(x_t, x_{t-1}, g_t)`.
//!
//! Each runner draws oracle noise from child streams of the `rng` it is
//! given: `"init"` for `g_0`, `"xi"` for the per-round draw, `"xi_hat"` for
//! the independent Hessian draw and `"q"` for the interpolation weights.
//! Runners that share a structure therefore consume identical noise.

use alloc::vec::Vec;

use super::schedule::{InitGradient, Schedule};
use super::trace::{Recorder, RunTrace};
use crate::error::{check_dim, Error};
use crate::oracle::StochasticOracle;
use crate::rng::RngStream;
use crate::vector::{clip, normalized_step, plain_step, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Algorithm {
    /// Normalized SGD with momentum variance reduction.
    NsgdMvr,
    /// SGD with momentum variance reduction, unnormalized steps.
    SgdMvr,
    /// Normalized SGD with Hessian-corrected momentum.
    NsgdHess,
    /// Normalized MVR with both the correction and the fresh gradient clipped.
    DclipNsgdMvr,
    /// Hessian-corrected normalized momentum with both terms clipped.
    ClipNsgdHess,
    /// Plain SGD.
    Sgd,
    /// Normalized SGD with heavy-ball style momentum.
    NsgdMom,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::NsgdMvr,
        Algorithm::SgdMvr,
        Algorithm::NsgdHess,
        Algorithm::DclipNsgdMvr,
        Algorithm::ClipNsgdHess,
        Algorithm::Sgd,
        Algorithm::NsgdMom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::NsgdMvr => "nsgd_mvr",
            Algorithm::SgdMvr => "sgd_mvr",
            Algorithm::NsgdHess => "nsgd_hess",
            Algorithm::DclipNsgdMvr => "dclip_nsgd_mvr",
            Algorithm::ClipNsgdHess => "clip_nsgd_hess",
            Algorithm::Sgd => "sgd",
            Algorithm::NsgdMom => "nsgd_mom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn clips(self) -> bool {
        matches!(self, Algorithm::DclipNsgdMvr | Algorithm::ClipNsgdHess)
    }

    pub fn run(
        self,
        oracle: &mut dyn StochasticOracle,
        x0: &[f64],
        sched: &Schedule,
        rng: &mut RngStream,
    ) -> Result<RunTrace, Error> {
        match self {
            Algorithm::NsgdMvr => run_nsgd_mvr(oracle, x0, sched, rng),
            Algorithm::SgdMvr => run_sgd_mvr(oracle, x0, sched, rng),
            Algorithm::NsgdHess => run_nsgd_hess(oracle, x0, sched, rng),
            Algorithm::DclipNsgdMvr => run_dclip_nsgd_mvr(oracle, x0, sched, rng),
            Algorithm::ClipNsgdHess => run_clip_nsgd_hess(oracle, x0, sched, rng),
            Algorithm::Sgd => run_baseline_sgd(oracle, x0, sched, rng),
            Algorithm::NsgdMom => run_baseline_nsgd_mom(oracle, x0, sched, rng),
        }
    }
}

#[derive(Clone, Copy)]
enum Step {
    Normalized,
    Plain,
}

impl Step {
    fn apply(self, x: &[f64], g: &[f64], gamma: f64) -> Vector {
        match self {
            Step::Normalized => normalized_step(x, g, gamma),
            Step::Plain => plain_step(x, g, gamma),
        }
    }
}

fn thresholds(sched: &Schedule) -> Result<(f64, f64), Error> {
    match (sched.lambda1, sched.lambda2) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::invalid("clipped methods need both thresholds lambda1 and lambda2")),
    }
}

fn initial_estimate(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    init: InitGradient,
    rng: &RngStream,
) -> Result<Vector, Error> {
    match init {
        InitGradient::Zero => Ok(Vector::zeros(x0.len())),
        InitGradient::Minibatch(b) => {
            let mut r = rng.child("init");
            let mut acc = oracle.gradient(x0, &mut r)?;
            for _ in 1..b {
                let g = oracle.gradient(x0, &mut r)?;
                acc.axpy(1.0, &g);
            }
            if b > 1 {
                acc.scale(1.0 / b as f64);
            }
            Ok(acc)
        }
    }
}

// (1 - alpha)(g + corr) + alpha * fresh
fn momentum_update(g: &mut Vector, corr: &[f64], fresh: &[f64], alpha: f64) {
    let keep = 1.0 - alpha;
    for ((gi, ci), fi) in g.iter_mut().zip(corr).zip(fresh) {
        *gi = keep * (*gi + ci) + alpha * fi;
    }
}

fn start(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    rng: &RngStream,
) -> Result<(Recorder, Vector), Error> {
    sched.validate()?;
    check_dim(oracle.dim(), x0.len())?;
    let g0 = initial_estimate(oracle, x0, sched.init, rng)?;
    Ok((Recorder::new(sched.iterations), g0))
}

fn mvr_loop(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    rng: &mut RngStream,
    step: Step,
    (lambda1, lambda2): (f64, f64),
) -> Result<RunTrace, Error> {
    let (mut rec, mut g) = start(oracle, x0, sched, rng)?;
    let mut xi = rng.child("xi");
    let mut samples = sched.b_init();
    let exact = rec.iterate(oracle.objective(), x0, 0);
    rec.estimate(&g, &exact);
    let mut x_prev = Vector::from(x0);
    let mut x = step.apply(x0, &g, sched.gamma);
    for _ in 1..sched.iterations {
        let exact = rec.iterate(oracle.objective(), &x, samples);
        let s = oracle.gradient_pair(&x, &x_prev, &mut xi)?;
        let prev = s.grad_prev.ok_or(Error::Unsupported("two-point queries"))?;
        let diff = s.grad.sub(&prev);
        let corr = clip(&diff, lambda1)?;
        let fresh = clip(&s.grad, lambda2)?;
        momentum_update(&mut g, &corr, &fresh, sched.alpha);
        samples += 2;
        rec.estimate(&g, &exact);
        let next = step.apply(&x, &g, sched.gamma);
        x_prev = core::mem::replace(&mut x, next);
    }
    rec.iterate(oracle.objective(), &x, samples);
    Ok(rec.finish(x))
}

fn hess_loop(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    rng: &mut RngStream,
    (lambda1, lambda2): (f64, f64),
) -> Result<RunTrace, Error> {
    let (mut rec, mut g) = start(oracle, x0, sched, rng)?;
    let mut xi = rng.child("xi");
    let mut xi_hat = rng.child("xi_hat");
    let mut qs = rng.child("q");
    let mut samples = sched.b_init();
    let exact = rec.iterate(oracle.objective(), x0, 0);
    rec.estimate(&g, &exact);
    let mut x_prev = Vector::from(x0);
    let mut x = normalized_step(x0, &g, sched.gamma);
    for _ in 1..sched.iterations {
        let exact = rec.iterate(oracle.objective(), &x, samples);
        let q = qs.uniform();
        let x_hat: Vec<f64> = x.iter().zip(x_prev.iter()).map(|(a, b)| q * a + (1.0 - q) * b).collect();
        let dir = x.sub(&x_prev);
        let s = oracle.gradient_and_hess_vec(&x, &x_hat, &dir, &mut xi, &mut xi_hat)?;
        let hv = s.hess_vec.ok_or(Error::Unsupported("Hessian-vector products"))?;
        let corr = clip(&hv, lambda1)?;
        let fresh = clip(&s.grad, lambda2)?;
        momentum_update(&mut g, &corr, &fresh, sched.alpha);
        samples += 2;
        rec.estimate(&g, &exact);
        let next = normalized_step(&x, &g, sched.gamma);
        x_prev = core::mem::replace(&mut x, next);
    }
    rec.iterate(oracle.objective(), &x, samples);
    Ok(rec.finish(x))
}

// g_t = (1 - alpha) g_{t-1} + alpha grad f(x_t, xi_t), or just the fresh
// gradient for plain SGD
fn single_point_loop(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    rng: &mut RngStream,
    step: Step,
    momentum: bool,
) -> Result<RunTrace, Error> {
    let (mut rec, mut g) = start(oracle, x0, sched, rng)?;
    let mut xi = rng.child("xi");
    let mut samples = sched.b_init();
    let exact = rec.iterate(oracle.objective(), x0, 0);
    rec.estimate(&g, &exact);
    let mut x = step.apply(x0, &g, sched.gamma);
    let zero = Vector::zeros(x0.len());
    for _ in 1..sched.iterations {
        let exact = rec.iterate(oracle.objective(), &x, samples);
        let fresh = oracle.gradient(&x, &mut xi)?;
        if momentum {
            momentum_update(&mut g, &zero, &fresh, sched.alpha);
        } else {
            g = fresh;
        }
        samples += 1;
        rec.estimate(&g, &exact);
        x = step.apply(&x, &g, sched.gamma);
    }
    rec.iterate(oracle.objective(), &x, samples);
    Ok(rec.finish(x))
}

const NO_CLIP: (f64, f64) = (f64::INFINITY, f64::INFINITY);

/// Normalized SGD with MVR.
pub fn run_nsgd_mvr(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    rng: &mut RngStream,
) -> Result<RunTrace, Error> {
    mvr_loop(oracle, x0, sched, rng, Step::Normalized, NO_CLIP)
}

/// SGD with MVR: the same recursion with steps `x - gamma g`.
pub fn run_sgd_mvr(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    rng: &mut RngStream,
) -> Result<RunTrace, Error> {
    mvr_loop(oracle, x0, sched, rng, Step::Plain, NO_CLIP)
}

/// Normalized SGD with Hessian-corrected momentum.
pub fn run_nsgd_hess(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    rng: &mut RngStream,
) -> Result<RunTrace, Error> {
    hess_loop(oracle, x0, sched, rng, NO_CLIP)
}

/// Doubly clipped normalized MVR.
pub fn run_dclip_nsgd_mvr(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    rng: &mut RngStream,
) -> Result<RunTrace, Error> {
    let t = thresholds(sched)?;
    mvr_loop(oracle, x0, sched, rng, Step::Normalized, t)
}

/// Clipped Hessian-corrected normalized momentum.
pub fn run_clip_nsgd_hess(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    rng: &mut RngStream,
) -> Result<RunTrace, Error> {
    let t = thresholds(sched)?;
    hess_loop(oracle, x0, sched, rng, t)
}

/// `x_{t+1} = x_t - gamma grad f(x_t, xi_t)`.
pub fn run_baseline_sgd(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    rng: &mut RngStream,
) -> Result<RunTrace, Error> {
    single_point_loop(oracle, x0, sched, rng, Step::Plain, false)
}

/// Normalized SGD with momentum `g_t = (1 - alpha) g_{t-1} + alpha grad f(x_t, xi_t)`.
pub fn run_baseline_nsgd_mom(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    rng: &mut RngStream,
) -> Result<RunTrace, Error> {
    single_point_loop(oracle, x0, sched, rng, Step::Normalized, true)
}
