//! Step-size, momentum and clipping schedules derived from problem constants.
//!
//! Every rule evaluates closed-form expressions. Terms of a `min` that are
//! undefined because a constant is zero (for example a branch divided by
//! `sigma1 = 0`) count as `+inf`.

use alloc::vec::Vec;

use crate::error::Error;
use crate::math;

/// How the first gradient estimate `g_0` is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InitGradient {
    /// `g_0 = 0`; no samples are spent.
    Zero,
    /// Mean of this many gradient samples at `x_0`.
    Minibatch(u64),
}

/// Which formula a schedule came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ScheduleRule {
    /// Normalized MVR with a minibatch start, tuned with `L_bar` and `eps`.
    MvrMinibatch,
    /// As [`ScheduleRule::MvrMinibatch`] but tuned with `L1` and the similarity constant.
    MvrMinibatchSimilarity,
    /// Normalized MVR with `alpha = T^{-1/2}` and a single-sample start.
    MvrSingleSample,
    /// As [`ScheduleRule::MvrSingleSample`] with `L1` and the similarity constant.
    MvrSingleSampleSimilarity,
    /// Hessian-corrected normalized momentum with a minibatch start.
    HessMinibatch,
    /// Doubly clipped normalized MVR, high-probability constants.
    ClippedMvr,
    /// As [`ScheduleRule::ClippedMvr`] with `L1` and the similarity constant.
    ClippedMvrSimilarity,
    /// Clipped Hessian-corrected normalized momentum.
    ClippedHess,
    /// Unnormalized SGD with MVR.
    SgdMvr,
}

impl ScheduleRule {
    pub const ALL: [ScheduleRule; 9] = [
        ScheduleRule::MvrMinibatch,
        ScheduleRule::MvrMinibatchSimilarity,
        ScheduleRule::MvrSingleSample,
        ScheduleRule::MvrSingleSampleSimilarity,
        ScheduleRule::HessMinibatch,
        ScheduleRule::ClippedMvr,
        ScheduleRule::ClippedMvrSimilarity,
        ScheduleRule::ClippedHess,
        ScheduleRule::SgdMvr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScheduleRule::MvrMinibatch => "mvr_minibatch",
            ScheduleRule::MvrMinibatchSimilarity => "mvr_minibatch_similarity",
            ScheduleRule::MvrSingleSample => "mvr_single_sample",
            ScheduleRule::MvrSingleSampleSimilarity => "mvr_single_sample_similarity",
            ScheduleRule::HessMinibatch => "hess_minibatch",
            ScheduleRule::ClippedMvr => "clipped_mvr",
            ScheduleRule::ClippedMvrSimilarity => "clipped_mvr_similarity",
            ScheduleRule::ClippedHess => "clipped_hess",
            ScheduleRule::SgdMvr => "sgd_mvr",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == name)
    }

    /// Evaluates the rule. `beta` is the failure probability and is only
    /// read by the clipped rules.
    pub fn build(self, c: &ProblemConstants, t: usize, beta: Option<f64>) -> Result<Schedule, Error> {
        let need_beta = || beta.ok_or_else(|| Error::invalid("clipped schedules need a failure probability beta"));
        match self {
            ScheduleRule::MvrMinibatch => mvr_minibatch(c, t),
            ScheduleRule::MvrMinibatchSimilarity => mvr_minibatch_similarity(c, t),
            ScheduleRule::MvrSingleSample => mvr_single_sample(c, t),
            ScheduleRule::MvrSingleSampleSimilarity => mvr_single_sample_similarity(c, t),
            ScheduleRule::HessMinibatch => hess_minibatch(c, t),
            ScheduleRule::ClippedMvr => clipped_mvr(c, t, need_beta()?),
            ScheduleRule::ClippedMvrSimilarity => clipped_mvr_similarity(c, t, need_beta()?),
            ScheduleRule::ClippedHess => clipped_hess(c, t, need_beta()?),
            ScheduleRule::SgdMvr => sgd_mvr(c, t),
        }
    }
}

/// Provenance attached to a computed schedule.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScheduleOrigin {
    pub rule: ScheduleRule,
    /// Names of the constants the rule read.
    pub consumed: &'static [&'static str],
    /// `log(8T / beta)` for the clipped rules.
    pub log_factor: Option<f64>,
}

/// Parameters of one run.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Schedule {
    pub gamma: f64,
    pub alpha: f64,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub init: InitGradient,
    pub iterations: usize,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub origin: Option<ScheduleOrigin>,
}

impl Schedule {
    pub fn explicit(gamma: f64, alpha: f64, init: InitGradient, iterations: usize) -> Result<Self, Error> {
        let s = Schedule { gamma, alpha, lambda1: None, lambda2: None, init, iterations, origin: None };
        s.validate()?;
        Ok(s)
    }

    pub fn with_thresholds(mut self, lambda1: f64, lambda2: f64) -> Result<Self, Error> {
        self.lambda1 = Some(lambda1);
        self.lambda2 = Some(lambda2);
        self.validate()?;
        Ok(self)
    }

    /// Samples spent on `g_0`.
    pub fn b_init(&self) -> u64 {
        match self.init {
            InitGradient::Zero => 0,
            InitGradient::Minibatch(b) => b,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::invalid("step size must be finite and positive"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid("momentum parameter must lie in (0, 1]"));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("iteration budget must be at least 1"));
        }
        if let InitGradient::Minibatch(0) = self.init {
            return Err(Error::invalid("initial batch size must be at least 1"));
        }
        for l in [self.lambda1, self.lambda2].into_iter().flatten() {
            if !(l > 0.0) {
                return Err(Error::invalid("clipping thresholds must be positive"));
            }
        }
        Ok(())
    }
}

/// Problem constants consumed by the schedule rules.
///
/// Constants a rule does not read may be left unset.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ProblemConstants {
    /// Initial suboptimality.
    #[cfg_attr(feature = "serde", serde(rename = "Delta", alias = "delta_0"))]
    pub delta: f64,
    #[cfg_attr(feature = "serde", serde(default, rename = "Lbar"))]
    pub l_bar: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, rename = "L1"))]
    pub l1: Option<f64>,
    /// Similarity constant.
    #[cfg_attr(feature = "serde", serde(default))]
    pub delta_sim: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, rename = "L2"))]
    pub l2: Option<f64>,
    pub sigma1: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub sigma2: Option<f64>,
    pub p: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_q"))]
    pub q: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub eps: Option<f64>,
    /// Multiplier on the step size of the clipped rules.
    #[cfg_attr(feature = "serde", serde(default = "default_c_gamma"))]
    pub c_gamma: f64,
}

#[cfg(feature = "serde")]
fn default_q() -> f64 {
    2.0
}

#[cfg(feature = "serde")]
fn default_c_gamma() -> f64 {
    1.0
}

impl ProblemConstants {
    /// Constants with only `Delta`, `sigma1` and `p` set; `q = 2`.
    pub fn new(delta: f64, sigma1: f64, p: f64) -> Self {
        ProblemConstants {
            delta,
            l_bar: None,
            l1: None,
            delta_sim: None,
            l2: None,
            sigma1,
            sigma2: None,
            p,
            q: 2.0,
            eps: None,
            c_gamma: 1.0,
        }
    }

    /// Every constant set to `v`, with `p = q = 2`.
    pub fn uniform(v: f64) -> Self {
        ProblemConstants {
            delta: v,
            l_bar: Some(v),
            l1: Some(v),
            delta_sim: Some(v),
            l2: Some(v),
            sigma1: v,
            sigma2: Some(v),
            p: 2.0,
            q: 2.0,
            eps: Some(v),
            c_gamma: 1.0,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if !(self.p > 1.0 && self.p <= 2.0) {
            return Err(Error::invalid("p must lie in (1, 2]"));
        }
        if !(self.q >= 1.0 && self.q <= 2.0) {
            return Err(Error::invalid("q must lie in [1, 2]"));
        }
        let all = [Some(self.delta), self.l_bar, self.l1, self.delta_sim, self.l2, Some(self.sigma1), self.sigma2];
        if all.into_iter().flatten().any(|v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid("problem constants must be finite and non-negative"));
        }
        if !(self.c_gamma > 0.0) || !self.c_gamma.is_finite() {
            return Err(Error::invalid("c_gamma must be finite and positive"));
        }
        Ok(())
    }

    fn get(v: Option<f64>, name: &'static str) -> Result<f64, Error> {
        v.ok_or_else(|| Error::InvalidParameter(alloc::format!("schedule needs constant {name}")))
    }

    fn eps(&self) -> Result<f64, Error> {
        let e = Self::get(self.eps, "eps")?;
        if !(e > 0.0) {
            return Err(Error::invalid("target accuracy eps must be positive"));
        }
        Ok(e)
    }
}

fn nan_as_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn min_terms(terms: &[f64]) -> f64 {
    terms.iter().copied().map(nan_as_inf).fold(f64::INFINITY, f64::min)
}

fn max_terms(terms: &[f64]) -> f64 {
    terms.iter().copied().map(|v| if v.is_nan() { 0.0 } else { v }).fold(0.0, f64::max)
}

// rounds up, forgiving float noise just above an integer
fn ceil_count(v: f64) -> u64 {
    let r = math::floor(v + 0.5);
    if (v - r).abs() <= 1e-9 * r.max(1.0) {
        r.max(1.0) as u64
    } else {
        math::ceil(v).max(1.0) as u64
    }
}

fn check_t(t: usize) -> Result<f64, Error> {
    if t == 0 {
        return Err(Error::invalid("iteration budget must be at least 1"));
    }
    Ok(t as f64)
}

fn q_exponent(p: f64, q: f64) -> f64 {
    p * q / (p * (2.0 * q + 1.0) - 2.0 * q)
}

/// `(sigma1 / eps)^{p/(p-1)}`, at least 1.
fn minibatch(c: &ProblemConstants, eps: f64) -> u64 {
    ceil_count(max_terms(&[1.0, math::powf(c.sigma1 / eps, c.p / (c.p - 1.0))]))
}

fn alpha_eff(c: &ProblemConstants, eps: f64, t: f64, smooth: f64) -> f64 {
    let p = c.p;
    let a1 = math::powf(eps / (c.sigma1 * t), p / (2.0 * p - 1.0));
    let a2 = math::powf(smooth * c.delta / (c.sigma1 * c.sigma1 * t), q_exponent(p, c.q));
    max_terms(&[a1, a2])
}

fn finish(mut s: Schedule, rule: ScheduleRule, consumed: &'static [&'static str]) -> Result<Schedule, Error> {
    s.origin = Some(ScheduleOrigin { rule, consumed, log_factor: s.origin.as_ref().and_then(|o| o.log_factor) });
    s.validate()?;
    Ok(s)
}

fn base(gamma: f64, alpha: f64, init: InitGradient, t: usize) -> Schedule {
    Schedule { gamma, alpha, lambda1: None, lambda2: None, init, iterations: t, origin: None }
}

pub fn mvr_minibatch(c: &ProblemConstants, t: usize) -> Result<Schedule, Error> {
    c.validate()?;
    let tf = check_t(t)?;
    let eps = c.eps()?;
    let l_bar = ProblemConstants::get(c.l_bar, "Lbar")?;
    let alpha = alpha_eff(c, eps, tf, l_bar).min(1.0);
    let gamma = math::sqrt(c.delta * math::powf(alpha, 1.0 / c.q) / (l_bar * tf));
    let s = base(gamma, alpha, InitGradient::Minibatch(minibatch(c, eps)), t);
    finish(s, ScheduleRule::MvrMinibatch, &["Delta", "Lbar", "sigma1", "p", "q", "eps"])
}

pub fn mvr_minibatch_similarity(c: &ProblemConstants, t: usize) -> Result<Schedule, Error> {
    c.validate()?;
    let tf = check_t(t)?;
    let eps = c.eps()?;
    let l1 = ProblemConstants::get(c.l1, "L1")?;
    let ds = ProblemConstants::get(c.delta_sim, "delta_sim")?;
    let alpha = alpha_eff(c, eps, tf, ds).min(1.0);
    let gamma = min_terms(&[
        math::sqrt(c.delta / (l1 * tf)),
        math::sqrt(c.delta * math::powf(alpha, 1.0 / c.q) / (ds * tf)),
    ]);
    let s = base(gamma, alpha, InitGradient::Minibatch(minibatch(c, eps)), t);
    finish(s, ScheduleRule::MvrMinibatchSimilarity, &["Delta", "L1", "delta_sim", "sigma1", "p", "q", "eps"])
}

pub fn mvr_single_sample(c: &ProblemConstants, t: usize) -> Result<Schedule, Error> {
    c.validate()?;
    let tf = check_t(t)?;
    let l_bar = ProblemConstants::get(c.l_bar, "Lbar")?;
    let alpha = 1.0 / math::sqrt(tf);
    let gamma = math::sqrt(c.delta * alpha / (l_bar * tf));
    let s = base(gamma, alpha, InitGradient::Minibatch(1), t);
    finish(s, ScheduleRule::MvrSingleSample, &["Delta", "Lbar"])
}

pub fn mvr_single_sample_similarity(c: &ProblemConstants, t: usize) -> Result<Schedule, Error> {
    c.validate()?;
    let tf = check_t(t)?;
    let l1 = ProblemConstants::get(c.l1, "L1")?;
    let ds = ProblemConstants::get(c.delta_sim, "delta_sim")?;
    let alpha = 1.0 / math::sqrt(tf);
    let gamma = min_terms(&[math::sqrt(c.delta / (l1 * tf)), math::sqrt(c.delta * alpha / (ds * tf))]);
    let s = base(gamma, alpha, InitGradient::Minibatch(1), t);
    finish(s, ScheduleRule::MvrSingleSampleSimilarity, &["Delta", "L1", "delta_sim"])
}

pub fn hess_minibatch(c: &ProblemConstants, t: usize) -> Result<Schedule, Error> {
    c.validate()?;
    let tf = check_t(t)?;
    let eps = c.eps()?;
    let l1 = ProblemConstants::get(c.l1, "L1")?;
    let s2 = ProblemConstants::get(c.sigma2, "sigma2")?;
    let l2 = ProblemConstants::get(c.l2, "L2")?;
    let p = c.p;
    let a3 = math::powf(
        math::sqrt(l2) * c.delta / (math::powf(c.sigma1, 1.5) * tf),
        4.0 * p / (7.0 * p - 6.0),
    );
    let alpha = max_terms(&[alpha_eff(c, eps, tf, s2), a3]).min(1.0);
    let gamma = min_terms(&[
        math::sqrt(c.delta / (l1 * tf)),
        math::sqrt(c.delta * math::powf(alpha, 1.0 / c.q) / (s2 * tf)),
        math::cbrt(c.delta * math::sqrt(alpha) / (l2 * tf)),
    ]);
    let s = base(gamma, alpha, InitGradient::Minibatch(minibatch(c, eps)), t);
    finish(s, ScheduleRule::HessMinibatch, &["Delta", "L1", "L2", "sigma1", "sigma2", "p", "q", "eps"])
}

/// `log(8T / beta)`, which must be at least 1.
fn log_factor(t: f64, beta: f64) -> Result<f64, Error> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::invalid("failure probability beta must lie in (0, 1]"));
    }
    let l = math::ln(8.0 * t / beta);
    if l < 1.0 {
        return Err(Error::invalid("log(8T/beta) must be at least 1"));
    }
    Ok(l)
}

fn clipped_alpha(c: &ProblemConstants, t: f64) -> f64 {
    let p = c.p;
    max_terms(&[math::powf(t, -p / (2.0 * p - 1.0)), math::powf(t, -q_exponent(p, c.q))])
}

fn lambda2(c: &ProblemConstants, smooth: f64, alpha: f64) -> f64 {
    max_terms(&[4.0 * math::sqrt(smooth * c.delta), c.sigma1 * math::powf(alpha, -1.0 / c.p)])
}

fn clipped(gamma: f64, alpha: f64, l1: f64, l2: f64, t: usize, log: f64) -> Schedule {
    Schedule {
        gamma,
        alpha,
        lambda1: Some(l1),
        lambda2: Some(l2),
        init: InitGradient::Zero,
        iterations: t,
        origin: Some(ScheduleOrigin { rule: ScheduleRule::ClippedMvr, consumed: &[], log_factor: Some(log) }),
    }
}

/// Shared by the clipped rules: `sigma1`-branch of the step size.
fn sigma_term(c: &ProblemConstants, coef: f64, alpha: f64, t: f64, log: f64) -> f64 {
    c.delta / (coef * c.sigma1 * math::powf(alpha, (c.p - 1.0) / c.p) * t * log)
}

pub fn clipped_mvr(c: &ProblemConstants, t: usize, beta: f64) -> Result<Schedule, Error> {
    c.validate()?;
    let tf = check_t(t)?;
    let log = log_factor(tf, beta)?;
    let lb = ProblemConstants::get(c.l_bar, "Lbar")?;
    let d = c.delta;
    let alpha = clipped_alpha(c, tf);
    let gamma = c.c_gamma
        * min_terms(&[
            math::sqrt(d / (2.0 * lb * tf)),
            alpha / 8.0 * math::sqrt(d / (2.0 * lb)),
            math::sqrt(d / lb) / (704.0 * alpha * tf * log),
            sigma_term(c, 176.0, alpha, tf, log),
            math::sqrt(d * math::powf(alpha, 1.0 / c.q) / (736.0 * lb * tf * log)),
        ]);
    let l1 = 2.0 * gamma * lb * math::powf(alpha, -1.0 / c.q);
    let s = clipped(gamma, alpha, l1, lambda2(c, lb, alpha), t, log);
    finish(s, ScheduleRule::ClippedMvr, &["Delta", "Lbar", "sigma1", "p", "q", "c_gamma"])
}

pub fn clipped_mvr_similarity(c: &ProblemConstants, t: usize, beta: f64) -> Result<Schedule, Error> {
    c.validate()?;
    let tf = check_t(t)?;
    let log = log_factor(tf, beta)?;
    let l1 = ProblemConstants::get(c.l1, "L1")?;
    let ds = ProblemConstants::get(c.delta_sim, "delta_sim")?;
    let d = c.delta;
    let alpha = clipped_alpha(c, tf);
    let gamma = c.c_gamma
        * min_terms(&[
            math::sqrt(d / (2.0 * l1 * tf)),
            alpha / 8.0 * math::sqrt(d / (2.0 * l1)),
            math::sqrt(d / l1) / (704.0 * alpha * tf * log),
            sigma_term(c, 176.0, alpha, tf, log),
            math::sqrt(d / (352.0 * l1 * tf * log)),
            math::sqrt(d * math::powf(alpha, 1.0 / c.q) / (176.0 * ds * tf * log)),
        ]);
    let lam1 = max_terms(&[2.0 * gamma * l1, gamma * ds * math::powf(alpha, -1.0 / c.q)]);
    let s = clipped(gamma, alpha, lam1, lambda2(c, l1, alpha), t, log);
    finish(s, ScheduleRule::ClippedMvrSimilarity, &["Delta", "L1", "delta_sim", "sigma1", "p", "q", "c_gamma"])
}

pub fn clipped_hess(c: &ProblemConstants, t: usize, beta: f64) -> Result<Schedule, Error> {
    c.validate()?;
    let tf = check_t(t)?;
    let log = log_factor(tf, beta)?;
    let l1 = ProblemConstants::get(c.l1, "L1")?;
    let l2 = ProblemConstants::get(c.l2, "L2")?;
    let s2 = ProblemConstants::get(c.sigma2, "sigma2")?;
    let d = c.delta;
    let alpha = clipped_alpha(c, tf);
    let gamma = c.c_gamma
        * min_terms(&[
            math::sqrt(2.0 * d / (5.0 * l1 * tf)),
            alpha / 10.0 * math::sqrt(d / (2.0 * l1)),
            math::cbrt(d * alpha / (20.0 * l2 * tf)),
            math::sqrt(d / l1) / (880.0 * alpha * tf * log),
            sigma_term(c, 220.0, alpha, tf, log),
            math::sqrt(d / (440.0 * l1 * tf * log)),
            math::sqrt(d * math::powf(alpha, 1.0 / c.q) / (220.0 * s2 * tf * log)),
        ]);
    let lam1 = max_terms(&[2.0 * gamma * l1, gamma * s2 * math::powf(alpha, -1.0 / c.q)]);
    let s = clipped(gamma, alpha, lam1, lambda2(c, l1, alpha), t, log);
    finish(s, ScheduleRule::ClippedHess, &["Delta", "L1", "L2", "sigma1", "sigma2", "p", "q", "c_gamma"])
}

pub fn sgd_mvr(c: &ProblemConstants, t: usize) -> Result<Schedule, Error> {
    c.validate()?;
    check_t(t)?;
    let eps = c.eps()?;
    let l1 = ProblemConstants::get(c.l1, "L1")?;
    let ds = ProblemConstants::get(c.delta_sim, "delta_sim")?;
    let ratio = eps * eps / (c.sigma1 * c.sigma1);
    let alpha = nan_as_inf(ratio).min(1.0);
    let gamma = 1.0 / (l1 + ds * core::f64::consts::SQRT_2 * (1.0 - alpha) / math::sqrt(alpha));
    let b = ceil_count(max_terms(&[1.0, c.sigma1 * c.sigma1 / (eps * eps)]));
    let s = base(gamma, alpha, InitGradient::Minibatch(b), t);
    finish(s, ScheduleRule::SgdMvr, &["Delta", "L1", "delta_sim", "sigma1", "eps"])
}

/// Iteration budget `max{sigma1^2/eps^2, 2 Delta (L1/eps^2 + delta_sim sigma1/eps^3)}`
/// paired with [`sgd_mvr`].
pub fn sgd_mvr_budget(c: &ProblemConstants) -> Result<usize, Error> {
    c.validate()?;
    let eps = c.eps()?;
    let l1 = ProblemConstants::get(c.l1, "L1")?;
    let ds = ProblemConstants::get(c.delta_sim, "delta_sim")?;
    let e2 = eps * eps;
    let t = max_terms(&[1.0, c.sigma1 * c.sigma1 / e2, 2.0 * c.delta * (l1 / e2 + ds * c.sigma1 / (e2 * eps))]);
    Ok(ceil_count(t) as usize)
}

/// Every rule evaluated on the same constants, skipping those whose
/// constants are missing.
pub fn all_schedules(c: &ProblemConstants, t: usize, beta: f64) -> Vec<(ScheduleRule, Schedule)> {
    ScheduleRule::ALL
        .into_iter()
        .filter_map(|r| r.build(c, t, Some(beta)).ok().map(|s| (r, s)))
        .collect()
}
