//! Experiment configuration files.
//!
//! ```toml
//! algorithm = "nsgd_mvr"
//! t_grid = [256, 512, 1024, 2048]
//! n_seeds = 50
//! base_seed = 1
//! output = "out/rate"
//!
//! [instance]
//! kind = "quadratic"      # quadratic | hard | two_point
//! d = 10
//! L = 1.0
//! x0_norm = 1.0
//!
//! [noise]                 # additive noise, quadratic only
//! family = "symmetric_pareto"
//! p = 2.0
//! sigma1 = 10.0
//!
//! [schedule]
//! rule = "mvr_single_sample"
//!
//! [constants]             # Delta, p and sigma1 default from the instance and noise
//! Lbar = 1.0
//! ```
//!
//! An explicit schedule replaces `rule` with `gamma`, `alpha`, optional
//! `lambda1`/`lambda2` and `b_init` (0 means `g_0 = 0`).

use std::path::{Path, PathBuf};

use htopt_core::instances::{GradientEstimator, HardInstance, QuadraticBenchmark, Sign, TwoPointInstance};
use htopt_core::noise::{calibrate_with, Geometry, NoiseFamily, NoiseSpec, DEFAULT_TWO_POINT_R};
use htopt_core::optimizers::{Algorithm, InitGradient, ProblemConstants, Schedule, ScheduleRule};
use htopt_core::oracle::{noisy_oracle, Objective, StochasticOracle};
use htopt_core::Vector;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: String,
    pub t_grid: Vec<usize>,
    #[serde(default = "one")]
    pub n_seeds: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub instance: InstanceConfig,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub constants: ConstantsConfig,
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub kind: String,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default, rename = "T")]
    pub chain_length: Option<usize>,
    #[serde(default, rename = "L")]
    pub l: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub alpha_scale: Option<f64>,
    #[serde(default)]
    pub beta_scale: Option<f64>,
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub sign: Option<i8>,
    #[serde(default)]
    pub estimator: Option<GradientEstimator>,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    /// Starting point `x0_norm * (1, ..., 1) / sqrt(d)` when `x0` is absent.
    #[serde(default)]
    pub x0_norm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub family: String,
    pub p: f64,
    pub sigma1: f64,
    #[serde(default)]
    pub geometry: Option<Geometry>,
    #[serde(default)]
    pub r: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(default)]
    pub rule: Option<String>,
    /// Failure probability for the clipped rules.
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub lambda1: Option<f64>,
    #[serde(default)]
    pub lambda2: Option<f64>,
    #[serde(default)]
    pub b_init: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    #[serde(default, rename = "Delta")]
    pub delta: Option<f64>,
    #[serde(default, rename = "Lbar")]
    pub l_bar: Option<f64>,
    #[serde(default, rename = "L1")]
    pub l1: Option<f64>,
    #[serde(default)]
    pub delta_sim: Option<f64>,
    #[serde(default, rename = "L2")]
    pub l2: Option<f64>,
    #[serde(default)]
    pub sigma1: Option<f64>,
    #[serde(default)]
    pub sigma2: Option<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub c_gamma: Option<f64>,
}

pub const DEFAULT_BETA: f64 = 0.05;

/// A fully resolved problem: the oracle, where to start, and how to step.
pub enum Problem {
    Quadratic(htopt_core::oracle::AdditiveNoiseOracle<QuadraticBenchmark>),
    Hard(HardInstance),
    TwoPoint(TwoPointInstance),
}

impl Problem {
    pub fn oracle(&mut self) -> &mut dyn StochasticOracle {
        match self {
            Problem::Quadratic(o) => o,
            Problem::Hard(h) => h,
            Problem::TwoPoint(t) => t,
        }
    }

    pub fn objective(&self) -> &dyn Objective {
        match self {
            Problem::Quadratic(o) => o.inner(),
            Problem::Hard(h) => h,
            Problem::TwoPoint(t) => t,
        }
    }

    /// `F(x0) - inf F` where the infimum is known.
    fn known_suboptimality(&self, x0: &[f64]) -> Option<f64> {
        match self {
            Problem::Hard(_) => None,
            _ => Some(self.objective().value(x0)),
        }
    }
}

impl Clone for Problem {
    fn clone(&self) -> Self {
        match self {
            Problem::Quadratic(o) => Problem::Quadratic(o.clone()),
            Problem::Hard(h) => Problem::Hard(h.clone()),
            Problem::TwoPoint(t) => Problem::TwoPoint(*t),
        }
    }
}

fn cfg_err(e: htopt_core::Error) -> HarnessError {
    HarnessError::config(e.to_string())
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = toml::from_str(s).map_err(|e| HarnessError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_seeds == 0 {
            return Err(HarnessError::config("n_seeds must be at least 1"));
        }
        if self.t_grid.is_empty() || self.t_grid.windows(2).any(|w| w[0] >= w[1]) || self.t_grid[0] == 0 {
            return Err(HarnessError::config("t_grid must be a non-empty, strictly increasing list of positive budgets"));
        }
        self.algorithm()?;
        let (problem, x0) = self.problem()?;
        for &t in &self.t_grid {
            self.schedule_for(&problem, &x0, t)?;
        }
        Ok(())
    }

    pub fn algorithm(&self) -> Result<Algorithm, HarnessError> {
        Algorithm::from_name(&self.algorithm)
            .ok_or_else(|| HarnessError::config(format!("unknown algorithm '{}'", self.algorithm)))
    }

    pub fn noise_spec(&self) -> Result<Option<NoiseSpec>, HarnessError> {
        let Some(n) = &self.noise else { return Ok(None) };
        let family = match n.family.as_str() {
            "gaussian" => NoiseFamily::Gaussian,
            "symmetric_pareto" | "pareto" => NoiseFamily::SymmetricPareto,
            "two_point_bernoulli" | "two_point" => {
                NoiseFamily::TwoPointBernoulli { r: n.r.unwrap_or(DEFAULT_TWO_POINT_R) }
            }
            other => return Err(HarnessError::config(format!("unknown noise family '{other}'"))),
        };
        let geometry = n.geometry.unwrap_or(family.default_geometry());
        calibrate_with(family, n.p, n.sigma1, geometry).map(Some).map_err(cfg_err)
    }

    /// Builds the oracle and the starting point.
    pub fn problem(&self) -> Result<(Problem, Vector), HarnessError> {
        let inst = &self.instance;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| HarnessError::config(format!("instance '{}' needs '{name}'", inst.kind)))
        };
        let problem = match inst.kind.as_str() {
            "quadratic" => {
                let d = inst.d.ok_or_else(|| HarnessError::config("quadratic instance needs 'd'"))?;
                let q = QuadraticBenchmark::new(d, need(inst.l, "L")?).map_err(cfg_err)?;
                let noise = self.noise_spec()?.unwrap_or_else(NoiseSpec::zero);
                Problem::Quadratic(noisy_oracle(q, noise))
            }
            "hard" => {
                if self.noise.is_some() {
                    return Err(HarnessError::config("the hard instance draws its own noise; remove [noise]"));
                }
                let t = inst.chain_length.ok_or_else(|| HarnessError::config("hard instance needs 'T'"))?;
                let h = HardInstance::scaled(
                    t,
                    inst.alpha_scale.unwrap_or(1.0),
                    inst.beta_scale.unwrap_or(1.0),
                    need(inst.theta, "theta")?,
                )
                .map_err(cfg_err)?;
                Problem::Hard(h.with_estimator(inst.estimator.unwrap_or_default()))
            }
            "two_point" => {
                if self.noise.is_some() {
                    return Err(HarnessError::config("the two-point instance draws its own noise; remove [noise]"));
                }
                let d = inst.d.ok_or_else(|| HarnessError::config("two_point instance needs 'd'"))?;
                let sign = match inst.sign.unwrap_or(1) {
                    1 => Sign::Plus,
                    -1 => Sign::Minus,
                    _ => return Err(HarnessError::config("sign must be 1 or -1")),
                };
                let t = TwoPointInstance::new(
                    d,
                    need(inst.l, "L")?,
                    need(inst.r, "r")?,
                    inst.beta_scale.unwrap_or(1.0),
                    sign,
                )
                .map_err(cfg_err)?;
                Problem::TwoPoint(t)
            }
            other => return Err(HarnessError::config(format!("unknown instance kind '{other}'"))),
        };
        let d = problem.objective().dim();
        let x0 = match (&inst.x0, inst.x0_norm) {
            (Some(v), _) if v.len() == d => Vector::from(v.clone()),
            (Some(v), _) => {
                return Err(HarnessError::config(format!("x0 has {} entries, instance has dimension {d}", v.len())))
            }
            (None, Some(r)) => Vector::from_fn(d, |_| r / (d as f64).sqrt()),
            (None, None) => Vector::zeros(d),
        };
        Ok((problem, x0))
    }

    fn constants(&self, problem: &Problem, x0: &[f64]) -> Result<ProblemConstants, HarnessError> {
        let c = &self.constants;
        let noise = self.noise_spec()?;
        let delta = match c.delta.or_else(|| problem.known_suboptimality(x0)) {
            Some(d) => d,
            None => return Err(HarnessError::config("constants need 'Delta' for this instance")),
        };
        let sigma1 = c.sigma1.or(noise.map(|n| n.sigma1)).unwrap_or(0.0);
        let p = c.p.or(noise.map(|n| n.p)).unwrap_or(2.0);
        let mut pc = ProblemConstants::new(delta, sigma1, p);
        pc.l_bar = c.l_bar;
        pc.l1 = c.l1;
        pc.delta_sim = c.delta_sim;
        pc.l2 = c.l2;
        pc.sigma2 = c.sigma2;
        pc.q = c.q.unwrap_or(2.0);
        pc.eps = c.eps;
        pc.c_gamma = c.c_gamma.unwrap_or(1.0);
        Ok(pc)
    }

    /// The schedule used at budget `t`.
    pub fn schedule_for(&self, problem: &Problem, x0: &[f64], t: usize) -> Result<Schedule, HarnessError> {
        let s = &self.schedule;
        let sched = match &s.rule {
            Some(name) => {
                if s.gamma.is_some() || s.alpha.is_some() {
                    return Err(HarnessError::config("give either schedule.rule or an explicit gamma/alpha, not both"));
                }
                let rule = ScheduleRule::from_name(name)
                    .ok_or_else(|| HarnessError::config(format!("unknown schedule rule '{name}'")))?;
                let c = self.constants(problem, x0)?;
                rule.build(&c, t, Some(s.beta.unwrap_or(DEFAULT_BETA))).map_err(cfg_err)?
            }
            None => {
                let (Some(gamma), Some(alpha)) = (s.gamma, s.alpha) else {
                    return Err(HarnessError::config("schedule needs a rule or explicit gamma and alpha"));
                };
                let init = match s.b_init.unwrap_or(1) {
                    0 => InitGradient::Zero,
                    b => InitGradient::Minibatch(b),
                };
                let mut sched = Schedule::explicit(gamma, alpha, init, t).map_err(cfg_err)?;
                sched.lambda1 = s.lambda1;
                sched.lambda2 = s.lambda2;
                sched.validate().map_err(cfg_err)?;
                sched
            }
        };
        let alg = self.algorithm()?;
        let has_thresholds = sched.lambda1.is_some() && sched.lambda2.is_some();
        if alg.clips() && !has_thresholds {
            return Err(HarnessError::config(format!("{} needs lambda1 and lambda2", alg.name())));
        }
        Ok(sched)
    }
}
