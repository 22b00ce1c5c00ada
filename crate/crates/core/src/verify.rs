//! Numerical checks of the structural properties the rest of the crate is
//! meant to have. Each check is reproducible from its name and seed.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::Error;
use crate::instances::{prog, HardInstance};
use crate::math;
use crate::noise::{exact_pth_moment, sample_noise, NoiseSpec};
use crate::optimizers::{RunTrace, Schedule};
use crate::oracle::{Objective, StochasticOracle, SupportTracker};
use crate::rng::RngStream;
use crate::vector::{clip, norm, Vector};

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub bound: f64,
    pub samples: u64,
    pub seed: u64,
}

impl CheckReport {
    fn at_most(name: &str, observed: f64, bound: f64, samples: u64, seed: u64) -> Self {
        CheckReport { name: name.to_string(), passed: observed <= bound, observed, bound, samples, seed }
    }

    fn above(name: &str, observed: f64, bound: f64, samples: u64, seed: u64) -> Self {
        CheckReport { name: name.to_string(), passed: observed > bound, observed, bound, samples, seed }
    }
}

/// A runner as seen by [`check_zero_chain_rate`].
pub type Runner<'a> =
    &'a dyn Fn(&mut dyn StochasticOracle, &[f64], &Schedule, &mut RngStream) -> Result<RunTrace, Error>;

fn named_rng(name: &str, seed: u64) -> RngStream {
    RngStream::new(seed).child(name)
}

fn box_point(d: usize, radius: f64, rng: &mut RngStream) -> Vector {
    Vector::from_fn(d, |_| radius * (2.0 * rng.uniform() - 1.0))
}

fn relative_error(approx: &[f64], exact: &[f64]) -> f64 {
    let diff: Vec<f64> = approx.iter().zip(exact).map(|(a, b)| a - b).collect();
    norm(&diff) / norm(exact).max(1.0)
}

/// Central differences of `value` against `gradient` at `n_points` uniform
/// points of `[-radius, radius]^d`. The error at a point is
/// `||fd - g|| / max(||g||, 1)`; the report carries the largest.
pub fn check_finite_diff(
    obj: &dyn Objective,
    n_points: usize,
    h: f64,
    tol: f64,
    radius: f64,
    seed: u64,
) -> Result<CheckReport, Error> {
    const NAME: &str = "finite_difference_gradient";
    if !(h > 0.0) {
        return Err(Error::invalid("difference step must be positive"));
    }
    let d = obj.dim();
    let mut rng = named_rng(NAME, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_points {
        let x = box_point(d, radius, &mut rng);
        let g = obj.gradient(&x);
        let mut xp = x.clone();
        let fd = Vector::from_fn(d, |i| {
            xp[i] = x[i] + h;
            let up = obj.value(&xp);
            xp[i] = x[i] - h;
            let down = obj.value(&xp);
            xp[i] = x[i];
            (up - down) / (2.0 * h)
        });
        worst = worst.max(relative_error(&fd, &g));
    }
    Ok(CheckReport::at_most(NAME, worst, tol, n_points as u64, seed))
}

/// Central differences of `gradient` along a random unit direction against
/// `hess_vec`, same error measure as [`check_finite_diff`].
pub fn check_hess_vec_fd(
    obj: &dyn Objective,
    n_points: usize,
    h: f64,
    tol: f64,
    radius: f64,
    seed: u64,
) -> Result<CheckReport, Error> {
    const NAME: &str = "finite_difference_hess_vec";
    if !(h > 0.0) {
        return Err(Error::invalid("difference step must be positive"));
    }
    let d = obj.dim();
    let mut rng = named_rng(NAME, seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_points {
        let x = box_point(d, radius, &mut rng);
        let mut v = Vector::from_fn(d, |_| rng.standard_normal());
        let vn = v.norm();
        v.scale(1.0 / vn);
        let mut up = x.clone();
        up.axpy(h, &v);
        let mut down = x.clone();
        down.axpy(-h, &v);
        let mut fd = obj.gradient(&up).sub(&obj.gradient(&down));
        fd.scale(1.0 / (2.0 * h));
        worst = worst.max(relative_error(&fd, &obj.hess_vec(&x, &v)));
    }
    Ok(CheckReport::at_most(NAME, worst, tol, n_points as u64, seed))
}

/// Upper bound on `||grad F_T||_inf` for the unscaled chain.
pub const HARD_GRAD_SUP: f64 = 23.0;
/// Gradient Lipschitz constant of the unscaled chain.
pub const HARD_GRAD_LIPSCHITZ: f64 = 152.0;
/// `F_T(0) - inf F_T <= HARD_SUBOPTIMALITY * T`.
pub const HARD_SUBOPTIMALITY: f64 = 12.0;

/// Empirical versions of the hard instance's structural constants on
/// `n` random points of `[-2, 2]^T` (chain taken unscaled):
///
/// * `hard_grad_sup`: largest `||grad F_T(x)||_inf`, bound 23;
/// * `hard_large_gradient`: smallest `||grad F_T(x)||` over points with
///   `prog_0(x) < T`, must exceed 1;
/// * `hard_lipschitz`: largest `||grad F(x) - grad F(y)|| / ||x - y||` over
///   random pairs at random separations, bound 152;
/// * `hard_zero_chain`: number of points where `grad F_T` leaves the
///   coordinates `1..=prog_{1/2}(x) + 1`, must be 0.
pub fn check_hard_constants(t: usize, n: usize, seed: u64) -> Result<Vec<CheckReport>, Error> {
    let inst = HardInstance::new(t, 1.0)?;
    let mut rng = named_rng("hard_constants", seed);
    let mut sup: f64 = 0.0;
    let mut min_norm = f64::INFINITY;
    let mut lip: f64 = 0.0;
    let mut chain_breaks = 0u64;
    for _ in 0..n {
        let x = box_point(t, 2.0, &mut rng);
        let g = Objective::gradient(&inst, &x);
        sup = g.iter().fold(sup, |m, v| m.max(v.abs()));
        let k = prog(&x, 0.5).0;
        if g.iter().enumerate().any(|(i, v)| *v != 0.0 && i + 1 > k + 1) {
            chain_breaks += 1;
        }

        // truncate to a random progress below T
        let keep = (rng.uniform() * t as f64) as usize;
        let mut z = x.clone();
        for zi in z.iter_mut().skip(keep) {
            *zi = 0.0;
        }
        min_norm = min_norm.min(Objective::gradient(&inst, &z).norm());

        let scale = math::powf(10.0, -4.0 * rng.uniform());
        let mut y = x.clone();
        for yi in y.iter_mut() {
            *yi += scale * (2.0 * rng.uniform() - 1.0);
        }
        let dist = norm(&y.sub(&x));
        if dist > 0.0 {
            let gy = Objective::gradient(&inst, &y);
            lip = lip.max(norm(&gy.sub(&g)) / dist);
        }
    }
    let samples = n as u64;
    Ok(alloc::vec![
        CheckReport::at_most("hard_grad_sup", sup, HARD_GRAD_SUP, samples, seed),
        CheckReport::above("hard_large_gradient", min_norm, 1.0, samples, seed),
        CheckReport::at_most("hard_lipschitz", lip, HARD_GRAD_LIPSCHITZ, samples, seed),
        CheckReport::at_most("hard_zero_chain", chain_breaks as f64, 0.0, samples, seed),
    ])
}

/// Compares `E||Z||^p` with `sigma1^p`.
///
/// Families with finite support are enumerated exactly and must match to
/// relative `1e-12`. The rest are estimated from `n` draws and must satisfy
/// `estimate <= (1 + rel_tol) sigma1^p`.
pub fn check_p_moment(spec: &NoiseSpec, d: usize, n: usize, rel_tol: f64, seed: u64) -> Result<CheckReport, Error> {
    const NAME: &str = "noise_pth_moment";
    let target = math::powf(spec.sigma1, spec.p);
    if let crate::noise::NoiseFamily::TwoPointBernoulli { .. } = spec.family {
        let exact = exact_pth_moment(spec, d, spec.p).expect("finite support");
        let err = (exact - target).abs() / target.max(f64::MIN_POSITIVE);
        return Ok(CheckReport::at_most(NAME, err, 1e-12, 0, seed));
    }
    let mut rng = named_rng(NAME, seed);
    let est = crate::noise::estimate_pth_moment(spec, d, spec.p, n, &mut rng)?;
    Ok(CheckReport::at_most(NAME, est, (1.0 + rel_tol) * target, n as u64, seed))
}

/// Checks the clipping bounds for `X = center + Z`, `Xc = clip(X, lambda)`,
/// with `||center|| <= lambda / 2`:
///
/// * `clip_radius`: `||Xc - E Xc|| <= 2 lambda` for every draw (count of violations);
/// * `clip_bias`: `||E Xc - center|| <= 2^p sigma1^p / lambda^{p-1}`;
/// * `clip_moment`: `E||Xc - center||^q <= 2 * 3^q lambda^{q-p} sigma1^p`, `q` in `[p, 2]`.
///
/// Expectations are sample means; the last two compare against the bound
/// plus three standard errors.
pub fn check_clip_moments(
    spec: &NoiseSpec,
    center: &[f64],
    lambda: f64,
    q: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<CheckReport>, Error> {
    let p = spec.p;
    if norm(center) > lambda / 2.0 {
        return Err(Error::invalid("the clipping bounds need ||center|| <= lambda / 2"));
    }
    if !(q >= p && q <= 2.0) {
        return Err(Error::invalid("moment order q must lie in [p, 2]"));
    }
    if n < 2 {
        return Err(Error::invalid("need at least two draws"));
    }
    let d = center.len();
    let mut rng = named_rng("clip_moments", seed);
    let mut draws: Vec<Vector> = Vec::with_capacity(n);
    for _ in 0..n {
        let x = Vector::from(center).add(&sample_noise(spec, d, &mut rng));
        draws.push(clip(&x, lambda)?);
    }
    let nf = n as f64;
    let mut mean = Vector::zeros(d);
    for x in &draws {
        mean.axpy(1.0, x);
    }
    mean.scale(1.0 / nf);
    let mut violations = 0u64;
    let mut spread = 0.0;
    let mut mom = 0.0;
    let mut mom_sq = 0.0;
    for x in &draws {
        let r = norm(&x.sub(&mean));
        if r > 2.0 * lambda {
            violations += 1;
        }
        spread += r * r;
        let m = math::powf(norm(&x.sub(center)), q);
        mom += m;
        mom_sq += m * m;
    }
    let bias_se = math::sqrt(spread / (nf - 1.0) / nf);
    let mom_mean = mom / nf;
    let mom_se = math::sqrt(((mom_sq / nf - mom_mean * mom_mean).max(0.0)) * nf / (nf - 1.0) / nf);
    let s1p = math::powf(spec.sigma1, p);
    let bias_bound = math::powf(2.0, p) * s1p / math::powf(lambda, p - 1.0);
    let mom_bound = 2.0 * math::powf(3.0, q) * math::powf(lambda, q - p) * s1p;
    let samples = n as u64;
    Ok(alloc::vec![
        CheckReport::at_most("clip_radius", violations as f64, 0.0, samples, seed),
        CheckReport::at_most("clip_bias", norm(&mean.sub(center)), bias_bound + 3.0 * bias_se, samples, seed),
        CheckReport::at_most("clip_moment", mom_mean, mom_bound + 3.0 * mom_se, samples, seed),
    ])
}

/// Iterations during which a zero-respecting method stays below the end of
/// the chain with probability at least `1 - delta`.
pub fn zero_chain_horizon(t: usize, theta: f64, delta: f64) -> usize {
    let h = (t as f64 - math::ln(1.0 / delta)) / (2.0 * theta);
    if h < 1.0 {
        0
    } else {
        math::floor(h) as usize
    }
}

/// Runs `runner` from the origin on `inst` over `n_seeds` seeds for
/// [`zero_chain_horizon`] iterations, with every query checked for the
/// zero-respecting property.
///
/// * `zero_chain_reach`: fraction of runs whose iterates reach `prog_0 >= T`,
///   bound `delta + 3 sqrt(delta (1 - delta) / n)`;
/// * `zero_chain_reveal_rate`: revealed coordinates per query round, bound
///   `1.05 theta`.
///
/// A query that touches an unrevealed coordinate aborts with
/// [`Error::SupportViolation`].
pub fn check_zero_chain_rate(
    inst: &HardInstance,
    runner: Runner<'_>,
    sched: &Schedule,
    n_seeds: usize,
    delta: f64,
    base_seed: u64,
) -> Result<Vec<CheckReport>, Error> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1)"));
    }
    if n_seeds == 0 {
        return Err(Error::invalid("need at least one seed"));
    }
    let t = inst.chain_length();
    let horizon = zero_chain_horizon(t, inst.theta(), delta);
    if horizon == 0 {
        return Err(Error::invalid("chain too short for this delta and theta"));
    }
    let mut sched = sched.clone();
    sched.iterations = horizon;
    let x0 = Vector::zeros(t);
    let mut reached = 0usize;
    let mut rounds = 0usize;
    let mut reveals = 0usize;
    for i in 0..n_seeds {
        let mut oracle = inst.clone();
        let mut tracker = SupportTracker::new(&mut oracle);
        let mut rng = RngStream::new(base_seed.wrapping_add(i as u64));
        let trace = runner(&mut tracker, &x0, &sched, &mut rng)?;
        if trace.max_progress() >= t {
            reached += 1;
        }
        rounds += tracker.rounds();
        reveals += tracker.reveals();
    }
    let nf = n_seeds as f64;
    let frac = reached as f64 / nf;
    let rate = reveals as f64 / rounds.max(1) as f64;
    Ok(alloc::vec![
        CheckReport::at_most(
            "zero_chain_reach",
            frac,
            delta + 3.0 * math::sqrt(delta * (1.0 - delta) / nf),
            n_seeds as u64,
            base_seed
        ),
        CheckReport::at_most("zero_chain_reveal_rate", rate, 1.05 * inst.theta(), rounds as u64, base_seed),
    ])
}

/// Constants entering the estimator-error bound of [`check_mvr_recursion`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MvrBound {
    pub sigma1: f64,
    pub p: f64,
    pub q: f64,
    pub l_bar: f64,
}

impl MvrBound {
    /// `(1-alpha)^t e0 + 2 sigma1 alpha^{(p-1)/p} + 4 gamma L_bar alpha^{-1/q}`
    pub fn at(&self, t: usize, e0: f64, gamma: f64, alpha: f64) -> f64 {
        math::powf(1.0 - alpha, t as f64) * e0
            + 2.0 * self.sigma1 * math::powf(alpha, (self.p - 1.0) / self.p)
            + 4.0 * gamma * self.l_bar * math::powf(alpha, -1.0 / self.q)
    }
}

/// Seed-averaged `||g_t - grad F(x_t)||` of normalized MVR against
/// `slack` times [`MvrBound::at`], for every `t < T`. The report carries the
/// worst ratio of the two.
pub fn check_mvr_recursion(
    oracle: &mut dyn StochasticOracle,
    x0: &[f64],
    sched: &Schedule,
    bound: MvrBound,
    n_seeds: usize,
    slack: f64,
    base_seed: u64,
) -> Result<CheckReport, Error> {
    if n_seeds == 0 {
        return Err(Error::invalid("need at least one seed"));
    }
    let t = sched.iterations;
    let mut mean = alloc::vec![0.0; t];
    for i in 0..n_seeds {
        let mut rng = RngStream::new(base_seed.wrapping_add(i as u64));
        let trace = crate::optimizers::run_nsgd_mvr(oracle, x0, sched, &mut rng)?;
        for (m, e) in mean.iter_mut().zip(&trace.estimator_errors) {
            *m += e / n_seeds as f64;
        }
    }
    let worst = mean
        .iter()
        .enumerate()
        .map(|(k, m)| m / bound.at(k, mean[0], sched.gamma, sched.alpha))
        .fold(0.0, f64::max);
    Ok(CheckReport::at_most("mvr_recursion", worst, slack, n_seeds as u64, base_seed))
}
