use htopt_core::instances::{HardInstance, QuadraticBenchmark};
use htopt_core::noise::{calibrate, NoiseFamily, NoiseSpec};
use htopt_core::optimizers::{run_nsgd_hess, run_nsgd_mvr, InitGradient, RunTrace, Schedule};
use htopt_core::oracle::{noisy_oracle, SupportTracker};
use htopt_core::verify::{self, MvrBound};
use htopt_core::{Error, Objective, RngStream, StochasticOracle, Vector};

/// Wraps an objective and perturbs its gradient (`true`) or its
/// Hessian-vector product (`false`) by 1%.
struct Corrupted<O>(O, bool);

impl<O: Objective> Objective for Corrupted<O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vector {
        let mut g = self.0.gradient(x);
        if self.1 {
            g.scale(1.01);
        }
        g
    }
    fn hess_vec(&self, x: &[f64], v: &[f64]) -> Vector {
        let mut h = self.0.hess_vec(x, v);
        if !self.1 {
            h.scale(1.01);
        }
        h
    }
}

#[test]
fn finite_differences() {
    let q = QuadraticBenchmark::new(6, 3.0).unwrap();
    // exact in exact arithmetic; rounding grows like eps / h below 1e-5
    for h in [1e-5, 3e-5, 1e-4] {
        let r = verify::check_finite_diff(&q, 50, h, 1e-9, 2.0, 1).unwrap();
        assert!(r.passed, "h={h}: {}", r.observed);
    }
    let hard = HardInstance::new(20, 0.1).unwrap();
    assert!(verify::check_finite_diff(&hard, 100, 1e-6, 1e-5, 2.0, 2).unwrap().passed);
    assert!(verify::check_hess_vec_fd(&hard, 100, 1e-6, 1e-5, 2.0, 2).unwrap().passed);

    let bad_grad = Corrupted(HardInstance::new(20, 0.1).unwrap(), true);
    assert!(!verify::check_finite_diff(&bad_grad, 100, 1e-6, 1e-5, 2.0, 2).unwrap().passed);
    let bad_hess = Corrupted(HardInstance::new(20, 0.1).unwrap(), false);
    assert!(verify::check_finite_diff(&bad_hess, 100, 1e-6, 1e-5, 2.0, 2).unwrap().passed);
    assert!(!verify::check_hess_vec_fd(&bad_hess, 100, 1e-6, 1e-5, 2.0, 2).unwrap().passed);
    assert!(verify::check_finite_diff(&q, 5, 0.0, 1e-9, 1.0, 1).is_err());
}

#[test]
fn hard_constants_hold() {
    for r in verify::check_hard_constants(8, 2000, 3).unwrap() {
        assert!(r.passed, "{}: {} vs {}", r.name, r.observed, r.bound);
    }
}

#[test]
fn moment_checks() {
    let z = verify::check_p_moment(&NoiseSpec::zero(), 3, 10_000, 0.1, 0).unwrap();
    assert!(z.passed);
    assert_eq!(z.observed, 0.0);
    let two = calibrate(NoiseFamily::TwoPointBernoulli { r: 0.3 }, 1.7, 2.0).unwrap();
    let r = verify::check_p_moment(&two, 3, 10_000, 0.1, 0).unwrap();
    assert!(r.passed && r.samples == 0);
    let pareto = calibrate(NoiseFamily::SymmetricPareto, 1.5, 1.0).unwrap();
    assert!(verify::check_p_moment(&pareto, 3, 1_000_000, 0.1, 4).unwrap().passed);

    // a sampler whose scale is twice the calibrated one must fail
    let mut loud = calibrate(NoiseFamily::Gaussian, 2.0, 1.0).unwrap();
    loud.sigma1 = 0.5;
    assert!(!verify::check_p_moment(&loud, 3, 100_000, 0.1, 5).unwrap().passed);
}

#[test]
fn clip_moment_checks() {
    let spec = calibrate(NoiseFamily::SymmetricPareto, 1.3, 1.0).unwrap();
    for r in verify::check_clip_moments(&spec, &[0.5, 0.0, -0.5], 10.0, 1.3, 100_000, 6).unwrap() {
        assert!(r.passed, "{}: {} vs {}", r.name, r.observed, r.bound);
    }
    // no noise: every observed value is zero
    for r in verify::check_clip_moments(&NoiseSpec::zero(), &[0.5, 0.0], 2.0, 2.0, 1000, 6).unwrap() {
        assert!(r.passed);
        assert_eq!(r.observed, 0.0);
    }
    // infinite threshold: nothing is clipped and the bias bound is zero
    let g = calibrate(NoiseFamily::Gaussian, 2.0, 1.0).unwrap();
    let reps = verify::check_clip_moments(&g, &[1.0, 2.0], f64::INFINITY, 2.0, 100_000, 7).unwrap();
    assert_eq!(reps[1].name, "clip_bias");
    assert!(reps[1].passed);
    assert!(reps[1].observed < 0.01);
    assert!(verify::check_clip_moments(&spec, &[3.0], 2.0, 1.3, 1000, 0).is_err());
}

#[test]
fn zero_chain_rate_passes_for_library_runners() {
    let inst = HardInstance::new(30, 0.1).unwrap();
    let sched = Schedule::explicit(0.25, 0.5, InitGradient::Minibatch(1), 1).unwrap();
    for r in verify::check_zero_chain_rate(&inst, &run_nsgd_mvr, &sched, 200, 0.5, 8).unwrap() {
        assert!(r.passed, "{}: {} vs {}", r.name, r.observed, r.bound);
    }
    for r in verify::check_zero_chain_rate(&inst, &run_nsgd_hess, &sched, 50, 0.5, 8).unwrap() {
        assert!(r.passed, "{}: {} vs {}", r.name, r.observed, r.bound);
    }
}

#[test]
fn deterministic_chain_reveals_one_coordinate_per_query() {
    let t = 12;
    let mut inst = HardInstance::new(t, 1.0).unwrap();
    let mut tracker = SupportTracker::new(&mut inst);
    let sched = Schedule::explicit(2.0, 1.0, InitGradient::Minibatch(1), 40).unwrap();
    let mut last = 0;
    let mut rng = RngStream::new(0);
    let x0 = vec![0.0; t];
    run_nsgd_mvr(&mut tracker, &x0, &sched, &mut rng).unwrap();
    assert!(tracker.reveals() <= tracker.rounds());
    // step by step: the frontier grows by at most one per round
    let mut inst = HardInstance::new(t, 1.0).unwrap();
    let mut tracker = SupportTracker::new(&mut inst);
    let mut x = Vector::zeros(t);
    for _ in 0..30 {
        let g = tracker.gradient(&x, &mut rng).unwrap();
        assert!(tracker.frontier() <= last + 1);
        last = tracker.frontier();
        x = htopt_core::normalized_step(&x, &g, 2.0);
    }
    assert!(last > 5);
}

#[test]
fn support_violations_are_caught() {
    let t = 10;
    let inst = HardInstance::new(t, 0.2).unwrap();
    let sched = Schedule::explicit(0.25, 0.5, InitGradient::Minibatch(1), 1).unwrap();
    let cheat = |o: &mut dyn StochasticOracle, x0: &[f64], _: &Schedule, rng: &mut RngStream| -> Result<RunTrace, Error> {
        let mut x = Vector::from(x0);
        x[t - 1] = 1.0;
        o.gradient(&x, rng)?;
        unreachable!()
    };
    let err = verify::check_zero_chain_rate(&inst, &cheat, &sched, 5, 0.5, 0).unwrap_err();
    assert!(matches!(err, Error::SupportViolation { round: 0, coordinate: 10 }), "{err:?}");
}

#[test]
fn mvr_recursion_bound() {
    let bound = MvrBound { sigma1: 1.0, p: 2.0, q: 2.0, l_bar: 1.0 };
    let small_gamma = bound.at(10_000, 1.0, 1e-12, 0.1);
    assert!((small_gamma - 2.0 * 0.1f64.sqrt()).abs() < 1e-6);
    assert!((small_gamma - 0.632).abs() < 1e-3);

    let g = calibrate(NoiseFamily::Gaussian, 2.0, 1.0).unwrap();
    let mut o = noisy_oracle(QuadraticBenchmark::new(4, 1.0).unwrap(), g);
    let sched = Schedule::explicit(0.01, 0.05, InitGradient::Minibatch(4), 300).unwrap();
    let x0 = [0.5; 4];
    let r = verify::check_mvr_recursion(&mut o, &x0, &sched, bound, 200, 2.0, 9).unwrap();
    assert!(r.passed, "{}", r.observed);
    // shrinking the bound by a factor of 100 must break it
    let tight = MvrBound { sigma1: 0.01, p: 2.0, q: 2.0, l_bar: 0.01 };
    assert!(!verify::check_mvr_recursion(&mut o, &x0, &sched, tight, 200, 2.0, 9).unwrap().passed);
}

#[test]
fn reports_are_reproducible() {
    let spec = calibrate(NoiseFamily::SymmetricPareto, 1.5, 1.0).unwrap();
    let a = verify::check_clip_moments(&spec, &[0.1, 0.2], 2.0, 1.5, 20_000, 10).unwrap();
    let b = verify::check_clip_moments(&spec, &[0.1, 0.2], 2.0, 1.5, 20_000, 10).unwrap();
    assert_eq!(a, b);
    assert_eq!(verify::check_hard_constants(5, 100, 1).unwrap(), verify::check_hard_constants(5, 100, 1).unwrap());
}
