//! Built-in verification suites behind `htopt verify`.

use htopt_core::instances::{HardInstance, QuadraticBenchmark, Sign, TwoPointInstance};
use htopt_core::noise::{calibrate, calibrate_with, Geometry, NoiseFamily};
use htopt_core::optimizers::{run_nsgd_mvr, InitGradient, Schedule};
use htopt_core::oracle::{noisy_oracle, Objective};
use htopt_core::verify::{self, CheckReport, MvrBound};
use htopt_core::Vector;

use crate::error::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Derivatives,
    HardConstants,
    Moments,
    Clipping,
    ZeroChain,
    Mvr,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Derivatives, Suite::HardConstants, Suite::Moments, Suite::Clipping, Suite::ZeroChain, Suite::Mvr];

    pub fn run(self, seed: u64) -> Result<Vec<CheckReport>, HarnessError> {
        let out = match self {
            Suite::All => {
                let mut all = Vec::new();
                for s in Suite::EACH {
                    all.extend(s.run(seed)?);
                }
                return Ok(all);
            }
            Suite::Derivatives => derivatives(seed)?,
            Suite::HardConstants => verify::check_hard_constants(12, 4000, seed)?,
            Suite::Moments => moments(seed)?,
            Suite::Clipping => clipping(seed)?,
            Suite::ZeroChain => zero_chain(seed)?,
            Suite::Mvr => mvr(seed)?,
        };
        Ok(out)
    }
}

fn tagged(mut r: CheckReport, tag: &str) -> CheckReport {
    r.name = format!("{}[{tag}]", r.name);
    r
}

fn derivatives(seed: u64) -> Result<Vec<CheckReport>, htopt_core::Error> {
    let hard = HardInstance::new(8, 0.5)?;
    let quad = QuadraticBenchmark::new(5, 2.0)?;
    let two = TwoPointInstance::new(4, 1.5, 0.1, 0.7, Sign::Minus)?;
    let objs: [(&dyn Objective, &str, f64); 3] = [(&hard, "hard", 1.0), (&quad, "quadratic", 3.0), (&two, "two_point", 3.0)];
    let mut out = Vec::new();
    for (obj, tag, radius) in objs {
        out.push(tagged(verify::check_finite_diff(obj, 200, 1e-5, 1e-6, radius, seed)?, tag));
        out.push(tagged(verify::check_hess_vec_fd(obj, 200, 1e-5, 1e-5, radius, seed)?, tag));
    }
    Ok(out)
}

fn moments(seed: u64) -> Result<Vec<CheckReport>, htopt_core::Error> {
    let d = 5;
    let specs = [
        ("gaussian", calibrate(NoiseFamily::Gaussian, 2.0, 1.5)?),
        ("pareto", calibrate(NoiseFamily::SymmetricPareto, 1.5, 1.0)?),
        ("pareto_coordinatewise", calibrate_with(NoiseFamily::SymmetricPareto, 1.5, 1.0, Geometry::Coordinatewise)?),
        ("two_point", calibrate(NoiseFamily::TwoPointBernoulli { r: 0.1 }, 1.5, 2.0)?),
    ];
    let mut out = Vec::new();
    for (tag, spec) in specs {
        out.push(tagged(verify::check_p_moment(&spec, d, 200_000, 0.1, seed)?, tag));
    }
    Ok(out)
}

fn clipping(seed: u64) -> Result<Vec<CheckReport>, htopt_core::Error> {
    let mut out = Vec::new();
    let center = [0.3, -0.2, 0.1];
    for (tag, spec) in [
        ("pareto", calibrate(NoiseFamily::SymmetricPareto, 1.5, 1.0)?),
        ("gaussian", calibrate(NoiseFamily::Gaussian, 1.5, 1.0)?),
    ] {
        for lambda in [1.0, 4.0] {
            for r in verify::check_clip_moments(&spec, &center, lambda, 1.8, 100_000, seed)? {
                out.push(tagged(r, &format!("{tag},lambda={lambda}")));
            }
        }
    }
    Ok(out)
}

fn zero_chain(seed: u64) -> Result<Vec<CheckReport>, htopt_core::Error> {
    let inst = HardInstance::new(30, 0.1)?;
    let sched = Schedule::explicit(0.25, 0.5, InitGradient::Minibatch(1), 1)?;
    verify::check_zero_chain_rate(&inst, &run_nsgd_mvr, &sched, 200, 0.5, seed)
}

fn mvr(seed: u64) -> Result<Vec<CheckReport>, htopt_core::Error> {
    let d = 4;
    let spec = calibrate(NoiseFamily::SymmetricPareto, 1.5, 1.0)?;
    let mut oracle = noisy_oracle(QuadraticBenchmark::new(d, 1.0)?, spec);
    let x0 = Vector::from_fn(d, |_| 1.0);
    let sched = Schedule::explicit(0.01, 0.05, InitGradient::Minibatch(1), 400)?;
    let bound = MvrBound { sigma1: 1.0, p: 1.5, q: 2.0, l_bar: 1.0 };
    Ok(vec![verify::check_mvr_recursion(&mut oracle, &x0, &sched, bound, 200, 2.0, seed)?])
}
