use htopt_core::instances::QuadraticBenchmark;
use htopt_core::noise::{calibrate, NoiseFamily};
use htopt_core::optimizers::{Algorithm, ProblemConstants, ScheduleRule};
use htopt_core::oracle::noisy_oracle;
use htopt_core::RngStream;

fn main() -> Result<(), htopt_core::Error> {
    let noise = calibrate(NoiseFamily::SymmetricPareto, 1.5, 2.0)?;
    let mut oracle = noisy_oracle(QuadraticBenchmark::new(10, 1.0)?, noise);
    let x0 = vec![0.3; 10];

    let constants = ProblemConstants { l_bar: Some(1.0), ..ProblemConstants::new(0.45, 2.0, 1.5) };
    let schedule = ScheduleRule::MvrSingleSample.build(&constants, 4096, None)?;

    let trace = Algorithm::NsgdMvr.run(&mut oracle, &x0, &schedule, &mut RngStream::new(7))?;
    println!(
        "gamma {:.3e}  alpha {:.3e}  avg |grad| {:.4}  samples {}",
        schedule.gamma,
        schedule.alpha,
        trace.average_grad_norm(),
        trace.total_samples()
    );
    Ok(())
}
