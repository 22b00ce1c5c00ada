use htopt_core::instances::QuadraticBenchmark;
use htopt_core::noise::{
    calibrate, calibrate_with, estimate_pth_moment, exact_pth_moment, gaussian_abs_moment, sample_noise, Geometry,
    NoiseFamily, NoiseParams, NoiseSpec,
};
use htopt_core::oracle::noisy_oracle;
use htopt_core::{Objective, RngStream, StochasticOracle, Vector};

const N: usize = 1_000_000;

fn draws(spec: &NoiseSpec, d: usize, n: usize, seed: u64) -> Vec<Vector> {
    let mut rng = RngStream::new(seed);
    (0..n).map(|_| sample_noise(spec, d, &mut rng)).collect()
}

fn mean(v: &[Vector], d: usize) -> Vector {
    let mut m = Vector::zeros(d);
    for x in v {
        m.axpy(1.0 / v.len() as f64, x);
    }
    m
}

#[test]
fn gaussian_calibration_examples() {
    let s = calibrate(NoiseFamily::Gaussian, 2.0, 1.0).unwrap();
    assert!(matches!(s.params, NoiseParams::Gaussian { sigma } if (sigma - 1.0).abs() < 1e-14));
    // p = 1 lies outside the tail-index range, so check the closed form directly
    let sigma = (std::f64::consts::PI / 2.0).sqrt();
    assert!((sigma * gaussian_abs_moment(1.0) - 1.0).abs() < 1e-14);
    assert!(calibrate(NoiseFamily::Gaussian, 1.0, 1.0).is_err());
    assert!(calibrate(NoiseFamily::Gaussian, 2.0, 0.0).unwrap().is_zero());
}

#[test]
fn pareto_scale_solves_its_equation() {
    let s = calibrate(NoiseFamily::SymmetricPareto, 1.5, 1.0).unwrap();
    let NoiseParams::Pareto { shape, scale } = s.params else { panic!("{:?}", s.params) };
    assert!((shape - 1.7).abs() < 1e-15);
    // a z0^p / (a - p) = 1
    assert!((shape * scale.powf(1.5) / (shape - 1.5) - 1.0).abs() < 1e-12);
    assert!((scale - 0.2401).abs() < 1e-4);
}

#[test]
fn gaussian_sample_mean_and_moment() {
    let s = calibrate(NoiseFamily::Gaussian, 2.0, 1.0).unwrap();
    let z = draws(&s, 1, N, 21);
    let m = mean(&z, 1)[0];
    assert!(m.abs() <= 0.004, "{m}");
    let mut rng = RngStream::new(22);
    let est = estimate_pth_moment(&s, 1, 2.0, N, &mut rng).unwrap();
    assert!((est - 1.0).abs() <= 0.01, "{est}");
    assert_eq!(estimate_pth_moment(&NoiseSpec::zero(), 4, 2.0, 1000, &mut rng).unwrap(), 0.0);
    assert!(estimate_pth_moment(&s, 1, 2.0, 999, &mut rng).is_err());
}

#[test]
fn unbiased_gaussian_and_two_point() {
    let d = 3;
    for spec in [
        calibrate(NoiseFamily::Gaussian, 1.5, 2.0).unwrap(),
        calibrate(NoiseFamily::TwoPointBernoulli { r: 0.1 }, 1.5, 2.0).unwrap(),
    ] {
        let z = draws(&spec, d, N, 23);
        let m = mean(&z, d);
        let second = z.iter().map(|v| v.dot(v)).sum::<f64>() / N as f64;
        let bound = 4.0 * second.sqrt() / (N as f64).sqrt();
        assert!(m.norm() <= bound, "{:?}: {} > {bound}", spec.family, m.norm());
    }
}

#[test]
fn unbiased_pareto_median_of_means() {
    let d = 3;
    for p in [1.3, 1.6, 2.0] {
        let spec = calibrate(NoiseFamily::SymmetricPareto, p, 1.0).unwrap();
        let z = draws(&spec, d, N, 24);
        let block = N / 20;
        for i in 0..d {
            let mut means: Vec<f64> =
                z.chunks(block).map(|c| c.iter().map(|v| v[i]).sum::<f64>() / c.len() as f64).collect();
            means.sort_by(f64::total_cmp);
            let mom = 0.5 * (means[9] + means[10]);
            assert!(mom.abs() <= 0.05 * spec.sigma1, "p={p} coord {i}: {mom}");
        }
    }
}

#[test]
fn exact_moments_where_available() {
    let d = 4;
    let g = calibrate(NoiseFamily::Gaussian, 1.7, 1.3).unwrap();
    assert!((exact_pth_moment(&g, d, 1.7).unwrap() - 1.3f64.powf(1.7)).abs() < 1e-10);
    let p = calibrate(NoiseFamily::SymmetricPareto, 1.4, 2.0).unwrap();
    assert!((exact_pth_moment(&p, d, 1.4).unwrap() - 2.0f64.powf(1.4)).abs() < 1e-10);
    let t = calibrate(NoiseFamily::TwoPointBernoulli { r: 0.2 }, 1.4, 2.0).unwrap();
    assert!((exact_pth_moment(&t, d, 1.4).unwrap() - 2.0f64.powf(1.4)).abs() < 1e-12);
    let cw = calibrate_with(NoiseFamily::SymmetricPareto, 1.4, 2.0, Geometry::Coordinatewise).unwrap();
    let mut rng = RngStream::new(25);
    assert!(estimate_pth_moment(&cw, d, 1.4, 200_000, &mut rng).unwrap() <= 1.1 * 2.0f64.powf(1.4));
}

#[test]
fn two_point_noise_is_a_spike() {
    let spec = calibrate(NoiseFamily::TwoPointBernoulli { r: 0.25 }, 1.5, 1.0).unwrap();
    let z = draws(&spec, 5, 20_000, 26);
    let mut values: Vec<f64> = z.iter().map(|v| v[0]).collect();
    assert!(z.iter().all(|v| v.iter().skip(1).all(|c| *c == 0.0)));
    values.sort_by(f64::total_cmp);
    values.dedup();
    assert_eq!(values.len(), 2);
    assert!(values[0] < 0.0 && values[1] > 0.0);
    let frac = z.iter().filter(|v| v[0] > 0.0).count() as f64 / z.len() as f64;
    assert!((frac - 0.25).abs() < 3.0 * (0.25f64 * 0.75 / 20_000.0).sqrt() + 1e-3);
}

#[test]
fn additive_oracle_contracts() {
    let d = 3;
    let q = QuadraticBenchmark::new(d, 2.0).unwrap();
    let x = [1.0, -0.5, 0.25];
    let y = [0.1, 0.2, 0.3];
    let mut exact = noisy_oracle(q, NoiseSpec::zero());
    assert_eq!(exact.gradient(&x, &mut RngStream::new(0)).unwrap(), q.gradient(&x));

    let spec = calibrate(NoiseFamily::SymmetricPareto, 1.5, 3.0).unwrap();
    let mut o = noisy_oracle(q, spec);
    let mut rng = RngStream::new(27);
    for _ in 0..100 {
        let s = o.gradient_pair(&x, &y, &mut rng).unwrap();
        let diff = s.grad.sub(&s.grad_prev.unwrap());
        let want = q.gradient(&x).sub(&q.gradient(&y));
        for i in 0..d {
            assert!((diff[i] - want[i]).abs() < 1e-9);
        }
    }

    let g = calibrate(NoiseFamily::Gaussian, 2.0, 1.0).unwrap();
    let mut o = noisy_oracle(q, g);
    let n = 100_000;
    let mut m = Vector::zeros(d);
    for _ in 0..n {
        m.axpy(1.0 / n as f64, &o.gradient(&x, &mut rng).unwrap());
    }
    let target = q.gradient(&x);
    for i in 0..d {
        assert!((m[i] - target[i]).abs() <= 3.0 / (n as f64).sqrt());
    }
}
