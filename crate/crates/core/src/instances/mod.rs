//! Test problems: the zero-chain hard instance, the two-point Bernoulli
//! quadratic, and a plain quadratic benchmark.

mod hard;
mod quadratic;
mod two_point;

pub use hard::{phi, phi_d1, phi_d2, psi, psi_d1, psi_d2, GradientEstimator, HardInstance, SmoothIndicator};
pub use quadratic::QuadraticBenchmark;
pub use two_point::{Sign, TwoPointInstance};

/// `prog_threshold(x)`: the largest 1-based index with `|x_i| > threshold`,
/// or 0 if there is none.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProgressIndex(pub usize);

pub fn prog(x: &[f64], threshold: f64) -> ProgressIndex {
    ProgressIndex(x.iter().rposition(|v| v.abs() > threshold).map_or(0, |i| i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prog_examples() {
        assert_eq!(prog(&[0.0, 0.0, 0.0], 0.0), ProgressIndex(0));
        assert_eq!(prog(&[1.0, 0.3, 0.7, 0.0], 0.5), ProgressIndex(3));
    }

    proptest! {
        #[test]
        fn prog_is_monotone_in_threshold(x in prop::collection::vec(-2.0f64..2.0, 1..16), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(prog(&x, lo) >= prog(&x, hi));
        }
    }
}
