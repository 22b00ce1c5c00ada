use crate::oracle::Objective;
use crate::vector::Vector;

/// `F(x) = (L1 / 2) ||x||^2`, minimized at the origin with value 0.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadraticBenchmark {
    pub d: usize,
    pub l1: f64,
}

impl QuadraticBenchmark {
    pub fn new(d: usize, l1: f64) -> Result<Self, crate::Error> {
        if d == 0 || !(l1 > 0.0) || !l1.is_finite() {
            return Err(crate::Error::invalid("quadratic needs d >= 1 and finite L1 > 0"));
        }
        Ok(QuadraticBenchmark { d, l1 })
    }
}

impl Objective for QuadraticBenchmark {
    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.l1 * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        Vector::from_fn(x.len(), |i| self.l1 * x[i])
    }

    fn hess_vec(&self, _x: &[f64], v: &[f64]) -> Vector {
        Vector::from_fn(v.len(), |i| self.l1 * v[i])
    }
}
