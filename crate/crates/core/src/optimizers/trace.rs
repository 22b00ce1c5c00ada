use alloc::vec::Vec;

use crate::instances::prog;
use crate::oracle::Objective;
use crate::vector::{norm, Vector};

/// Per-iterate record of one run, measured with the exact objective.
///
/// `grad_norms`, `f_values`, `progress` and `samples_used` have one entry per
/// iterate `x_0, ..., x_T`. `estimator_errors[t] = ||g_t - grad F(x_t)||` for
/// `t < T`.
#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunTrace {
    pub grad_norms: Vec<f64>,
    pub f_values: Vec<f64>,
    pub progress: Vec<usize>,
    pub samples_used: Vec<u64>,
    pub estimator_errors: Vec<f64>,
    pub final_iterate: Vector,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.grad_norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grad_norms.is_empty()
    }

    /// Iteration budget `T`.
    pub fn iterations(&self) -> usize {
        self.len().saturating_sub(1)
    }

    /// `(1/T) sum_{t<T} ||grad F(x_t)||`.
    pub fn average_grad_norm(&self) -> f64 {
        let t = self.iterations().max(1);
        self.grad_norms[..t].iter().sum::<f64>() / t as f64
    }

    /// `(1/T) sum_{t<T} ||grad F(x_t)||^2`, the expected squared gradient
    /// norm at an iterate drawn uniformly from `x_0, ..., x_{T-1}`.
    pub fn average_sq_grad_norm(&self) -> f64 {
        let t = self.iterations().max(1);
        self.grad_norms[..t].iter().map(|g| g * g).sum::<f64>() / t as f64
    }

    pub fn final_grad_norm(&self) -> f64 {
        *self.grad_norms.last().unwrap_or(&f64::NAN)
    }

    pub fn total_samples(&self) -> u64 {
        *self.samples_used.last().unwrap_or(&0)
    }

    pub fn max_progress(&self) -> usize {
        self.progress.iter().copied().max().unwrap_or(0)
    }
}

pub(crate) struct Recorder {
    trace: RunTrace,
}

impl Recorder {
    pub(crate) fn new(t: usize) -> Self {
        let trace = RunTrace {
            grad_norms: Vec::with_capacity(t + 1),
            f_values: Vec::with_capacity(t + 1),
            progress: Vec::with_capacity(t + 1),
            samples_used: Vec::with_capacity(t + 1),
            estimator_errors: Vec::with_capacity(t),
            final_iterate: Vector::default(),
        };
        Recorder { trace }
    }

    /// Logs iterate `x` and returns the exact gradient there.
    pub(crate) fn iterate(&mut self, objective: &dyn Objective, x: &[f64], samples: u64) -> Vector {
        let grad = objective.gradient(x);
        self.trace.grad_norms.push(grad.norm());
        self.trace.f_values.push(objective.value(x));
        self.trace.progress.push(prog(x, 0.0).0);
        self.trace.samples_used.push(samples);
        grad
    }

    pub(crate) fn estimate(&mut self, g: &[f64], exact: &[f64]) {
        let diff: Vec<f64> = g.iter().zip(exact).map(|(a, b)| a - b).collect();
        self.trace.estimator_errors.push(norm(&diff));
    }

    pub(crate) fn finish(mut self, x: Vector) -> RunTrace {
        self.trace.final_iterate = x;
        self.trace
    }
}
