//! Log-log rate fits and quantile summaries.

use alloc::vec::Vec;

use crate::error::Error;
use crate::math;

/// Least-squares fit of `log(error) = intercept + slope * log(T)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(log T, log error)` pairs the fit was computed on.
    pub points: Vec<(f64, f64)>,
}

pub fn rate_fit(budgets: &[f64], errors: &[f64]) -> Result<RateFit, Error> {
    if budgets.len() != errors.len() {
        return Err(Error::DimensionMismatch { expected: budgets.len(), got: errors.len() });
    }
    if budgets.len() < 4 {
        return Err(Error::invalid("a rate fit needs at least 4 points"));
    }
    if budgets.iter().chain(errors).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid("rate fits need finite positive budgets and errors"));
    }
    let xs: Vec<f64> = budgets.iter().map(|v| math::ln(*v)).collect();
    let ys: Vec<f64> = errors.iter().map(|v| math::ln(*v)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("rate fits need at least two distinct budgets"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let points = xs.into_iter().zip(ys).collect();
    Ok(RateFit { slope, intercept, r_squared, points })
}

/// Empirical quantiles with linear interpolation between order statistics.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantileReport {
    pub n: usize,
    pub mean: f64,
    /// `(level, value)` pairs in the order requested.
    pub quantiles: Vec<(f64, f64)>,
}

impl QuantileReport {
    pub fn get(&self, level: f64) -> Option<f64> {
        self.quantiles.iter().find(|(l, _)| *l == level).map(|(_, v)| *v)
    }
}

pub const DEFAULT_LEVELS: [f64; 5] = [0.5, 0.9, 0.95, 0.99, 1.0];

pub fn quantile_report(values: &[f64], levels: &[f64]) -> Result<QuantileReport, Error> {
    if values.is_empty() {
        return Err(Error::invalid("quantiles of an empty sample"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("quantiles of a sample containing NaN"));
    }
    if levels.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(Error::invalid("quantile levels must lie in [0, 1]"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let quantiles = levels.iter().map(|l| (*l, quantile_sorted(&sorted, *l))).collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(QuantileReport { n: values.len(), mean, quantiles })
}

fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    let h = level * (sorted.len() - 1) as f64;
    let lo = math::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let ts: Vec<f64> = (8..15).map(|k| 2f64.powi(k)).collect();
        let es: Vec<f64> = ts.iter().map(|t| 3.0 * t.powf(-0.25)).collect();
        let f = rate_fit(&ts, &es).unwrap();
        assert!((f.slope + 0.25).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(f.points.len(), 7);
        let sixth: Vec<f64> = ts.iter().map(|t| t.powf(-1.0 / 6.0)).collect();
        assert!((rate_fit(&ts, &sixth).unwrap().slope + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(rate_fit(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(rate_fit(&[1.0, 2.0, 3.0, 4.0], &[1.0, 0.0, 2.0, 1.0]).is_err());
        assert!(rate_fit(&[2.0, 2.0, 2.0, 2.0], &[1.0, 3.0, 2.0, 1.0]).is_err());
    }

    #[test]
    fn quantiles_interpolate() {
        let q = quantile_report(&[4.0, 1.0, 3.0, 2.0, 5.0], &[0.0, 0.5, 0.95, 1.0]).unwrap();
        assert_eq!(q.get(0.0), Some(1.0));
        assert_eq!(q.get(0.5), Some(3.0));
        assert!((q.get(0.95).unwrap() - 4.8).abs() < 1e-12);
        assert_eq!(q.get(1.0), Some(5.0));
        assert_eq!(q.mean, 3.0);
        assert!(quantile_report(&[], &[0.5]).is_err());
    }
}
