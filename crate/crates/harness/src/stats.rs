//! Small summary statistics and the depth-sweep fit.

use serde::Serialize;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean from the unbiased sample variance; 0 for fewer than two samples.
pub fn std_err(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}

pub const KAPPA_MIN: f64 = 1e-3;
pub const KAPPA_MAX: f64 = 1e4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaturationFit {
    pub c_rand: f64,
    pub kappa: f64,
    /// Sum of squared residuals at the optimum.
    pub sse: f64,
    /// False when the optimum sits on a search bound, i.e. the fit diverged.
    pub converged: bool,
}

/// `c(d) = c_rand * (1 - exp(-d / kappa))`.
pub fn saturation_curve(c_rand: f64, kappa: f64, d: f64) -> f64 {
    c_rand * (1.0 - (-d / kappa).exp())
}

/// Least-squares `kappa` for [`saturation_curve`] with `c_rand` held fixed.
/// Golden-section search on `ln kappa`; the objective is unimodal in practice
/// for increasing data. Returns `None` for fewer than two points.
pub fn fit_saturation(depths: &[f64], costs: &[f64], c_rand: f64) -> Option<SaturationFit> {
    if depths.len() < 2 || depths.len() != costs.len() {
        return None;
    }
    let sse = |log_k: f64| {
        let k = log_k.exp();
        depths.iter().zip(costs).map(|(&d, &c)| (c - saturation_curve(c_rand, k, d)).powi(2)).sum::<f64>()
    };
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (KAPPA_MIN.ln(), KAPPA_MAX.ln());
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (sse(x1), sse(x2));
    for _ in 0..200 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = sse(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = sse(x2);
        }
    }
    let log_k = (a + b) / 2.0;
    let edge = 1e-6 * (KAPPA_MAX.ln() - KAPPA_MIN.ln());
    let converged = log_k - KAPPA_MIN.ln() > edge && KAPPA_MAX.ln() - log_k > edge;
    Some(SaturationFit { c_rand, kappa: log_k.exp(), sse: sse(log_k), converged })
}
