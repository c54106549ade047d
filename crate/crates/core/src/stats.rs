//! Estimators and goodness-of-fit statistics used by the experiments.

use serde::{Deserialize, Serialize};

use crate::special::gamma_q;

/// Weighted least-squares line `y = intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    /// Weighted residual sum of squares divided by `n − 2` (NaN when n = 2).
    pub reduced_chi2: f64,
}

/// Fits a line by least squares.
///
/// Without weights the standard errors come from the residual scatter. With
/// weights `wᵢ = 1/σᵢ²` they are the known-variance errors, inflated by
/// `√χ²_red` when the scatter exceeds what the weights imply.
///
/// # Panics
/// If fewer than two points are given or the lengths differ.
pub fn linear_fit(xs: &[f64], ys: &[f64], weights: Option<&[f64]>) -> LinearFit {
    let n = xs.len();
    assert!(n >= 2 && ys.len() == n, "linear_fit needs two or more paired points");
    if let Some(w) = weights {
        assert_eq!(w.len(), n, "one weight per point");
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let sw: f64 = (0..n).map(w).sum();
    let mx = (0..n).map(|i| w(i) * xs[i]).sum::<f64>() / sw;
    let my = (0..n).map(|i| w(i) * ys[i]).sum::<f64>() / sw;
    let sxx: f64 = (0..n).map(|i| w(i) * (xs[i] - mx).powi(2)).sum();
    let sxy: f64 = (0..n).map(|i| w(i) * (xs[i] - mx) * (ys[i] - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = (0..n)
        .map(|i| w(i) * (ys[i] - intercept - slope * xs[i]).powi(2))
        .sum();
    let reduced_chi2 = if n > 2 { rss / (n - 2) as f64 } else { f64::NAN };
    let scale = match (weights, n > 2) {
        (None, true) => reduced_chi2,
        (None, false) => 0.0,
        (Some(_), true) => reduced_chi2.max(1.0),
        (Some(_), false) => 1.0,
    };
    LinearFit {
        slope,
        intercept,
        slope_stderr: (scale / sxx).sqrt(),
        intercept_stderr: (scale * (1.0 / sw + mx * mx / sxx)).sqrt(),
        reduced_chi2,
    }
}

/// Pairwise (cascade) summation; error grows like log n rather than n.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                stderr: f64::NAN,
                samples: 0,
            };
        }
        let mean = pairwise_sum(xs) / n as f64;
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
        let var = if n > 1 {
            pairwise_sum(&dev) / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            stderr: (var / n as f64).sqrt(),
            samples: n,
        }
    }
}

/// Proportion estimate from exact integer counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinomialEstimate {
    pub successes: u64,
    pub trials: u64,
}

impl BinomialEstimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        debug_assert!(successes <= trials);
        Self { successes, trials }
    }

    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.successes as f64 / self.trials as f64
    }

    /// Binomial standard error √(p(1 − p)/n).
    pub fn stderr(&self) -> f64 {
        let p = self.estimate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Standard error that does not vanish at p ∈ {0, 1}: uses p̃ = (k + 1)/(n + 2).
    pub fn stderr_floor(&self) -> f64 {
        let p = (self.successes as f64 + 1.0) / (self.trials as f64 + 2.0);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// One-sample Kolmogorov–Smirnov distance between the empirical law of
/// `samples` and the continuous CDF `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value of a KS distance `d` with effective sample size `n`
/// (use `n·m/(n + m)` for two samples), with Stephens' small-sample correction.
pub fn ks_pvalue(d: f64, n: f64) -> f64 {
    let sn = n.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Survival function of the χ² distribution with `dof` degrees of freedom.
pub fn chi_square_sf(stat: f64, dof: f64) -> f64 {
    gamma_q(0.5 * dof, 0.5 * stat).clamp(0.0, 1.0)
}

/// Pearson χ² test of observed counts against expected counts; returns
/// `(statistic, p-value)` with `len − 1` degrees of freedom.
pub fn chi_square_test(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = (observed.len().max(2) - 1) as f64;
    (stat, chi_square_sf(stat, dof))
}
