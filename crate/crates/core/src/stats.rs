//! Estimators and goodness-of-fit statistics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Asymptotic Kolmogorov constant `c(α)` at `α = 0.001`.
pub const KS_C_ALPHA_001: f64 = 1.949;

fn sort_floats(xs: &mut [f64]) {
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
}

/// Empirical distribution function of a sample. `+∞` entries are allowed and
/// count towards the sample size without ever being `≤ x` for finite `x`.
#[derive(Clone, Debug)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut sorted = sample.to_vec();
        sort_floats(&mut sorted);
        Ok(Ecdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Right-continuous step function: fraction of the sample `≤ x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// `sup_{x ∈ [lo, hi]} |ECDF(x) - cdf(x)|` for a continuous `cdf`.
    ///
    /// The supremum is attained at an endpoint or approached at a jump, so it
    /// suffices to compare both one-sided limits at every jump inside the
    /// window.
    pub fn sup_distance_on<F: Fn(f64) -> f64>(&self, cdf: F, lo: f64, hi: f64) -> f64 {
        let n = self.sorted.len() as f64;
        let mut d = math::abs(self.eval(lo) - cdf(lo)).max(math::abs(self.eval(hi) - cdf(hi)));
        let start = self.sorted.partition_point(|&v| v < lo);
        let mut i = start;
        while i < self.sorted.len() && self.sorted[i] <= hi {
            let x = self.sorted[i];
            let below = i as f64 / n;
            let mut j = i;
            while j < self.sorted.len() && self.sorted[j] == x {
                j += 1;
            }
            let at = j as f64 / n;
            let f = cdf(x);
            d = d.max(math::abs(at - f)).max(math::abs(below - f));
            i = j;
        }
        d
    }
}

/// One-sample Kolmogorov-Smirnov statistic `sup_x |ECDF(x) - cdf(x)|`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = sample.to_vec();
    sort_floats(&mut sorted);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Two-sample Kolmogorov-Smirnov statistic: sup-distance between the ECDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    sort_floats(&mut xs);
    sort_floats(&mut ys);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] == x {
            i += 1;
        }
        while j < ys.len() && ys[j] == x {
            j += 1;
        }
        d = d.max(math::abs(i as f64 / na - j as f64 / nb));
    }
    Ok(d)
}

/// Critical value `c(α) · sqrt((m + n) / (m n))` of the two-sample test.
pub fn ks_two_sample_critical(c_alpha: f64, m: usize, n: usize) -> f64 {
    let (m, n) = (m as f64, n as f64);
    c_alpha * math::sqrt((m + n) / (m * n))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleMoments {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub se_mean: f64,
    /// Large-sample standard error of the variance, `sqrt((m4 - s^4) / n)`.
    pub se_variance: f64,
    pub mean_ci: (f64, f64),
    pub variance_ci: (f64, f64),
}

pub fn moments_ci(sample: &[f64]) -> Result<SampleMoments> {
    let count = sample.len();
    if count < 2 {
        return Err(Error::TooFewObservations { need: 2, got: count });
    }
    let n = count as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in sample {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    let variance = m2 / (n - 1.0);
    let biased = m2 / n;
    let m4 = m4 / n;
    let se_mean = math::sqrt(variance / n);
    let se_variance = math::sqrt(((m4 - biased * biased) / n).max(0.0));
    Ok(SampleMoments {
        count,
        mean,
        variance,
        se_mean,
        se_variance,
        mean_ci: (mean - Z_95 * se_mean, mean + Z_95 * se_mean),
        variance_ci: (variance - Z_95 * se_variance, variance + Z_95 * se_variance),
    })
}

/// Sample proportion with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportion {
    pub successes: usize,
    pub trials: usize,
}

impl Proportion {
    pub fn new(successes: usize, trials: usize) -> Self {
        Proportion { successes, trials }
    }

    pub fn value(&self) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.successes as f64 / self.trials as f64
    }

    pub fn se(&self) -> f64 {
        let p = self.value();
        math::sqrt(p * (1.0 - p) / self.trials as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrEstimate {
    pub correlation: f64,
    pub count: usize,
    /// Fisher-z 95% interval.
    pub ci: (f64, f64),
}

impl CorrEstimate {
    pub fn covers(&self, value: f64) -> bool {
        self.ci.0 <= value && value <= self.ci.1
    }
}

/// Pearson correlation with a Fisher-transform 95% confidence interval.
pub fn pearson_corr_ci(pairs: &[(f64, f64)]) -> Result<CorrEstimate> {
    let count = pairs.len();
    if count < 30 {
        return Err(Error::TooFewObservations { need: 30, got: count });
    }
    let n = count as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    // sqrt(sxx * syy) rather than sqrt(sxx) * sqrt(syy): identical coordinates
    // then give exactly 1.
    let r = (sxy / math::sqrt(sxx * syy)).clamp(-1.0, 1.0);
    let ci = if r.abs() == 1.0 {
        (r, r)
    } else {
        let z = math::atanh(r);
        let half = Z_95 / math::sqrt(n - 3.0);
        (math::tanh(z - half), math::tanh(z + half))
    };
    Ok(CorrEstimate {
        correlation: r,
        count,
        ci,
    })
}

/// Pearson chi-square statistic of observed counts against equal expected
/// counts.
pub fn chi_square_uniform(counts: &[u64]) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::EmptySample);
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    Ok(counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn uniform_cdf(x: f64) -> f64 {
        x.clamp(0.0, 1.0)
    }

    #[test]
    fn ks_single_point() {
        assert_eq!(ks_one_sample(&[0.5], uniform_cdf).unwrap(), 0.5);
    }

    #[test]
    fn ks_empty() {
        assert_eq!(ks_one_sample(&[], uniform_cdf), Err(Error::EmptySample));
        assert_eq!(ks_two_sample(&[], &[1.0]), Err(Error::EmptySample));
    }

    #[test]
    fn ks_shift_grows() {
        let base: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let mut last = ks_one_sample(&base, uniform_cdf).unwrap();
        for shift in [0.05, 0.1, 0.2, 0.4] {
            let shifted: Vec<f64> = base.iter().map(|x| x + shift).collect();
            let d = ks_one_sample(&shifted, uniform_cdf).unwrap();
            assert!(d > last);
            last = d;
        }
    }

    #[test]
    fn ks_two_sample_extremes() {
        let a = [0.3, 0.1, 0.7];
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&[0.0], &[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn two_sample_critical_value() {
        let c = ks_two_sample_critical(KS_C_ALPHA_001, 10_000, 10_000);
        assert!((c - 0.027_563).abs() < 1e-5);
    }

    #[test]
    fn ecdf_right_continuous_with_infinity() {
        let e = Ecdf::new(&[1.0, f64::INFINITY, 2.0, 2.0]).unwrap();
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(1.0), 0.25);
        assert_eq!(e.eval(2.0), 0.75);
        assert_eq!(e.eval(1e300), 0.75);
        assert_eq!(e.eval(f64::INFINITY), 1.0);
    }

    #[test]
    fn sup_distance_window() {
        let e = Ecdf::new(&[0.5]).unwrap();
        assert!((e.sup_distance_on(uniform_cdf, 0.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((e.sup_distance_on(uniform_cdf, 0.0, 0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn moments_small() {
        let m = moments_ci(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((m.mean, m.variance), (1.0, 0.0));
        let m = moments_ci(&[0.0, 2.0]).unwrap();
        assert_eq!((m.mean, m.variance), (1.0, 2.0));
        assert!(moments_ci(&[1.0]).is_err());
    }

    #[test]
    fn correlation_extremes() {
        let xs: Vec<(f64, f64)> = (0..40).map(|i| (i as f64, i as f64)).collect();
        let c = pearson_corr_ci(&xs).unwrap();
        assert_eq!(c.correlation, 1.0);
        assert!(c.covers(1.0));
        let ys: Vec<(f64, f64)> = (0..40).map(|i| (i as f64, -(i as f64))).collect();
        assert_eq!(pearson_corr_ci(&ys).unwrap().correlation, -1.0);
        assert_eq!(
            pearson_corr_ci(&xs[..10]),
            Err(Error::TooFewObservations { need: 30, got: 10 })
        );
        let flat = vec![(1.0, 2.0); 40];
        assert_eq!(pearson_corr_ci(&flat), Err(Error::ZeroVariance));
    }

    #[test]
    fn correlation_of_sampled_identity_is_exactly_one() {
        let mut s = crate::rng::derive_stream(11, 0);
        let xs: Vec<(f64, f64)> = (0..500)
            .map(|_| {
                let x = s.standard_exp() * 7.3;
                (x, x)
            })
            .collect();
        assert_eq!(pearson_corr_ci(&xs).unwrap().correlation, 1.0);
    }

    #[test]
    fn chi_square_balanced() {
        assert_eq!(chi_square_uniform(&[5, 5, 5]).unwrap(), 0.0);
        assert!((chi_square_uniform(&[0, 10]).unwrap() - 10.0).abs() < 1e-12);
    }
}
