//! Exact samplers for the greedy cost process, closed-form moments and the
//! limit laws.
//!
//! On `K_{n,n}` the k-th selected cost is `Y_k = Y_{k-1} + X_k` with
//! `X_k ~ Exp((n-k+1)^2)`, and the total is a sum of independent `Exp(k)`,
//! `k = 1..n`. On `K_n` the increments are `Exp(C(r, 2))` with
//! `r = n - 2k + 2` open vertices, and the total is a sum of independent
//! `Exp(2j - 1)` (`Exp(2j + 1)` when `n` is odd), `j = 1..⌊n/2⌋`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::math;
use crate::profile::CostProfile;
use crate::rng::RngStream;
use crate::special::{self, EULER_GAMMA};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Bipartite(usize),
    Complete { n: usize, allow_odd: bool },
}

impl GraphKind {
    pub fn complete(n: usize) -> Self {
        GraphKind::Complete { n, allow_odd: false }
    }

    pub fn n(&self) -> usize {
        match *self {
            GraphKind::Bipartite(n) | GraphKind::Complete { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphKind::Bipartite(0) | GraphKind::Complete { n: 0, .. } => Err(Error::EmptyGraph),
            GraphKind::Complete { n, allow_odd: false } if n % 2 == 1 => Err(Error::OddComplete(n)),
            _ => Ok(()),
        }
    }

    /// Number of matching edges.
    pub fn matching_size(&self) -> usize {
        match *self {
            GraphKind::Bipartite(n) => n,
            GraphKind::Complete { n, .. } => n / 2,
        }
    }

    /// Rate of the `j`-th term of the total-cost representation.
    fn total_rate(&self, j: usize) -> f64 {
        match *self {
            GraphKind::Bipartite(_) => j as f64,
            GraphKind::Complete { n, .. } => (2 * j - 1 + 2 * (n % 2)) as f64,
        }
    }

    /// Rate of the `k`-th profile increment.
    fn increment_rate(&self, k: usize) -> f64 {
        match *self {
            GraphKind::Bipartite(n) => {
                let open = (n - k + 1) as f64;
                open * open
            }
            GraphKind::Complete { n, .. } => {
                let r = (n - 2 * k + 2) as f64;
                r * (r - 1.0) / 2.0
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub second_moment: Option<f64>,
}

impl MomentSummary {
    fn new(mean: f64, variance: f64) -> Self {
        MomentSummary {
            mean,
            variance,
            second_moment: Some(variance + mean * mean),
        }
    }
}

/// Mean and variance of the total cost.
pub fn exact_total_moments(kind: GraphKind) -> Result<MomentSummary> {
    kind.validate()?;
    let m = kind.matching_size();
    let (mut mean, mut var) = (0.0, 0.0);
    for j in (1..=m).rev() {
        let r = kind.total_rate(j);
        mean += 1.0 / r;
        var += 1.0 / (r * r);
    }
    Ok(MomentSummary::new(mean, var))
}

/// One draw of the total cost in `O(n)`.
pub fn sample_total_cost(kind: GraphKind, rng: &mut RngStream) -> Result<f64> {
    kind.validate()?;
    let mut total = 0.0;
    for j in 1..=kind.matching_size() {
        total += rng.exp_unchecked(kind.total_rate(j));
    }
    Ok(total)
}

/// One draw of `Y_1 ≤ … ≤ Y_m`.
pub fn sample_cost_profile(kind: GraphKind, rng: &mut RngStream) -> Result<CostProfile> {
    kind.validate()?;
    let m = kind.matching_size();
    let mut out = Vec::with_capacity(m);
    let mut y = 0.0;
    for k in 1..=m {
        y += rng.exp_unchecked(kind.increment_rate(k));
        out.push(y);
    }
    Ok(CostProfile::new(out))
}

/// A matching drawn from the joint law of the greedy matching: at step `k`
/// the new pair is uniform among open pairs, independent of the costs.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectSample {
    /// Pairs in selection order, using the vertex numbering of
    /// [`crate::graph::WeightedGraph`].
    pub pairs: Vec<(VertexId, VertexId)>,
    pub profile: CostProfile,
    pub total: f64,
}

pub fn direct_matching_sample(kind: GraphKind, rng: &mut RngStream) -> Result<DirectSample> {
    kind.validate()?;
    let n = kind.n();
    let m = kind.matching_size();
    let mut pairs = Vec::with_capacity(m);
    let mut profile = Vec::with_capacity(m);
    let mut y = 0.0;
    match kind {
        GraphKind::Bipartite(_) => {
            let mut left: Vec<VertexId> = (0..n).collect();
            let mut right: Vec<VertexId> = (n..2 * n).collect();
            for k in 1..=m {
                let open = n - k + 1;
                let a = left.swap_remove(rng.below(open));
                let b = right.swap_remove(rng.below(open));
                y += rng.exp_unchecked(kind.increment_rate(k));
                pairs.push((a, b));
                profile.push(y);
            }
        }
        GraphKind::Complete { .. } => {
            let mut open: Vec<VertexId> = (0..n).collect();
            for k in 1..=m {
                let a = open.swap_remove(rng.below(open.len()));
                let b = open.swap_remove(rng.below(open.len()));
                y += rng.exp_unchecked(kind.increment_rate(k));
                pairs.push((a.min(b), a.max(b)));
                profile.push(y);
            }
        }
    }
    let profile = CostProfile::new(profile);
    let total = profile.total();
    Ok(DirectSample { pairs, profile, total })
}

/// `n · Y_K` with `K = ⌈U n⌉`: `n` times the cost of a uniformly chosen edge
/// of the greedy matching on `K_{n,n}`.
pub fn typical_cost_sample(n: usize, rng: &mut RngStream) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let kind = GraphKind::Bipartite(n);
    let k = (math::ceil(rng.uniform() * n as f64) as usize).clamp(1, n);
    let mut y = 0.0;
    for i in 1..=k {
        y += rng.exp_unchecked(kind.increment_rate(i));
    }
    Ok(n as f64 * y)
}

/// Exact moments of `Y_{n-ℓ}` on `K_{n,n}` and the bracketing bounds
/// `1/(ℓ+1) - 1/n ≤ mean ≤ 1/ℓ`, `variance ≤ 1/(3ℓ³)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderStatMoments {
    pub moments: MomentSummary,
    pub mean_lower: f64,
    /// `None` at `ℓ = 0`.
    pub mean_upper: Option<f64>,
    pub variance_upper: Option<f64>,
}

pub fn order_stat_moments(n: usize, ell: usize) -> Result<OrderStatMoments> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if ell >= n {
        return Err(Error::OutOfRange { what: "order statistic offset", value: ell as f64 });
    }
    let (lo, hi) = (ell as u64 + 1, n as u64);
    let mean = special::sum_inverse_powers(lo, hi, 2);
    let variance = special::sum_inverse_powers(lo, hi, 4);
    let l = ell as f64;
    Ok(OrderStatMoments {
        moments: MomentSummary::new(mean, variance),
        mean_lower: 1.0 / (l + 1.0) - 1.0 / n as f64,
        mean_upper: (ell > 0).then(|| 1.0 / l),
        variance_upper: (ell > 0).then(|| 1.0 / (3.0 * l * l * l)),
    })
}

/// Moments of the bulk `W_m^- = Σ_{k>m} Z_k` and the tail `W_m^+ = Σ_{k≤m} Z_k`
/// of the total-cost representation on `K_{n,n}`.
pub fn bulk_tail_moments(n: usize, m: usize) -> Result<(MomentSummary, MomentSummary)> {
    if m == 0 || m > n {
        return Err(Error::OutOfRange { what: "split point", value: m as f64 });
    }
    let (n, m) = (n as u64, m as u64);
    let bulk = MomentSummary::new(
        special::sum_inverse_powers(m + 1, n, 1),
        special::sum_inverse_powers(m + 1, n, 2),
    );
    let tail = MomentSummary::new(
        special::sum_inverse_powers(1, m, 1),
        special::sum_inverse_powers(1, m, 2),
    );
    Ok((bulk, tail))
}

/// Density `1/(1+x)^2` of the limiting typical cost.
pub fn f_w(x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    1.0 / ((1.0 + x) * (1.0 + x))
}

/// Distribution function `x/(1+x)`; `F_W(∞) = 1`.
pub fn cdf_w(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x == f64::INFINITY {
        1.0
    } else {
        x / (1.0 + x)
    }
}

/// Inverse of [`cdf_w`], `u/(1-u)`.
pub fn quantile_w(u: f64) -> f64 {
    u / (1.0 - u)
}

pub fn gumbel_cdf(x: f64, location: f64, scale: f64) -> f64 {
    math::exp(-math::exp(-(x - location) / scale))
}

fn check_mgf_argument(t: f64) -> Result<()> {
    if !(t < 1.0) {
        return Err(Error::OutOfRange { what: "MGF argument", value: t });
    }
    Ok(())
}

/// Limit of `E[e^{t(C_n - E C_n)}]` on `K_n`:
/// `Γ(1-t)/Γ(1-t/2) · e^{-γt/2}`, for `t < 1`.
pub fn limit_mgf_complete(t: f64) -> Result<f64> {
    check_mgf_argument(t)?;
    Ok(math::exp(
        math::ln_gamma(1.0 - t) - math::ln_gamma(1.0 - t / 2.0) - EULER_GAMMA * t / 2.0,
    ))
}

/// Exact `E[e^{t(C_n - E C_n)}]` at finite even `n`:
/// `Π_j (2j-1)/(2j-1-t) · e^{-t E C_n}`.
pub fn finite_mgf_complete(n: usize, t: f64) -> Result<f64> {
    check_mgf_argument(t)?;
    let kind = GraphKind::complete(n);
    let mean = exact_total_moments(kind)?.mean;
    let mut log = -t * mean;
    for j in 1..=kind.matching_size() {
        let r = kind.total_rate(j);
        log += math::ln(r / (r - t));
    }
    Ok(math::exp(log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    #[test]
    fn total_rates() {
        let even = GraphKind::complete(6);
        assert_eq!((1..=3).map(|j| even.total_rate(j)).collect::<Vec<_>>(), vec![1.0, 3.0, 5.0]);
        let odd = GraphKind::Complete { n: 7, allow_odd: true };
        assert_eq!((1..=3).map(|j| odd.total_rate(j)).collect::<Vec<_>>(), vec![3.0, 5.0, 7.0]);
        assert_eq!(odd.increment_rate(3), 3.0);
    }

    #[test]
    fn small_moments() {
        let b = exact_total_moments(GraphKind::Bipartite(3)).unwrap();
        assert!((b.mean - 11.0 / 6.0).abs() < 1e-15);
        assert!((b.variance - (1.0 + 0.25 + 1.0 / 9.0)).abs() < 1e-15);
        let c = exact_total_moments(GraphKind::complete(4)).unwrap();
        assert!((c.mean - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(exact_total_moments(GraphKind::complete(5)), Err(Error::OddComplete(5)));
    }

    #[test]
    fn variance_limits() {
        let b = exact_total_moments(GraphKind::Bipartite(1_000_000)).unwrap();
        assert!((b.variance - core::f64::consts::PI.powi(2) / 6.0).abs() < 1e-5);
        let c = exact_total_moments(GraphKind::complete(1_000_000)).unwrap();
        assert!((c.variance - core::f64::consts::PI.powi(2) / 8.0).abs() < 1e-5);
    }

    #[test]
    fn order_stats() {
        let a = order_stat_moments(2, 0).unwrap();
        assert!((a.moments.mean - 1.25).abs() < 1e-15);
        let b = order_stat_moments(2, 1).unwrap();
        assert!((b.moments.mean - 0.25).abs() < 1e-15);
        for ell in 1..50 {
            let s = order_stat_moments(300, ell).unwrap();
            assert!(s.mean_lower <= s.moments.mean && s.moments.mean <= s.mean_upper.unwrap());
            assert!(s.moments.variance <= s.variance_upper.unwrap());
        }
        assert!(order_stat_moments(3, 3).is_err());
    }

    #[test]
    fn bulk_tail_split() {
        let (bulk, tail) = bulk_tail_moments(10, 10).unwrap();
        assert_eq!(bulk.mean, 0.0);
        assert_eq!(bulk.variance, 0.0);
        assert!((tail.mean - special::harmonic(10)).abs() < 1e-15);
        assert!((bulk_tail_moments(5, 2).unwrap().1.mean - 1.5).abs() < 1e-15);
        let (bulk, _) = bulk_tail_moments(10_000, 100).unwrap();
        assert!(bulk.variance <= 0.01);
        assert!(bulk_tail_moments(3, 0).is_err());
        assert!(bulk_tail_moments(3, 4).is_err());
    }

    #[test]
    fn laws() {
        assert_eq!(cdf_w(0.0), 0.0);
        assert_eq!(cdf_w(1.0), 0.5);
        assert_eq!(f_w(0.0), 1.0);
        assert_eq!(cdf_w(f64::INFINITY), 1.0);
        assert!((cdf_w(quantile_w(0.3)) - 0.3).abs() < 1e-15);
        assert!((gumbel_cdf(0.0, 0.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((limit_mgf_complete(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(limit_mgf_complete(1.0).is_err());
    }

    #[test]
    fn mgf_limit_agrees_with_finite_product() {
        for &t in &[-1.0, -0.5, 0.5] {
            let finite = finite_mgf_complete(10_000, t).unwrap();
            let limit = limit_mgf_complete(t).unwrap();
            assert!((finite - limit).abs() < 1e-3, "t = {t}: {finite} vs {limit}");
        }
    }

    #[test]
    fn samplers_small_cases() {
        let mut r = derive_stream(4, 4);
        let p = sample_cost_profile(GraphKind::Bipartite(1), &mut r).unwrap();
        assert_eq!(p.len(), 1);
        let d = direct_matching_sample(GraphKind::Bipartite(1), &mut r).unwrap();
        assert_eq!(d.pairs, vec![(0, 1)]);
        let d = direct_matching_sample(GraphKind::complete(8), &mut r).unwrap();
        assert_eq!(d.pairs.len(), 4);
        assert_eq!(d.total, d.profile.total());
        assert!(d.profile.is_nondecreasing());
        let mut seen = [false; 8];
        for &(a, b) in &d.pairs {
            assert!(!seen[a] && !seen[b]);
            seen[a] = true;
            seen[b] = true;
        }
        assert!(typical_cost_sample(0, &mut r).is_err());
    }
}
