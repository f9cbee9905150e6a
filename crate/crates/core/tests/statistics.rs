//! Monte Carlo checks of samplers and estimators at moderate sizes. Seeds
//! are fixed, so every check is deterministic.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use stablematch_core::cost_process::{
    cdf_w, direct_matching_sample, exact_total_moments, order_stat_moments, quantile_w,
    sample_cost_profile, sample_total_cost, typical_cost_sample, GraphKind,
};
use stablematch_core::descending::descending_subgraph;
use stablematch_core::matching::greedy_stable_matching;
use stablematch_core::pwit::{
    root_match_on_truncation, root_match_recursive, sample_descending_tree, sample_limit_rank,
    DEFAULT_NODE_CAP,
};
use stablematch_core::special::rank_one_probability;
use stablematch_core::stats::{
    chi_square_uniform, ks_one_sample, ks_two_sample, ks_two_sample_critical, moments_ci,
    pearson_corr_ci, Ecdf, Proportion, KS_C_ALPHA_001,
};
use stablematch_core::{derive_stream, CostScale, StreamFamily, WeightedGraph};

fn within(observed: f64, expected: f64, se: f64, k: f64) -> bool {
    (observed - expected).abs() <= k * se
}

#[test]
fn exponential_draws() {
    let mut r = derive_stream(10, 0);
    let unit: Vec<f64> = (0..1_000_000).map(|_| r.exp(1.0).unwrap()).collect();
    let m = moments_ci(&unit).unwrap();
    assert!(within(m.mean, 1.0, m.se_mean, 3.0), "{m:?}");
    assert!(within(m.variance, 1.0, m.se_variance, 3.0), "{m:?}");
    let fast: Vec<f64> = (0..1_000_000).map(|_| r.exp(4.0).unwrap()).collect();
    let m = moments_ci(&fast).unwrap();
    assert!(within(m.mean, 0.25, m.se_mean, 3.0), "{m:?}");
}

#[test]
fn graph_costs_have_unit_mean() {
    let mut g = WeightedGraph::bipartite(1000).unwrap();
    g.sample_costs(&mut derive_stream(11, 0), CostScale::UnitMean);
    let m = moments_ci(g.costs().unwrap()).unwrap();
    assert!(within(m.mean, 1.0, m.se_mean, 3.0), "{m:?}");

    let mut g = WeightedGraph::bipartite(2).unwrap();
    let mins: Vec<f64> = (0..100_000)
        .map(|k| {
            g.sample_costs(&mut derive_stream(12, k), CostScale::UnitMean);
            g.costs().unwrap().iter().cloned().fold(f64::INFINITY, f64::min)
        })
        .collect();
    let m = moments_ci(&mins).unwrap();
    assert!(within(m.mean, 0.25, m.se_mean, 3.0), "{m:?}");
}

#[test]
fn uniform_chi_square_and_stream_independence() {
    let mut r = derive_stream(13, 0);
    let mut counts = vec![0u64; 100];
    for _ in 0..1_000_000 {
        counts[(r.uniform() * 100.0) as usize] += 1;
    }
    let chi = chi_square_uniform(&counts).unwrap();
    let p = 1.0 - ChiSquared::new(99.0).unwrap().cdf(chi);
    assert!(p > 0.001, "chi = {chi}");

    let mut a = derive_stream(13, 5);
    let mut b = derive_stream(13, 6);
    let pairs: Vec<(f64, f64)> = (0..1_000_000).map(|_| (a.uniform(), b.uniform())).collect();
    let c = pearson_corr_ci(&pairs).unwrap();
    assert!(c.correlation.abs() < 0.01, "{c:?}");
}

#[test]
fn ks_self_consistency() {
    let mut r = derive_stream(14, 0);
    let xs: Vec<f64> = (0..10_000).map(|_| r.standard_exp()).collect();
    let cdf = |x: f64| if x <= 0.0 { 0.0 } else { 1.0 - (-x).exp() };
    let d0 = ks_one_sample(&xs, cdf).unwrap();
    assert!(d0 < 0.0276, "{d0}");
    let shifted: Vec<f64> = xs.iter().map(|x| x + 0.05).collect();
    let more: Vec<f64> = xs.iter().map(|x| x + 0.2).collect();
    let d1 = ks_one_sample(&shifted, cdf).unwrap();
    let d2 = ks_one_sample(&more, cdf).unwrap();
    assert!(d0 < d1 && d1 < d2);

    let ys: Vec<f64> = (0..10_000).map(|_| r.standard_exp()).collect();
    let d = ks_two_sample(&xs, &ys).unwrap();
    assert!(d < ks_two_sample_critical(KS_C_ALPHA_001, 10_000, 10_000));
}

#[test]
fn inverse_cdf_of_w() {
    let mut r = derive_stream(15, 0);
    let w: Vec<f64> = (0..100_000).map(|_| quantile_w(r.uniform())).collect();
    let e = Ecdf::new(&w).unwrap();
    assert!(e.sup_distance_on(cdf_w, 0.0, 1e6) < 0.01);
    assert!(ks_one_sample(&w[..10_000], cdf_w).unwrap() < 0.0276);
}

#[test]
fn fisher_interval_calibration() {
    let mut covered = 0;
    let meta = 400;
    for k in 0..meta {
        let mut r = derive_stream(16, k);
        let pairs: Vec<(f64, f64)> = (0..100).map(|_| (r.standard_exp(), r.standard_exp())).collect();
        if pearson_corr_ci(&pairs).unwrap().covers(0.0) {
            covered += 1;
        }
    }
    let p = Proportion::new(covered, meta as usize);
    assert!(within(p.value(), 0.95, 0.0109, 3.0), "{}", p.value());
}

#[test]
fn total_cost_moments() {
    for &(n, reps) in &[(100usize, 20_000u64), (1000, 10_000), (10_000, 3000)] {
        for kind in [GraphKind::Bipartite(n), GraphKind::complete(n)] {
            let fam = StreamFamily::new(17, n as u16);
            let xs: Vec<f64> = (0..reps).map(|k| sample_total_cost(kind, &mut fam.stream(k)).unwrap()).collect();
            let m = moments_ci(&xs).unwrap();
            let exact = exact_total_moments(kind).unwrap();
            assert!(within(m.mean, exact.mean, m.se_mean, 3.0), "{kind:?} {m:?}");
            assert!((m.variance / exact.variance - 1.0).abs() < 0.05 + 3.0 * m.se_variance, "{kind:?} {m:?}");
        }
    }
}

#[test]
fn small_profile_means() {
    let fam = StreamFamily::new(18, 0);
    let (mut y1, mut y2) = (Vec::new(), Vec::new());
    for k in 0..100_000 {
        let p = sample_cost_profile(GraphKind::Bipartite(2), &mut fam.stream(k)).unwrap();
        y1.push(p.get(1).unwrap());
        y2.push(p.get(2).unwrap());
    }
    let (a, b) = (moments_ci(&y1).unwrap(), moments_ci(&y2).unwrap());
    assert!(within(a.mean, 0.25, a.se_mean, 3.0));
    assert!(within(b.mean, 1.25, b.se_mean, 3.0));
}

#[test]
fn order_statistic_mean() {
    let exact = order_stat_moments(100, 10).unwrap().moments.mean;
    let fam = StreamFamily::new(19, 0);
    let ys: Vec<f64> = (0..100_000)
        .map(|k| sample_cost_profile(GraphKind::Bipartite(100), &mut fam.stream(k)).unwrap().get(90).unwrap())
        .collect();
    let m = moments_ci(&ys).unwrap();
    assert!(within(m.mean, exact, m.se_mean, 3.0), "{m:?} vs {exact}");
}

#[test]
fn engines_agree_in_distribution() {
    let n = 60;
    let reps = 4000u64;
    let full: Vec<f64> = (0..reps)
        .map(|k| {
            let mut g = WeightedGraph::bipartite(n).unwrap();
            g.sample_costs(&mut derive_stream(20, k), CostScale::UnitMean);
            greedy_stable_matching(&g).unwrap().total_cost()
        })
        .collect();
    let exact: Vec<f64> = (0..reps)
        .map(|k| sample_total_cost(GraphKind::Bipartite(n), &mut derive_stream(21, k)).unwrap())
        .collect();
    let direct: Vec<f64> = (0..reps)
        .map(|k| direct_matching_sample(GraphKind::Bipartite(n), &mut derive_stream(22, k)).unwrap().total)
        .collect();
    let crit = ks_two_sample_critical(KS_C_ALPHA_001, reps as usize, reps as usize);
    assert!(ks_two_sample(&full, &exact).unwrap() < crit);
    assert!(ks_two_sample(&direct, &exact).unwrap() < crit);
}

#[test]
fn direct_partners_uniform() {
    let n = 10;
    let mut counts = vec![0u64; n];
    for k in 0..100_000 {
        let d = direct_matching_sample(GraphKind::Bipartite(n), &mut derive_stream(23, k)).unwrap();
        let &(_, b) = d.pairs.iter().find(|p| p.0 == 0).unwrap();
        counts[b - n] += 1;
    }
    let chi = chi_square_uniform(&counts).unwrap();
    assert!(1.0 - ChiSquared::new(9.0).unwrap().cdf(chi) > 0.001, "{chi}");
}

#[test]
fn typical_cost_median() {
    let xs: Vec<f64> = (0..20_000).map(|k| typical_cost_sample(2000, &mut derive_stream(24, k)).unwrap()).collect();
    let e = Ecdf::new(&xs).unwrap();
    // F(1) = 1/2; binomial SE of the ECDF at 2·10⁴ points is 0.0035
    assert!((e.eval(1.0) - 0.5).abs() < 0.0106);
    let one = typical_cost_sample(1, &mut derive_stream(24, 0)).unwrap();
    assert!(one > 0.0);
}

#[test]
fn pwit_sizes() {
    for &s in &[1.0f64, 2.0] {
        let fam = StreamFamily::new(25, (s * 10.0) as u16);
        let mut sizes = Vec::new();
        let mut by_depth = vec![Vec::new(); 5];
        for k in 0..20_000 {
            let t = sample_descending_tree(s, DEFAULT_NODE_CAP, &mut fam.stream(k)).unwrap();
            sizes.push(t.len() as f64);
            let counts = t.depth_counts();
            for (d, col) in by_depth.iter_mut().enumerate() {
                col.push(counts.get(d).copied().unwrap_or(0) as f64);
            }
        }
        let m = moments_ci(&sizes).unwrap();
        assert!(within(m.mean, s.exp(), m.se_mean, 3.0), "s={s} {m:?}");
        let mut fact = 1.0;
        for (d, col) in by_depth.iter().enumerate().skip(1) {
            fact *= d as f64;
            let m = moments_ci(col).unwrap();
            assert!(within(m.mean, s.powi(d as i32) / fact, m.se_mean.max(1e-3), 3.0), "s={s} depth {d} {m:?}");
        }
    }
}

#[test]
fn pwit_root_law_and_rank_agreement() {
    let s = 6.0;
    let reps = 10_000u64;
    let fam = StreamFamily::new(26, 0);
    let mut costs = Vec::new();
    let mut rank_one = 0;
    for k in 0..reps {
        let t = sample_descending_tree(s, DEFAULT_NODE_CAP, &mut fam.stream(k)).unwrap();
        let o = root_match_on_truncation(&t).unwrap();
        assert_eq!(o, root_match_recursive(&t).unwrap());
        costs.push(o.cost);
        rank_one += (o.rank == Some(1)) as usize;
    }
    let e = Ecdf::new(&costs).unwrap();
    assert!(e.sup_distance_on(cdf_w, 0.0, s) < 0.02);
    let unmatched = Proportion::new(costs.iter().filter(|c| c.is_infinite()).count(), reps as usize);
    assert!(within(unmatched.value(), 1.0 / (1.0 + s), unmatched.se(), 3.0));

    // The truncation misses a rank-1 root only when its cost exceeds s,
    // which has probability below e^{-s}/(1+s) < 4e-4 here.
    let tree = Proportion::new(rank_one, reps as usize);
    let lim_fam = StreamFamily::new(26, 1);
    let limit = Proportion::new(
        (0..100_000u64).filter(|&k| sample_limit_rank(&mut lim_fam.stream(k), 1_000_000) == Some(1)).count(),
        100_000,
    );
    let se = (tree.se().powi(2) + limit.se().powi(2)).sqrt();
    assert!(within(tree.value(), limit.value(), se, 3.0), "{} vs {}", tree.value(), limit.value());
    assert!(within(limit.value(), rank_one_probability(), limit.se(), 3.0));
}

#[test]
fn descending_subgraph_sizes_on_bipartite() {
    let n = 500;
    let mut g = WeightedGraph::bipartite(n).unwrap();
    let mut sizes = Vec::new();
    for k in 0..400 {
        g.sample_costs(&mut derive_stream(27, k), CostScale::MeanN);
        for v in [0, n] {
            sizes.push(descending_subgraph(&g, v, 1.0).unwrap().len() as f64);
        }
    }
    let m = moments_ci(&sizes).unwrap();
    assert!(m.mean <= std::f64::consts::E + 3.0 * m.se_mean, "{m:?}");
}

#[test]
fn descending_tail_bound() {
    for &n in &[200usize, 500] {
        let mut g = WeightedGraph::bipartite(n).unwrap();
        for &s in &[1.0f64, 2.0] {
            let bound = (2.0 * s).exp();
            let mut big = 0;
            let reps = 300;
            for k in 0..reps {
                g.sample_costs(&mut derive_stream(28, k), CostScale::MeanN);
                if descending_subgraph(&g, 0, s).unwrap().len() as f64 > bound {
                    big += 1;
                }
            }
            let p = Proportion::new(big, reps as usize);
            let se = ((-s).exp() * (1.0 - (-s).exp()) / reps as f64).sqrt();
            assert!(p.value() <= (-s).exp() + 3.0 * se, "n={n} s={s} p={}", p.value());
        }
    }
}
