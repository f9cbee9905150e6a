use proptest::prelude::*;

use stablematch_core::cost_process::{direct_matching_sample, sample_cost_profile, GraphKind};
use stablematch_core::descending::descending_subgraph;
use stablematch_core::matching::{
    general_greedy, greedy_full_sort, greedy_stable_matching, is_stable, matching_with_vertex_removed,
    rank_profile,
};
use stablematch_core::oracle::{enumerate_stable_oracle, step_and_erase};
use stablematch_core::perturbation::{make_instance, overlap_fraction, tail_compare};
use stablematch_core::{derive_stream, CostScale, WeightedGraph};

fn sampled(bipartite: bool, n: usize, seed: u64, scale: CostScale) -> WeightedGraph {
    let mut g = if bipartite {
        WeightedGraph::bipartite(n).unwrap()
    } else {
        WeightedGraph::complete(n).unwrap()
    };
    g.sample_costs(&mut derive_stream(seed, n as u64), scale);
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_is_stable_and_sweeps_agree(bip in any::<bool>(), n in 1usize..40, seed in any::<u64>()) {
        let g = sampled(bip, n, seed, CostScale::UnitMean);
        let run = greedy_stable_matching(&g).unwrap();
        prop_assert_eq!(is_stable(&g, &run.matching).unwrap(), None);
        prop_assert!(run.profile.is_nondecreasing());
        prop_assert_eq!(&run, &greedy_full_sort(&g).unwrap());
        prop_assert_eq!(&run, &step_and_erase(&g).unwrap());
        prop_assert!(general_greedy(&g).unwrap().same_edges(&run.matching));
        let expected = if bip { n } else { n / 2 };
        prop_assert_eq!(run.matching.len(), expected);
        let unmatched = run.matching.unmatched().count();
        prop_assert_eq!(unmatched, if bip { 0 } else { n % 2 });
    }

    #[test]
    fn ranks_are_positive_and_bounded(n in 1usize..30, seed in any::<u64>()) {
        let g = sampled(true, n, seed, CostScale::UnitMean);
        let run = greedy_stable_matching(&g).unwrap();
        for r in rank_profile(&g, &run.matching).unwrap() {
            let r = r.unwrap();
            prop_assert!(r >= 1 && r as usize <= n);
        }
    }

    #[test]
    fn interlacing(bip in any::<bool>(), n in 2usize..25, seed in any::<u64>()) {
        let g = sampled(bip, n, seed, CostScale::UnitMean);
        let y = greedy_stable_matching(&g).unwrap().profile.into_vec();
        for u in 0..g.vertex_count() {
            let yu = matching_with_vertex_removed(&g, u).unwrap().profile.into_vec();
            for (k, &v) in yu.iter().enumerate() {
                prop_assert!(y[k] <= v);
                if k + 1 < y.len() {
                    prop_assert!(v <= y[k + 1]);
                }
            }
        }
    }

    #[test]
    fn vertex_removal_matches_explicit_subgraph(n in 2usize..15, seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let g = sampled(true, n, seed, CostScale::UnitMean);
        let u = pick.index(g.vertex_count());
        let (h, map) = g.without_vertex(u).unwrap();
        let direct = matching_with_vertex_removed(&g, u).unwrap();
        let sub = greedy_stable_matching(&h).unwrap();
        prop_assert_eq!(direct.profile.as_slice(), sub.profile.as_slice());
        for v in 0..h.vertex_count() {
            prop_assert_eq!(direct.matching.partner(map[v]), sub.matching.partner(v).map(|w| map[w]));
        }
    }

    #[test]
    fn descending_monotone_in_ceiling(n in 2usize..30, seed in any::<u64>(), a in 0.05f64..3.0, b in 0.05f64..3.0) {
        let g = sampled(true, n, seed, CostScale::MeanN);
        let (lo, hi) = (a.min(b), a.max(b));
        let small = descending_subgraph(&g, 0, lo).unwrap();
        let large = descending_subgraph(&g, 0, hi).unwrap();
        for v in &small.vertices {
            prop_assert!(large.vertices.contains(v));
        }
        for e in &small.edges {
            prop_assert!(large.edges.binary_search(e).is_ok());
        }
    }

    #[test]
    fn restriction_consistency(bip in any::<bool>(), n in 2usize..30, seed in any::<u64>(), s in 0.2f64..4.0) {
        let g = sampled(bip, n, seed, CostScale::MeanN);
        let run = greedy_stable_matching(&g).unwrap();
        for v in 0..g.vertex_count().min(6) {
            if run.matching.cost(v) >= s {
                continue;
            }
            let d = descending_subgraph(&g, v, s).unwrap();
            let h = d.to_explicit(&g).unwrap();
            let m = general_greedy(&h).unwrap();
            let partner = m.partner(0).map(|i| d.vertices[i]);
            prop_assert_eq!(partner, run.matching.partner(v));
        }
    }

    #[test]
    fn direct_sampler_consistent(bip in any::<bool>(), n in 1usize..60, seed in any::<u64>()) {
        let kind = if bip { GraphKind::Bipartite(n) } else { GraphKind::Complete { n, allow_odd: true } };
        let mut r = derive_stream(seed, 0);
        let d = direct_matching_sample(kind, &mut r).unwrap();
        prop_assert_eq!(d.total, d.profile.total());
        prop_assert!(d.profile.is_nondecreasing());
        let mut seen = vec![false; if bip { 2 * n } else { n }];
        for &(a, b) in &d.pairs {
            prop_assert!(!seen[a] && !seen[b]);
            if bip {
                prop_assert!(a < n && b >= n);
            }
            seen[a] = true;
            seen[b] = true;
        }
        let p = sample_cost_profile(kind, &mut r).unwrap();
        prop_assert_eq!(p.len(), kind.matching_size());
        prop_assert!(p.is_nondecreasing());
    }

    #[test]
    fn perturbation_coupling(n in 1usize..25, seed in any::<u64>(), a in 0.0f64..=1.0, b in 0.0f64..=1.0, m in 1usize..4) {
        let inst = make_instance(n, &mut derive_stream(seed, 1)).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let small = inst.perturbed_costs(lo).unwrap();
        let large = inst.perturbed_costs(hi).unwrap();
        for e in 0..small.len() {
            if small[e] != inst.base[e] {
                prop_assert!(large[e] != inst.base[e]);
            }
        }
        prop_assert_eq!(overlap_fraction(&inst, 0.0).unwrap().overlap, 1.0);
        let o = overlap_fraction(&inst, hi).unwrap();
        prop_assert!((0.0..=1.0).contains(&o.overlap));
        prop_assert_eq!(is_stable(&inst.graph(0.0).unwrap(), &o.base.matching).unwrap(), None);
        prop_assert_eq!(is_stable(&inst.graph(hi).unwrap(), &o.perturbed.matching).unwrap(), None);
        if m <= n {
            let t = tail_compare(&inst, &o.base, &o.perturbed, m).unwrap();
            // vertex-disjoint tails are edge-disjoint
            prop_assert!(!t.vertex_disjoint || t.edge_disjoint);
            prop_assert!(t.edges_survived <= m);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn oracle_uniqueness(bip in any::<bool>(), n in 1usize..6, seed in any::<u64>()) {
        let n = if bip { n } else { 2 * n.min(3) };
        let g = sampled(bip, n, seed, CostScale::UnitMean);
        let all = enumerate_stable_oracle(&g).unwrap();
        prop_assert_eq!(all.len(), 1);
        prop_assert!(all[0].same_edges(&greedy_stable_matching(&g).unwrap().matching));
    }

    #[test]
    fn oracle_on_random_trees(size in 2usize..12, seed in any::<u64>()) {
        let mut r = derive_stream(seed, 2);
        let edges: Vec<(usize, usize)> = (1..size).map(|v| (r.below(v), v)).collect();
        let mut g = WeightedGraph::explicit(size, edges).unwrap();
        g.sample_costs(&mut r, CostScale::UnitMean);
        let all = enumerate_stable_oracle(&g).unwrap();
        prop_assert_eq!(all.len(), 1);
        prop_assert!(all[0].same_edges(&general_greedy(&g).unwrap()));
        prop_assert_eq!(is_stable(&g, &all[0]).unwrap(), None);
    }
}
