//! Per-replicate work shared by the subcommands and the acceptance suite.
//!
//! Every replicate draws from its own stream of a [`StreamFamily`], and
//! [`par_map`] returns results in replicate order, so output does not depend
//! on how the pool schedules work.

use rayon::prelude::*;
use stablematch_core::cost_process::{direct_matching_sample, sample_total_cost, GraphKind};
use stablematch_core::matching::{greedy_stable_matching, matching_with_vertex_removed, rank_profile};
use stablematch_core::oracle::enumerate_stable_oracle;
use stablematch_core::perturbation::{make_instance, overlap_against};
use stablematch_core::pwit::{root_match_on_truncation, sample_descending_tree, PwitTree, RootOutcome};
use stablematch_core::{CostScale, Result, RngStream, StreamFamily, WeightedGraph};

use crate::args::Engine;

/// Stream family tags of the subcommands. The acceptance suite uses tags
/// from [`VERIFY_TAG_BASE`] upwards.
pub mod tags {
    pub const SIMULATE_COST: u16 = 1;
    pub const TYPICAL_COST: u16 = 2;
    pub const RANK: u16 = 3;
    pub const PWIT_RANK: u16 = 4;
    pub const PWIT_REFERENCE: u16 = 5;
    pub const PWIT_TREE: u16 = 6;
    pub const OVERLAP: u16 = 7;
    pub const TAIL: u16 = 8;
    pub const NOISE_CORR: u16 = 9;
    pub const INTERLACING: u16 = 10;
    pub const ORACLE: u16 = 11;
    pub const DUMP_GRAPH: u16 = 12;
    pub const VERIFY_TAG_BASE: u16 = 256;
}

/// Runs `f` on replicates `0..reps` and returns the results in order.
pub fn par_map<T, F>(reps: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..reps).into_par_iter().map(f).collect()
}

/// Empty graph of the given kind.
pub fn skeleton(kind: GraphKind) -> Result<WeightedGraph> {
    kind.validate()?;
    match kind {
        GraphKind::Bipartite(n) => WeightedGraph::bipartite(n),
        GraphKind::Complete { n, .. } => WeightedGraph::complete(n),
    }
}

pub fn sampled_graph(kind: GraphKind, scale: CostScale, rng: &mut RngStream) -> Result<WeightedGraph> {
    let mut g = skeleton(kind)?;
    g.sample_costs(rng, scale);
    Ok(g)
}

/// Total cost of one greedy matching, by the chosen engine.
pub fn total_cost(kind: GraphKind, engine: Engine, rng: &mut RngStream) -> Result<f64> {
    match engine {
        Engine::Exact => sample_total_cost(kind, rng),
        Engine::Direct => Ok(direct_matching_sample(kind, rng)?.total),
        Engine::FullGraph => {
            let g = sampled_graph(kind, CostScale::UnitMean, rng)?;
            Ok(greedy_stable_matching(&g)?.total_cost())
        }
    }
}

pub fn totals(kind: GraphKind, engine: Engine, reps: u64, family: StreamFamily) -> Result<Vec<f64>> {
    par_map(reps, |k| total_cost(kind, engine, &mut family.stream(k)))
}

/// Rank of every vertex's matching edge; `None` for an unmatched vertex.
pub fn vertex_ranks(kind: GraphKind, rng: &mut RngStream) -> Result<Vec<Option<u32>>> {
    let g = sampled_graph(kind, CostScale::UnitMean, rng)?;
    let run = greedy_stable_matching(&g)?;
    rank_profile(&g, &run.matching)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeSample {
    pub size: usize,
    pub capped: bool,
    /// Nodes per depth, root at depth 0.
    pub depth_counts: Vec<u64>,
    /// `None` for capped trees.
    pub root: Option<RootOutcome>,
}

pub fn tree_sample(s: f64, node_cap: usize, rng: &mut RngStream) -> Result<(PwitTree, TreeSample)> {
    let tree = sample_descending_tree(s, node_cap, rng)?;
    let root = if tree.capped() {
        None
    } else {
        Some(root_match_on_truncation(&tree)?)
    };
    let sample = TreeSample {
        size: tree.len(),
        capped: tree.capped(),
        depth_counts: tree.depth_counts(),
        root,
    };
    Ok((tree, sample))
}

/// For every vertex `u`, the number of `k` violating
/// `Y_k ≤ Y_k^u ≤ Y_{k+1}`.
pub fn interlacing_violations(kind: GraphKind, rng: &mut RngStream) -> Result<Vec<usize>> {
    let g = sampled_graph(kind, CostScale::UnitMean, rng)?;
    let y = greedy_stable_matching(&g)?.profile.into_vec();
    (0..g.vertex_count())
        .map(|u| {
            let yu = matching_with_vertex_removed(&g, u)?.profile.into_vec();
            Ok(yu
                .iter()
                .enumerate()
                .filter(|&(k, &v)| y[k] > v || (k + 1 < y.len() && v > y[k + 1]))
                .count())
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub stable_count: usize,
    /// The only stable matching is the greedy one.
    pub equals_greedy: bool,
}

pub fn oracle_check(kind: GraphKind, rng: &mut RngStream) -> Result<OracleOutcome> {
    let g = sampled_graph(kind, CostScale::UnitMean, rng)?;
    let stable = enumerate_stable_oracle(&g)?;
    let greedy = greedy_stable_matching(&g)?;
    Ok(OracleOutcome {
        stable_count: stable.len(),
        equals_greedy: stable.len() == 1 && stable[0].same_edges(&greedy.matching),
    })
}

/// Stream of replicate `k` at grid point `n`, for experiments that sweep
/// over `n`. Replicates at the same `n` use the same streams whatever the
/// rest of the grid is.
pub fn grid_stream(family: StreamFamily, n: usize, k: u64) -> RngStream {
    debug_assert!(k < GRID_REPS_LIMIT && (n as u64) < (1 << 24));
    family.stream(((n as u64) << 24) | k)
}

pub const GRID_REPS_LIMIT: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapRow {
    pub overlap: f64,
    pub c0: f64,
    pub ceps: f64,
}

/// One coupled instance on `K_{n,n}` evaluated at every `eps` of the grid.
pub fn overlap_replicate(n: usize, eps: &[f64], rng: &mut RngStream) -> Result<Vec<OverlapRow>> {
    let instance = make_instance(n, rng)?;
    let base = instance.matching(0.0)?;
    eps.iter()
        .map(|&e| {
            let o = overlap_against(&instance, base.clone(), e)?;
            Ok(OverlapRow {
                overlap: o.overlap,
                c0: o.c0,
                ceps: o.ceps,
            })
        })
        .collect()
}

/// Mean of `e^{t(x - center)}` over the sample and its standard error.
pub fn empirical_mgf(sample: &[f64], center: f64, t: f64) -> (f64, f64) {
    let values: Vec<f64> = sample.iter().map(|&x| (t * (x - center)).exp()).collect();
    mean_se(&values)
}

/// Sample mean and standard error of the mean (0 for fewer than two values).
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Largest standardized step against the expected direction along a
/// sequence of `(estimate, se)`: for a nonincreasing trend the steps are
/// `(x_{i+1} - x_i) / sqrt(se_i^2 + se_{i+1}^2)`. A zero standard error with
/// a step in the wrong direction counts as infinitely far.
pub fn worst_trend_step(points: &[(f64, f64)], increasing: bool) -> f64 {
    points
        .windows(2)
        .map(|w| {
            let step = if increasing { w[0].0 - w[1].0 } else { w[1].0 - w[0].0 };
            let se = (w[0].1 * w[0].1 + w[1].1 * w[1].1).sqrt();
            if se > 0.0 {
                step / se
            } else if step > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
