//! Resampling a fraction of the edge costs.
//!
//! An instance holds base costs `ω`, replacement costs `ω'` and uniforms
//! `U`, one of each per edge of `K_{n,n}`. The perturbed cost is
//! `ω_ε(e) = ω'(e)` if `U(e) ≤ ε` and `ω(e)` otherwise, so one instance
//! defines a coupled family over all `ε`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId, WeightedGraph, DEFAULT_EDGE_BUDGET};
use crate::matching::{greedy_stable_matching, GreedyRun};
use crate::rng::{RngStream, StreamFamily};
use crate::stats::{pearson_corr_ci, CorrEstimate, Proportion};

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationInstance {
    skeleton: WeightedGraph,
    pub base: Vec<f64>,
    pub replacement: Vec<f64>,
    pub uniforms: Vec<f64>,
}

/// Draws `ω`, then `ω'`, then `U`, each in edge-index order.
pub fn make_instance(n: usize, rng: &mut RngStream) -> Result<PerturbationInstance> {
    make_instance_with_budget(n, DEFAULT_EDGE_BUDGET, rng)
}

pub fn make_instance_with_budget(
    n: usize,
    budget: usize,
    rng: &mut RngStream,
) -> Result<PerturbationInstance> {
    let skeleton = WeightedGraph::bipartite_with_budget(n, budget)?;
    let edges = skeleton.edge_count();
    let base = (0..edges).map(|_| rng.standard_exp()).collect();
    let replacement = (0..edges).map(|_| rng.standard_exp()).collect();
    let uniforms = (0..edges).map(|_| rng.uniform()).collect();
    Ok(PerturbationInstance {
        skeleton,
        base,
        replacement,
        uniforms,
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange { what: "eps", value: eps });
    }
    Ok(())
}

impl PerturbationInstance {
    pub fn n(&self) -> usize {
        self.skeleton.size_parameter()
    }

    pub fn skeleton(&self) -> &WeightedGraph {
        &self.skeleton
    }

    /// `ω_ε`.
    pub fn perturbed_costs(&self, eps: f64) -> Result<Vec<f64>> {
        check_eps(eps)?;
        Ok(self
            .base
            .iter()
            .zip(&self.replacement)
            .zip(&self.uniforms)
            .map(|((&w, &w2), &u)| if u <= eps { w2 } else { w })
            .collect())
    }

    /// The graph carrying `ω_ε`.
    pub fn graph(&self, eps: f64) -> Result<WeightedGraph> {
        self.skeleton.clone().with_costs(self.perturbed_costs(eps)?)
    }

    /// Greedy matching under `ω_ε`.
    pub fn matching(&self, eps: f64) -> Result<GreedyRun> {
        greedy_stable_matching(&self.graph(eps)?)
    }
}

/// Free-function form of [`PerturbationInstance::perturbed_costs`].
pub fn perturbed_costs(instance: &PerturbationInstance, eps: f64) -> Result<Vec<f64>> {
    instance.perturbed_costs(eps)
}

/// Fraction of matching edges shared by two matchings of the same graph.
pub fn shared_fraction(a: &GreedyRun, b: &GreedyRun) -> f64 {
    let size = a.matching.len();
    if size == 0 {
        return 1.0;
    }
    let (x, y) = (a.matching.edge_set(), b.matching.edge_set());
    let (mut i, mut j, mut shared) = (0, 0, 0usize);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    shared as f64 / size as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapOutcome {
    /// `|S⁰ ∩ S^ε|` divided by the number of matching edges.
    pub overlap: f64,
    pub c0: f64,
    pub ceps: f64,
    pub base: GreedyRun,
    pub perturbed: GreedyRun,
}

pub fn overlap_fraction(instance: &PerturbationInstance, eps: f64) -> Result<OverlapOutcome> {
    let base = instance.matching(0.0)?;
    overlap_against(instance, base, eps)
}

/// As [`overlap_fraction`] with the unperturbed matching already computed.
pub fn overlap_against(
    instance: &PerturbationInstance,
    base: GreedyRun,
    eps: f64,
) -> Result<OverlapOutcome> {
    let perturbed = instance.matching(eps)?;
    Ok(OverlapOutcome {
        overlap: shared_fraction(&base, &perturbed),
        c0: base.total_cost(),
        ceps: perturbed.total_cost(),
        base,
        perturbed,
    })
}

/// The `m` most expensive edges of a greedy matching (its last `m`
/// selections) and their endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct TailSet {
    /// `(edge, cost)` in selection order.
    pub edges: Vec<(EdgeId, f64)>,
    /// Sorted.
    pub vertices: Vec<VertexId>,
}

pub fn tail_vertex_sets(graph: &WeightedGraph, run: &GreedyRun, m: usize) -> Result<TailSet> {
    let order = run.selection_order();
    if m == 0 || m > order.len() {
        return Err(Error::OutOfRange { what: "tail size", value: m as f64 });
    }
    let costs = run.profile.as_slice();
    let start = order.len() - m;
    let edges: Vec<(EdgeId, f64)> = (start..order.len()).map(|i| (order[i], costs[i])).collect();
    let mut vertices = Vec::with_capacity(2 * m);
    for &(e, _) in &edges {
        let (a, b) = graph.endpoints(e);
        vertices.push(a);
        vertices.push(b);
    }
    vertices.sort_unstable();
    Ok(TailSet { edges, vertices })
}

fn sorted_disjoint<T: Ord>(a: &[T], b: &[T]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => return false,
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailOutcome {
    /// How many edges of `L_0(m)` are still in the perturbed matching.
    pub edges_survived: usize,
    pub vertex_disjoint: bool,
    pub edge_disjoint: bool,
    pub c0: f64,
    pub ceps: f64,
}

/// Both tail sets of one instance and how they relate.
pub fn tail_compare(
    instance: &PerturbationInstance,
    base: &GreedyRun,
    perturbed: &GreedyRun,
    m: usize,
) -> Result<TailOutcome> {
    let g = instance.skeleton();
    let l0 = tail_vertex_sets(g, base, m)?;
    let le = tail_vertex_sets(g, perturbed, m)?;
    let edges_survived = l0
        .edges
        .iter()
        .filter(|&&(e, _)| {
            let (a, _) = g.endpoints(e);
            perturbed.matching.edge_of(a) == Some(e)
        })
        .count();
    let mut e0: Vec<EdgeId> = l0.edges.iter().map(|x| x.0).collect();
    let mut ee: Vec<EdgeId> = le.edges.iter().map(|x| x.0).collect();
    e0.sort_unstable();
    ee.sort_unstable();
    Ok(TailOutcome {
        edges_survived,
        vertex_disjoint: sorted_disjoint(&l0.vertices, &le.vertices),
        edge_disjoint: sorted_disjoint(&e0, &ee),
        c0: base.total_cost(),
        ceps: perturbed.total_cost(),
    })
}

/// One replicate: fresh instance, both matchings, both tail sets.
pub fn tail_replicate(n: usize, m: usize, eps: f64, rng: &mut RngStream) -> Result<TailOutcome> {
    check_eps(eps)?;
    let instance = make_instance(n, rng)?;
    let base = instance.matching(0.0)?;
    let perturbed = instance.matching(eps)?;
    tail_compare(&instance, &base, &perturbed, m)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailSummary {
    /// No edge of `L_0(m)` survives.
    pub none_survive: Proportion,
    /// Every edge of `L_0(m)` survives.
    pub all_survive: Proportion,
    pub vertex_disjoint: Proportion,
    pub edge_disjoint: Proportion,
}

pub fn summarize_tail(outcomes: &[TailOutcome], m: usize) -> TailSummary {
    let reps = outcomes.len();
    let count = |f: &dyn Fn(&TailOutcome) -> bool| Proportion::new(outcomes.iter().filter(|o| f(o)).count(), reps);
    TailSummary {
        none_survive: count(&|o| o.edges_survived == 0),
        all_survive: count(&|o| o.edges_survived == m),
        vertex_disjoint: count(&|o| o.vertex_disjoint),
        edge_disjoint: count(&|o| o.edge_disjoint),
    }
}

/// Serial tail experiment; replicate `k` uses `family.stream(k)`.
pub fn tail_experiment(
    n: usize,
    m: usize,
    eps: f64,
    reps: u64,
    family: StreamFamily,
) -> Result<TailSummary> {
    if reps == 0 {
        return Err(Error::TooFewObservations { need: 1, got: 0 });
    }
    let outcomes = (0..reps)
        .map(|k| tail_replicate(n, m, eps, &mut family.stream(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_tail(&outcomes, m))
}

/// `(C⁰, C^ε)` for one fresh instance.
pub fn corr_replicate(n: usize, eps: f64, rng: &mut RngStream) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let instance = make_instance(n, rng)?;
    let c0 = instance.matching(0.0)?.total_cost();
    let ceps = instance.matching(eps)?.total_cost();
    Ok((c0, ceps))
}

/// Serial correlation experiment; replicate `k` uses `family.stream(k)`.
pub fn corr_experiment(n: usize, eps: f64, reps: u64, family: StreamFamily) -> Result<CorrEstimate> {
    if reps < 30 {
        return Err(Error::TooFewObservations { need: 30, got: reps as usize });
    }
    let pairs = (0..reps)
        .map(|k| corr_replicate(n, eps, &mut family.stream(k)))
        .collect::<Result<Vec<_>>>()?;
    pearson_corr_ci(&pairs)
}
