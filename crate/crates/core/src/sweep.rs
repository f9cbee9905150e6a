//! Greedy sweeps.
//!
//! `greedy` processes edges in key order but never sorts the whole edge set
//! of a dense graph. Each round picks a threshold `t` from a small sample of
//! the pairs still open, collects the open pairs cheaper than `t`, sorts and
//! sweeps them, then drops the vertices that got matched. Every open pair
//! below the threshold of an earlier round was already swept, so the
//! accepted edges are the same as in a full sweep.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Topology, VertexId, WeightedGraph};
use crate::matching::{GreedyRun, Matching};
use crate::profile::CostProfile;

const SAMPLE_SIZE: usize = 1024;
const MIN_TARGET: usize = 4096;

fn sort_by_key(list: &mut [(f64, EdgeId)]) {
    list.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
}

fn accept_sorted(
    graph: &WeightedGraph,
    list: &[(f64, EdgeId)],
    matching: &mut Matching,
    blocked: &[bool],
    profile: &mut Vec<f64>,
) {
    for &(c, e) in list {
        let (u, v) = graph.endpoints(e);
        if !blocked[u] && !blocked[v] && !matching.is_matched(u) && !matching.is_matched(v) {
            matching.insert(e, u, v, c);
            profile.push(c);
        }
    }
}

/// Reference sweep: sort every edge by key, accept an edge when both
/// endpoints are free.
pub(crate) fn full_sort(graph: &WeightedGraph, excluded: Option<VertexId>) -> Result<GreedyRun> {
    let costs = graph.costs()?;
    let count = graph.vertex_count();
    let mut blocked = alloc::vec![false; count];
    if let Some(u) = excluded {
        blocked[u] = true;
    }
    let mut list: Vec<(f64, EdgeId)> = costs.iter().copied().zip(0..).collect();
    sort_by_key(&mut list);
    let mut matching = Matching::empty(count);
    let mut profile = Vec::new();
    accept_sorted(graph, &list, &mut matching, &blocked, &mut profile);
    Ok(GreedyRun {
        matching,
        profile: CostProfile::new(profile),
    })
}

/// Open pairs of the current round.
enum Open {
    Sides(Vec<VertexId>, Vec<VertexId>),
    Clique(Vec<VertexId>),
}

impl Open {
    fn pairs(&self) -> usize {
        match self {
            Open::Sides(l, r) => l.len() * r.len(),
            Open::Clique(u) => u.len() * u.len().saturating_sub(1) / 2,
        }
    }

    fn vertices(&self) -> usize {
        match self {
            Open::Sides(l, r) => l.len() + r.len(),
            Open::Clique(u) => u.len(),
        }
    }

    fn retain_free(&mut self, matching: &Matching) {
        match self {
            Open::Sides(l, r) => {
                l.retain(|&v| !matching.is_matched(v));
                r.retain(|&v| !matching.is_matched(v));
            }
            Open::Clique(u) => u.retain(|&v| !matching.is_matched(v)),
        }
    }

    /// Costs of about `SAMPLE_SIZE` open pairs at evenly spaced positions.
    fn sample(&self, graph: &WeightedGraph, costs: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(SAMPLE_SIZE);
        match self {
            Open::Sides(l, r) => {
                let total = l.len() * r.len();
                for k in 0..SAMPLE_SIZE {
                    let p = (2 * k + 1) * total / (2 * SAMPLE_SIZE);
                    let (a, b) = (l[p / r.len()], r[p % r.len()]);
                    out.push(costs[graph.edge_between(a, b).expect("bipartite pair")]);
                }
            }
            Open::Clique(u) => {
                let m = u.len();
                let total = m * m;
                for k in 0..SAMPLE_SIZE {
                    let p = (2 * k + 1) * total / (2 * SAMPLE_SIZE);
                    let (i, j) = (p / m, p % m);
                    if i != j {
                        out.push(costs[graph.edge_between(u[i], u[j]).expect("clique pair")]);
                    }
                }
            }
        }
        out.sort_unstable_by(f64::total_cmp);
        out
    }

    fn collect_below(&self, n: usize, costs: &[f64], t: f64, out: &mut Vec<(f64, EdgeId)>) {
        out.clear();
        match self {
            Open::Sides(l, r) => {
                for &a in l {
                    let row = &costs[a * n..(a + 1) * n];
                    for &b in r {
                        let c = row[b - n];
                        if c < t {
                            out.push((c, a * n + (b - n)));
                        }
                    }
                }
            }
            Open::Clique(u) => {
                // `u` stays sorted, so a < b below.
                for (x, &a) in u.iter().enumerate() {
                    let base = a * (2 * n - a - 1) / 2;
                    for &b in &u[x + 1..] {
                        let e = base + (b - a - 1);
                        let c = costs[e];
                        if c < t {
                            out.push((c, e));
                        }
                    }
                }
            }
        }
    }
}

/// Greedy stable matching, optionally with one vertex deleted.
pub(crate) fn greedy(graph: &WeightedGraph, excluded: Option<VertexId>) -> Result<GreedyRun> {
    let costs = graph.costs()?;
    let count = graph.vertex_count();
    if let Some(u) = excluded {
        if u >= count {
            return Err(Error::VertexOutOfRange { vertex: u, count });
        }
    }
    let keep = |v: &VertexId| Some(*v) != excluded;
    let (n, mut open) = match graph.topology() {
        Topology::Explicit { .. } => return full_sort(graph, excluded),
        Topology::Bipartite { n } => (
            *n,
            Open::Sides((0..*n).filter(keep).collect(), (*n..2 * n).filter(keep).collect()),
        ),
        Topology::Complete { n } => (*n, Open::Clique((0..*n).filter(keep).collect())),
    };
    let blocked = alloc::vec![false; count];
    let mut matching = Matching::empty(count);
    let mut profile = Vec::new();
    let mut list = Vec::new();

    while open.pairs() > 0 {
        let pairs = open.pairs();
        let target = (8 * open.vertices()).max(MIN_TARGET);
        if pairs <= 2 * target {
            open.collect_below(n, costs, f64::INFINITY, &mut list);
        } else {
            let sample = open.sample(graph, costs);
            let mut idx = (target * sample.len() / pairs).min(sample.len() - 1);
            loop {
                open.collect_below(n, costs, sample[idx], &mut list);
                if !list.is_empty() {
                    break;
                }
                if idx + 1 == sample.len() {
                    open.collect_below(n, costs, f64::INFINITY, &mut list);
                    break;
                }
                idx = (4 * idx + 4).min(sample.len() - 1);
            }
        }
        sort_by_key(&mut list);
        accept_sorted(graph, &list, &mut matching, &blocked, &mut profile);
        open.retain_free(&matching);
    }
    Ok(GreedyRun {
        matching,
        profile: CostProfile::new(profile),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CostScale;
    use crate::rng::derive_stream;

    #[test]
    fn staged_equals_full_sort_large() {
        for (i, g) in [
            WeightedGraph::bipartite(300).unwrap(),
            WeightedGraph::complete(301).unwrap(),
        ]
        .into_iter()
        .enumerate()
        {
            let mut g = g;
            g.sample_costs(&mut derive_stream(11, i as u64), CostScale::UnitMean);
            let a = greedy(&g, None).unwrap();
            let b = full_sort(&g, None).unwrap();
            assert_eq!(a, b);
            let a = greedy(&g, Some(7)).unwrap();
            let b = full_sort(&g, Some(7)).unwrap();
            assert_eq!(a, b);
            assert!(!a.matching.is_matched(7));
        }
    }

    #[test]
    fn ties_go_to_lower_index() {
        let g = WeightedGraph::bipartite(2)
            .unwrap()
            .with_costs(vec![1.0, 1.0, 1.0, 1.0])
            .unwrap();
        let run = greedy(&g, None).unwrap();
        assert_eq!(run.selection_order(), &[0, 3]);
    }
}
