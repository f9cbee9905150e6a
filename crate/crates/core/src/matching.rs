//! Matchings, the greedy and mutual-favourites constructions, and stability.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{key_less, EdgeId, VertexId, WeightedGraph};
use crate::profile::CostProfile;
use crate::sweep;

/// A set of vertex-disjoint edges with partner and cost lookup.
///
/// Edges are kept in the order they were added; for greedy constructions
/// this is the selection order.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    partner: Vec<Option<VertexId>>,
    edge_of: Vec<Option<EdgeId>>,
    cost: Vec<f64>,
    edges: Vec<EdgeId>,
}

impl Matching {
    pub fn empty(vertex_count: usize) -> Self {
        Matching {
            partner: vec![None; vertex_count],
            edge_of: vec![None; vertex_count],
            cost: vec![f64::INFINITY; vertex_count],
            edges: Vec::new(),
        }
    }

    /// Matching from explicit vertex pairs of `graph`.
    pub fn from_pairs(graph: &WeightedGraph, pairs: &[(VertexId, VertexId)]) -> Result<Self> {
        let costs = graph.costs()?;
        let mut m = Matching::empty(graph.vertex_count());
        for &(u, v) in pairs {
            let e = graph.edge_between(u, v).ok_or(Error::NotAnEdge(u, v))?;
            for x in [u, v] {
                if m.partner[x].is_some() {
                    return Err(Error::VertexReused(x));
                }
            }
            m.insert(e, u, v, costs[e]);
        }
        Ok(m)
    }

    #[inline]
    pub(crate) fn insert(&mut self, e: EdgeId, u: VertexId, v: VertexId, cost: f64) {
        self.partner[u] = Some(v);
        self.partner[v] = Some(u);
        self.edge_of[u] = Some(e);
        self.edge_of[v] = Some(e);
        self.cost[u] = cost;
        self.cost[v] = cost;
        self.edges.push(e);
    }

    pub fn vertex_count(&self) -> usize {
        self.partner.len()
    }

    /// `M(v)`.
    pub fn partner(&self, v: VertexId) -> Option<VertexId> {
        self.partner[v]
    }

    /// `c(v)`; `+∞` when `v` is unmatched.
    pub fn cost(&self, v: VertexId) -> f64 {
        self.cost[v]
    }

    pub fn edge_of(&self, v: VertexId) -> Option<EdgeId> {
        self.edge_of[v]
    }

    pub fn is_matched(&self, v: VertexId) -> bool {
        self.partner[v].is_some()
    }

    /// Matching edges in insertion order.
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn unmatched(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.partner.len()).filter(|&v| self.partner[v].is_none())
    }

    pub fn total_cost(&self) -> f64 {
        (0..self.partner.len())
            .filter(|&v| matches!(self.partner[v], Some(w) if w > v))
            .map(|v| self.cost[v])
            .sum()
    }

    /// Edge set sorted by index, for set comparisons.
    pub fn edge_set(&self) -> Vec<EdgeId> {
        let mut s = self.edges.clone();
        s.sort_unstable();
        s
    }

    pub fn same_edges(&self, other: &Matching) -> bool {
        self.partner == other.partner
    }
}

/// Output of the greedy construction.
#[derive(Clone, Debug, PartialEq)]
pub struct GreedyRun {
    pub matching: Matching,
    /// `Y_1 ≤ … ≤ Y_m`, aligned with [`GreedyRun::selection_order`].
    pub profile: CostProfile,
}

impl GreedyRun {
    pub fn selection_order(&self) -> &[EdgeId] {
        self.matching.edges()
    }

    pub fn total_cost(&self) -> f64 {
        self.profile.total()
    }
}

/// The unique stable matching by the greedy rule: repeatedly take the
/// globally cheapest edge whose endpoints are both unmatched.
pub fn greedy_stable_matching(graph: &WeightedGraph) -> Result<GreedyRun> {
    sweep::greedy(graph, None)
}

/// Same matching as [`greedy_stable_matching`], computed by sorting every
/// edge once.
pub fn greedy_full_sort(graph: &WeightedGraph) -> Result<GreedyRun> {
    sweep::full_sort(graph, None)
}

/// Greedy stable matching of `graph` with vertex `u` and its edges deleted.
/// The returned matching is indexed by the original vertices and leaves `u`
/// unmatched.
pub fn matching_with_vertex_removed(graph: &WeightedGraph, u: VertexId) -> Result<GreedyRun> {
    let count = graph.vertex_count();
    if u >= count {
        return Err(Error::VertexOutOfRange { vertex: u, count });
    }
    sweep::greedy(graph, Some(u))
}

/// Mutual-favourites construction, valid on any finite graph with distinct
/// costs: in rounds, match every pair of unmatched vertices whose connecting
/// edge is the cheapest remaining edge of both, until no two unmatched
/// vertices are adjacent.
pub fn general_greedy(graph: &WeightedGraph) -> Result<Matching> {
    let costs = graph.costs()?;
    let count = graph.vertex_count();

    // Incident edges of each vertex sorted by preference.
    let mut offsets = Vec::with_capacity(count + 1);
    offsets.push(0usize);
    let mut adj: Vec<(EdgeId, VertexId)> = Vec::with_capacity(2 * graph.edge_count());
    for v in 0..count {
        let start = adj.len();
        graph.for_each_incident(v, |e, w| adj.push((e, w)));
        adj[start..].sort_unstable_by(|a, b| {
            costs[a.0].total_cmp(&costs[b.0]).then(a.0.cmp(&b.0))
        });
        offsets.push(adj.len());
    }

    let mut cursor: Vec<usize> = offsets[..count].to_vec();
    let mut matching = Matching::empty(count);

    // Cheapest edge of v to an unmatched neighbour, advancing past matched ones.
    fn favourite(
        v: VertexId,
        cursor: &mut [usize],
        offsets: &[usize],
        adj: &[(EdgeId, VertexId)],
        matching: &Matching,
    ) -> Option<(EdgeId, VertexId)> {
        while cursor[v] < offsets[v + 1] {
            let (e, w) = adj[cursor[v]];
            if !matching.is_matched(w) {
                return Some((e, w));
            }
            cursor[v] += 1;
        }
        None
    }

    let mut candidates: Vec<VertexId> = (0..count).collect();
    let mut stamp = vec![0u32; count];
    let mut round = 0u32;
    loop {
        round += 1;
        let mut pairs: Vec<(EdgeId, VertexId, VertexId)> = Vec::new();
        for &v in &candidates {
            if matching.is_matched(v) {
                continue;
            }
            if let Some((e, w)) = favourite(v, &mut cursor, &offsets, &adj, &matching) {
                if let Some((f, _)) = favourite(w, &mut cursor, &offsets, &adj, &matching) {
                    if f == e {
                        pairs.push((e, v.min(w), v.max(w)));
                    }
                }
            }
        }
        if pairs.is_empty() {
            break;
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut next = Vec::new();
        for &(e, u, w) in &pairs {
            matching.insert(e, u, w, costs[e]);
        }
        for &(_, u, w) in &pairs {
            for x in [u, w] {
                graph.for_each_incident(x, |_, y| {
                    if !matching.is_matched(y) && stamp[y] != round {
                        stamp[y] = round;
                        next.push(y);
                    }
                });
            }
        }
        candidates = next;
    }
    Ok(matching)
}

/// A pair of vertices joined by an edge cheaper than both matching costs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnstablePair {
    pub u: VertexId,
    pub v: VertexId,
    pub edge: EdgeId,
    pub edge_cost: f64,
    pub cost_u: f64,
    pub cost_v: f64,
}

fn check_matching(graph: &WeightedGraph, matching: &Matching) -> Result<()> {
    if matching.vertex_count() != graph.vertex_count() {
        return Err(Error::ForeignMatching);
    }
    for &e in matching.edges() {
        if e >= graph.edge_count() {
            return Err(Error::ForeignMatching);
        }
        let (u, v) = graph.endpoints(e);
        if matching.partner(u) != Some(v) || matching.edge_of(u) != Some(e) {
            return Err(Error::NotAnEdge(u, v));
        }
    }
    Ok(())
}

/// Returns the unstable pair with the lowest edge index, or `None` when the
/// matching is stable.
pub fn is_stable(graph: &WeightedGraph, matching: &Matching) -> Result<Option<UnstablePair>> {
    let costs = graph.costs()?;
    check_matching(graph, matching)?;
    let key = |v: VertexId| match matching.edge_of(v) {
        Some(e) => (costs[e], e),
        None => (f64::INFINITY, usize::MAX),
    };
    let mut found = None;
    graph.for_each_edge(|e, u, v| {
        if found.is_some() || matching.edge_of(u) == Some(e) {
            return;
        }
        let c = costs[e];
        let (cu, eu) = key(u);
        let (cv, ev) = key(v);
        if key_less(c, e, cu, eu) && key_less(c, e, cv, ev) {
            found = Some(UnstablePair {
                u,
                v,
                edge: e,
                edge_cost: c,
                cost_u: cu,
                cost_v: cv,
            });
        }
    });
    Ok(found)
}

/// Rank of each matched vertex's edge among its incident edges (1 =
/// cheapest); `None` for unmatched vertices.
pub fn rank_profile(graph: &WeightedGraph, matching: &Matching) -> Result<Vec<Option<u32>>> {
    let costs = graph.costs()?;
    check_matching(graph, matching)?;
    let count = graph.vertex_count();
    let mut below = vec![0u32; count];
    let own: Vec<(f64, EdgeId)> = (0..count)
        .map(|v| match matching.edge_of(v) {
            Some(e) => (costs[e], e),
            None => (f64::INFINITY, usize::MAX),
        })
        .collect();
    graph.for_each_edge(|e, u, v| {
        let c = costs[e];
        if key_less(c, e, own[u].0, own[u].1) {
            below[u] += 1;
        }
        if key_less(c, e, own[v].0, own[v].1) {
            below[v] += 1;
        }
    });
    Ok((0..count)
        .map(|v| matching.is_matched(v).then(|| below[v] + 1))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `K_{2,2}` with ω(v1,v1')=0.3, ω(v1,v2')=0.1, ω(v2,v1')=0.2, ω(v2,v2')=0.4.
    pub(crate) fn k22() -> WeightedGraph {
        WeightedGraph::bipartite(2)
            .unwrap()
            .with_costs(vec![0.3, 0.1, 0.2, 0.4])
            .unwrap()
    }

    #[test]
    fn greedy_on_k22() {
        let g = k22();
        let run = greedy_stable_matching(&g).unwrap();
        assert_eq!(run.matching.partner(0), Some(3));
        assert_eq!(run.matching.partner(1), Some(2));
        assert_eq!(run.profile.as_slice(), &[0.1, 0.2]);
        assert_eq!(run.selection_order(), &[1, 2]);
        assert!((run.matching.total_cost() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn greedy_on_k11() {
        let g = WeightedGraph::bipartite(1).unwrap().with_costs(vec![0.7]).unwrap();
        let run = greedy_stable_matching(&g).unwrap();
        assert_eq!(run.matching.edges(), &[0]);
        assert_eq!(run.profile.as_slice(), &[0.7]);
    }

    #[test]
    fn greedy_requires_costs() {
        let g = WeightedGraph::bipartite(2).unwrap();
        assert_eq!(greedy_stable_matching(&g), Err(Error::CostsUnset));
        assert_eq!(general_greedy(&g), Err(Error::CostsUnset));
    }

    #[test]
    fn general_greedy_on_k22() {
        let g = k22();
        let m = general_greedy(&g).unwrap();
        assert!(m.same_edges(&greedy_stable_matching(&g).unwrap().matching));
    }

    #[test]
    fn general_greedy_star() {
        // centre 0, leaves 1 and 2
        let g = WeightedGraph::explicit(3, vec![(0, 1), (0, 2)])
            .unwrap()
            .with_costs(vec![0.5, 0.9])
            .unwrap();
        let m = general_greedy(&g).unwrap();
        assert_eq!(m.partner(0), Some(1));
        assert_eq!(m.partner(2), None);
    }

    #[test]
    fn general_greedy_path() {
        // a=0, b=1, c=2
        let g = WeightedGraph::explicit(3, vec![(0, 1), (1, 2)])
            .unwrap()
            .with_costs(vec![0.2, 0.1])
            .unwrap();
        let m = general_greedy(&g).unwrap();
        assert_eq!(m.partner(1), Some(2));
        assert!(!m.is_matched(0));
        assert_eq!(m.cost(0), f64::INFINITY);
    }

    #[test]
    fn empty_matching_unstable_on_k11() {
        let g = WeightedGraph::bipartite(1).unwrap().with_costs(vec![0.7]).unwrap();
        let p = is_stable(&g, &Matching::empty(2)).unwrap().unwrap();
        assert_eq!((p.u, p.v), (0, 1));
        assert_eq!(p.cost_u, f64::INFINITY);
        assert_eq!(p.cost_v, f64::INFINITY);
    }

    #[test]
    fn diagonal_matching_unstable_on_k22() {
        let g = k22();
        let m = Matching::from_pairs(&g, &[(0, 2), (1, 3)]).unwrap();
        let p = is_stable(&g, &m).unwrap().unwrap();
        assert_eq!((p.u, p.v), (0, 3));
        assert_eq!(p.edge_cost, 0.1);
        assert!(p.edge_cost < p.cost_u.min(p.cost_v));
    }

    #[test]
    fn stable_matching_has_no_pair() {
        let g = k22();
        let run = greedy_stable_matching(&g).unwrap();
        assert_eq!(is_stable(&g, &run.matching).unwrap(), None);
    }

    #[test]
    fn foreign_matchings_rejected() {
        let g = k22();
        assert_eq!(Matching::from_pairs(&g, &[(0, 1)]), Err(Error::NotAnEdge(0, 1)));
        assert_eq!(
            Matching::from_pairs(&g, &[(0, 2), (0, 3)]),
            Err(Error::VertexReused(0))
        );
        assert_eq!(is_stable(&g, &Matching::empty(3)), Err(Error::ForeignMatching));
    }

    #[test]
    fn vertex_removal() {
        let g = k22();
        let run = matching_with_vertex_removed(&g, 0).unwrap();
        assert_eq!(run.matching.partner(1), Some(2));
        assert!(!run.matching.is_matched(0));
        assert_eq!(run.profile.as_slice(), &[0.2]);

        let g = WeightedGraph::bipartite(1).unwrap().with_costs(vec![0.7]).unwrap();
        let run = matching_with_vertex_removed(&g, 0).unwrap();
        assert!(run.matching.is_empty());
        assert!(matching_with_vertex_removed(&g, 5).is_err());
    }

    #[test]
    fn ranks() {
        let g = k22();
        let run = greedy_stable_matching(&g).unwrap();
        let r = rank_profile(&g, &run.matching).unwrap();
        assert_eq!(r, vec![Some(1); 4]);
        let g = WeightedGraph::bipartite(1).unwrap().with_costs(vec![0.7]).unwrap();
        let run = greedy_stable_matching(&g).unwrap();
        assert_eq!(rank_profile(&g, &run.matching).unwrap(), vec![Some(1), Some(1)]);
    }
}
