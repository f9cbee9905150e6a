//! Finite weighted graphs.
//!
//! Vertices are `0..vertex_count()`. In `K_{n,n}` the left vertices
//! `v_1..v_n` are `0..n` and the right vertices `v'_1..v'_n` are `n..2n`;
//! edge `(v_{i+1}, v'_{j+1})` has index `i·n + j` (row-major). In `K_n` the
//! pair `(i, j)`, `i < j`, is indexed lexicographically.
//!
//! Costs are compared by the key `(cost, edge index)`, so equal costs are
//! resolved in favour of the lower index and every comparison is strict.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Default cap on the edge count of a generated graph (`K_{4096,4096}`).
pub const DEFAULT_EDGE_BUDGET: usize = 4096 * 4096;

#[derive(Clone, Debug, PartialEq)]
pub enum Topology {
    Bipartite { n: usize },
    Complete { n: usize },
    Explicit { vertices: usize, edges: Vec<(VertexId, VertexId)> },
}

/// Whether sampled costs have mean 1 or mean `n` (the typical scale).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CostScale {
    #[default]
    UnitMean,
    MeanN,
}

#[derive(Clone, Debug, PartialEq)]
struct Incidence {
    offsets: Vec<usize>,
    edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    topology: Topology,
    costs: Option<Vec<f64>>,
    incidence: Option<Incidence>,
}

#[inline]
pub(crate) fn key_less(ca: f64, ea: EdgeId, cb: f64, eb: EdgeId) -> bool {
    ca < cb || (ca == cb && ea < eb)
}

#[inline]
fn complete_row_offset(n: usize, i: usize) -> usize {
    i * (2 * n - i - 1) / 2
}

impl WeightedGraph {
    pub fn bipartite(n: usize) -> Result<Self> {
        Self::bipartite_with_budget(n, DEFAULT_EDGE_BUDGET)
    }

    pub fn bipartite_with_budget(n: usize, budget: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let edges = n.saturating_mul(n);
        if edges > budget {
            return Err(Error::OverBudget { edges, budget });
        }
        Ok(WeightedGraph {
            topology: Topology::Bipartite { n },
            costs: None,
            incidence: None,
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::complete_with_budget(n, DEFAULT_EDGE_BUDGET)
    }

    pub fn complete_with_budget(n: usize, budget: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let edges = n.checked_mul(n - 1).map(|x| x / 2).unwrap_or(usize::MAX);
        if edges > budget {
            return Err(Error::OverBudget { edges, budget });
        }
        Ok(WeightedGraph {
            topology: Topology::Complete { n },
            costs: None,
            incidence: None,
        })
    }

    /// Graph on `vertices` vertices with the given undirected edges, indexed
    /// in list order.
    pub fn explicit(vertices: usize, edges: Vec<(VertexId, VertexId)>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut seen: Vec<(VertexId, VertexId)> = Vec::with_capacity(edges.len());
        let mut degree = vec![0usize; vertices];
        for &(u, v) in &edges {
            for x in [u, v] {
                if x >= vertices {
                    return Err(Error::VertexOutOfRange { vertex: x, count: vertices });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            seen.push((u.min(v), u.max(v)));
            degree[u] += 1;
            degree[v] += 1;
        }
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut offsets = Vec::with_capacity(vertices + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut incident = vec![0; 2 * edges.len()];
        for (e, &(u, v)) in edges.iter().enumerate() {
            for x in [u, v] {
                incident[fill[x]] = e;
                fill[x] += 1;
            }
        }
        Ok(WeightedGraph {
            topology: Topology::Explicit { vertices, edges },
            costs: None,
            incidence: Some(Incidence { offsets, edges: incident }),
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn vertex_count(&self) -> usize {
        match &self.topology {
            Topology::Bipartite { n } => 2 * n,
            Topology::Complete { n } => *n,
            Topology::Explicit { vertices, .. } => *vertices,
        }
    }

    pub fn edge_count(&self) -> usize {
        match &self.topology {
            Topology::Bipartite { n } => n * n,
            Topology::Complete { n } => n * (n - 1) / 2,
            Topology::Explicit { edges, .. } => edges.len(),
        }
    }

    /// The `n` of `K_{n,n}` or `K_n`; vertex count for explicit graphs.
    pub fn size_parameter(&self) -> usize {
        match &self.topology {
            Topology::Bipartite { n } | Topology::Complete { n } => *n,
            Topology::Explicit { vertices, .. } => *vertices,
        }
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        match &self.topology {
            Topology::Bipartite { n } => (e / n, n + e % n),
            Topology::Complete { n } => {
                let n = *n;
                // Largest row whose offset does not exceed e.
                let (mut lo, mut hi) = (0usize, n.saturating_sub(2));
                while lo < hi {
                    let mid = (lo + hi).div_ceil(2);
                    if complete_row_offset(n, mid) <= e {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                (lo, lo + 1 + e - complete_row_offset(n, lo))
            }
            Topology::Explicit { edges, .. } => edges[e],
        }
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let count = self.vertex_count();
        if u >= count || v >= count || u == v {
            return None;
        }
        match &self.topology {
            Topology::Bipartite { n } => {
                let (l, r) = if u < *n { (u, v) } else { (v, u) };
                (l < *n && r >= *n).then(|| l * n + (r - n))
            }
            Topology::Complete { n } => {
                let (i, j) = (u.min(v), u.max(v));
                Some(complete_row_offset(*n, i) + (j - i - 1))
            }
            Topology::Explicit { .. } => {
                let mut found = None;
                self.for_each_incident(u, |e, w| {
                    if w == v && found.is_none() {
                        found = Some(e);
                    }
                });
                found
            }
        }
    }

    /// Calls `f(edge, other endpoint)` for every edge at `v`.
    pub fn for_each_incident<F: FnMut(EdgeId, VertexId)>(&self, v: VertexId, mut f: F) {
        match &self.topology {
            Topology::Bipartite { n } => {
                let n = *n;
                if v < n {
                    for j in 0..n {
                        f(v * n + j, n + j);
                    }
                } else {
                    let j = v - n;
                    for i in 0..n {
                        f(i * n + j, i);
                    }
                }
            }
            Topology::Complete { n } => {
                let n = *n;
                for w in 0..n {
                    if w < v {
                        f(complete_row_offset(n, w) + (v - w - 1), w);
                    } else if w > v {
                        f(complete_row_offset(n, v) + (w - v - 1), w);
                    }
                }
            }
            Topology::Explicit { edges, .. } => {
                let inc = self.incidence.as_ref().expect("explicit graphs carry incidence");
                for &e in &inc.edges[inc.offsets[v]..inc.offsets[v + 1]] {
                    let (a, b) = edges[e];
                    f(e, if a == v { b } else { a });
                }
            }
        }
    }

    pub fn degree(&self, v: VertexId) -> usize {
        match &self.topology {
            Topology::Bipartite { n } => *n,
            Topology::Complete { n } => n - 1,
            Topology::Explicit { .. } => {
                let inc = self.incidence.as_ref().expect("explicit graphs carry incidence");
                inc.offsets[v + 1] - inc.offsets[v]
            }
        }
    }

    /// Calls `f(edge, u, v)` for every edge in index order.
    pub fn for_each_edge<F: FnMut(EdgeId, VertexId, VertexId)>(&self, mut f: F) {
        match &self.topology {
            Topology::Bipartite { n } => {
                let n = *n;
                for i in 0..n {
                    for j in 0..n {
                        f(i * n + j, i, n + j);
                    }
                }
            }
            Topology::Complete { n } => {
                let mut e = 0;
                for i in 0..*n {
                    for j in i + 1..*n {
                        f(e, i, j);
                        e += 1;
                    }
                }
            }
            Topology::Explicit { edges, .. } => {
                for (e, &(u, v)) in edges.iter().enumerate() {
                    f(e, u, v);
                }
            }
        }
    }

    pub fn has_costs(&self) -> bool {
        self.costs.is_some()
    }

    pub fn costs(&self) -> Result<&[f64]> {
        self.costs.as_deref().ok_or(Error::CostsUnset)
    }

    /// Cost of edge `e`. Panics if costs are unset.
    #[inline]
    pub fn cost(&self, e: EdgeId) -> f64 {
        self.costs.as_ref().expect("costs are set")[e]
    }

    /// Installs costs, one per edge in index order; each must be positive and
    /// finite.
    pub fn set_costs(&mut self, costs: Vec<f64>) -> Result<()> {
        if costs.len() != self.edge_count() {
            return Err(Error::CostCount {
                expected: self.edge_count(),
                got: costs.len(),
            });
        }
        if let Some((edge, &cost)) = costs
            .iter()
            .enumerate()
            .find(|(_, &c)| !(c > 0.0 && c.is_finite()))
        {
            return Err(Error::InvalidCost { edge, cost });
        }
        self.costs = Some(costs);
        Ok(())
    }

    pub fn with_costs(mut self, costs: Vec<f64>) -> Result<Self> {
        self.set_costs(costs)?;
        Ok(self)
    }

    /// Removes and returns the cost vector, leaving the skeleton.
    pub fn take_costs(&mut self) -> Option<Vec<f64>> {
        self.costs.take()
    }

    pub fn scale_factor(&self, scale: CostScale) -> f64 {
        match scale {
            CostScale::UnitMean => 1.0,
            CostScale::MeanN => self.size_parameter() as f64,
        }
    }

    /// Draws i.i.d. exponential costs in edge-index order (mean 1, or mean
    /// `n` under [`CostScale::MeanN`]).
    pub fn sample_costs(&mut self, rng: &mut RngStream, scale: CostScale) {
        let factor = self.scale_factor(scale);
        let mut costs = self.costs.take().unwrap_or_default();
        costs.clear();
        costs.reserve(self.edge_count());
        for _ in 0..self.edge_count() {
            costs.push(rng.standard_exp() * factor);
        }
        self.costs = Some(costs);
    }

    /// Greedy preference: is edge `a` cheaper than edge `b`?
    #[inline]
    pub fn cheaper(&self, a: EdgeId, b: EdgeId) -> bool {
        key_less(self.cost(a), a, self.cost(b), b)
    }

    /// Graph with vertex `u` and its edges deleted; vertices above `u` shift
    /// down by one. Returns the graph as an explicit one together with the
    /// new-to-old vertex map.
    pub fn without_vertex(&self, u: VertexId) -> Result<(WeightedGraph, Vec<VertexId>)> {
        let count = self.vertex_count();
        if u >= count {
            return Err(Error::VertexOutOfRange { vertex: u, count });
        }
        if count == 1 {
            return Err(Error::EmptyGraph);
        }
        let costs = self.costs()?;
        let map: Vec<VertexId> = (0..count).filter(|&v| v != u).collect();
        let relabel = |v: VertexId| if v > u { v - 1 } else { v };
        let mut edges = Vec::new();
        let mut kept = Vec::new();
        self.for_each_edge(|e, a, b| {
            if a != u && b != u {
                edges.push((relabel(a), relabel(b)));
                kept.push(costs[e]);
            }
        });
        let g = WeightedGraph::explicit(count - 1, edges)?.with_costs(kept)?;
        Ok((g, map))
    }
}

/// Vertex label in the `v1, v1'` notation for bipartite graphs, plain index
/// otherwise.
pub fn vertex_label(graph: &WeightedGraph, v: VertexId) -> alloc::string::String {
    use alloc::format;
    match graph.topology() {
        Topology::Bipartite { n } if v >= *n => format!("v{}'", v - n + 1),
        Topology::Bipartite { .. } => format!("v{}", v + 1),
        _ => format!("{v}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    #[test]
    fn bipartite_two_indexing() {
        let g = WeightedGraph::bipartite(2).unwrap();
        assert_eq!(g.edge_count(), 4);
        let mut seen = Vec::new();
        g.for_each_edge(|e, u, v| seen.push((e, u, v)));
        assert_eq!(seen, vec![(0, 0, 2), (1, 0, 3), (2, 1, 2), (3, 1, 3)]);
        assert_eq!(vertex_label(&g, 3), "v2'");
        assert_eq!(vertex_label(&g, 0), "v1");
    }

    #[test]
    fn complete_four_has_six_edges() {
        let g = WeightedGraph::complete(4).unwrap();
        assert_eq!(g.edge_count(), 6);
        let mut seen = Vec::new();
        g.for_each_edge(|e, u, v| seen.push((e, u, v)));
        assert_eq!(seen[5], (5, 2, 3));
    }

    #[test]
    fn complete_endpoints_roundtrip() {
        for n in 2..12 {
            let g = WeightedGraph::complete(n).unwrap();
            g.for_each_edge(|e, u, v| {
                assert_eq!(g.endpoints(e), (u, v));
                assert_eq!(g.edge_between(u, v), Some(e));
                assert_eq!(g.edge_between(v, u), Some(e));
            });
        }
    }

    #[test]
    fn incident_lists_agree_with_edges() {
        for g in [
            WeightedGraph::bipartite(4).unwrap(),
            WeightedGraph::complete(5).unwrap(),
            WeightedGraph::explicit(4, vec![(0, 1), (2, 1), (3, 0)]).unwrap(),
        ] {
            let mut total = 0;
            for v in 0..g.vertex_count() {
                let mut count = 0;
                g.for_each_incident(v, |e, w| {
                    let (a, b) = g.endpoints(e);
                    assert!((a, b) == (v, w) || (a, b) == (w, v));
                    count += 1;
                });
                assert_eq!(count, g.degree(v));
                total += count;
            }
            assert_eq!(total, 2 * g.edge_count());
        }
    }

    #[test]
    fn explicit_single_edge() {
        let g = WeightedGraph::explicit(2, vec![(0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_between(1, 0), Some(0));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(WeightedGraph::bipartite(0), Err(Error::EmptyGraph));
        assert_eq!(WeightedGraph::complete(0), Err(Error::EmptyGraph));
        assert_eq!(
            WeightedGraph::explicit(3, vec![(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        );
        assert_eq!(WeightedGraph::explicit(3, vec![(1, 1)]), Err(Error::SelfLoop(1)));
        assert!(matches!(
            WeightedGraph::bipartite_with_budget(100, 1000),
            Err(Error::OverBudget { .. })
        ));
        assert!(matches!(WeightedGraph::bipartite(5000), Err(Error::OverBudget { .. })));
    }

    #[test]
    fn cost_validation() {
        let g = WeightedGraph::bipartite(1).unwrap();
        assert!(g.costs().is_err());
        assert!(g.clone().with_costs(vec![0.0]).is_err());
        assert!(g.clone().with_costs(vec![1.0, 2.0]).is_err());
        assert!(g.clone().with_costs(vec![f64::INFINITY]).is_err());
        assert!(g.with_costs(vec![0.5]).is_ok());
    }

    #[test]
    fn sampled_costs_scale() {
        let mut a = WeightedGraph::bipartite(3).unwrap();
        let mut b = a.clone();
        a.sample_costs(&mut derive_stream(1, 2), CostScale::UnitMean);
        b.sample_costs(&mut derive_stream(1, 2), CostScale::MeanN);
        for (x, y) in a.costs().unwrap().iter().zip(b.costs().unwrap()) {
            assert_eq!(x * 3.0, *y);
            assert!(*x > 0.0);
        }
    }

    #[test]
    fn vertex_removal_relabels() {
        let g = WeightedGraph::bipartite(2)
            .unwrap()
            .with_costs(vec![0.3, 0.1, 0.2, 0.4])
            .unwrap();
        let (h, map) = g.without_vertex(0).unwrap();
        assert_eq!(map, vec![1, 2, 3]);
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.costs().unwrap(), &[0.2, 0.4]);
    }
}
