//! Subgraphs spanned by descending paths.
//!
//! `D_v(G, s)` is the union of all paths from `v` whose edge costs strictly
//! decrease and stay below `s`. A vertex first reached through an edge of
//! cost `t` may continue along any edge cheaper than `t`; if it is reachable
//! in several ways only the largest such `t` matters, so vertices are
//! expanded in decreasing order of their best incoming cost.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId, WeightedGraph};

#[derive(Clone, Debug, PartialEq)]
pub struct DescendingSubgraph {
    pub root: VertexId,
    pub ceiling: f64,
    /// Vertices in expansion order; the root comes first.
    pub vertices: Vec<VertexId>,
    /// Edges of the parent graph, sorted by index.
    pub edges: Vec<EdgeId>,
}

struct Pending(f64, VertexId);

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

pub fn descending_subgraph(graph: &WeightedGraph, v: VertexId, s: f64) -> Result<DescendingSubgraph> {
    let costs = graph.costs()?;
    let count = graph.vertex_count();
    if v >= count {
        return Err(Error::VertexOutOfRange { vertex: v, count });
    }
    if !(s > 0.0) {
        return Err(Error::OutOfRange { what: "ceiling", value: s });
    }
    // Best threshold found so far; NaN marks "not reached".
    let mut best = vec![f64::NAN; count];
    let mut done = vec![false; count];
    let mut heap = BinaryHeap::new();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    best[v] = s;
    heap.push(Pending(s, v));
    while let Some(Pending(t, x)) = heap.pop() {
        if done[x] || t != best[x] {
            continue;
        }
        done[x] = true;
        vertices.push(x);
        graph.for_each_incident(x, |e, w| {
            let c = costs[e];
            if c < t {
                edges.push(e);
                if !done[w] && !(best[w] >= c) {
                    best[w] = c;
                    heap.push(Pending(c, w));
                }
            }
        });
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(DescendingSubgraph {
        root: v,
        ceiling: s,
        vertices,
        edges,
    })
}

impl DescendingSubgraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// The subgraph as a standalone explicit graph with the parent's costs.
    /// Vertex `i` of the result is `vertices[i]`, so the root is vertex 0.
    pub fn to_explicit(&self, graph: &WeightedGraph) -> Result<WeightedGraph> {
        let costs = graph.costs()?;
        let mut index = alloc::collections::BTreeMap::new();
        for (i, &x) in self.vertices.iter().enumerate() {
            index.insert(x, i);
        }
        let mut list = Vec::with_capacity(self.edges.len());
        let mut kept = Vec::with_capacity(self.edges.len());
        for &e in &self.edges {
            let (a, b) = graph.endpoints(e);
            list.push((index[&a], index[&b]));
            kept.push(costs[e]);
        }
        WeightedGraph::explicit(self.vertices.len(), list)?.with_costs(kept)
    }
}
