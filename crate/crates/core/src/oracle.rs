//! Brute-force references for small graphs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{key_less, EdgeId, Topology, VertexId, WeightedGraph};
use crate::matching::{is_stable, GreedyRun, Matching};
use crate::profile::CostProfile;

pub const MAX_BIPARTITE_N: usize = 8;
pub const MAX_COMPLETE_N: usize = 8;
pub const MAX_EXPLICIT_VERTICES: usize = 16;

/// Every maximal matching of `graph`, as edge lists sorted by index.
///
/// On `K_{n,n}` and `K_n` the maximal matchings are exactly the matchings
/// of size `⌊n/2⌋` (resp. `n`), so those are enumerated directly.
pub fn maximal_matchings(graph: &WeightedGraph) -> Result<Vec<Vec<EdgeId>>> {
    let count = graph.vertex_count();
    let too_large = match graph.topology() {
        Topology::Bipartite { n } => *n > MAX_BIPARTITE_N,
        Topology::Complete { n } => *n > MAX_COMPLETE_N,
        Topology::Explicit { .. } => count > MAX_EXPLICIT_VERTICES,
    };
    if too_large {
        return Err(Error::TooLargeForOracle);
    }
    let mut out = Vec::new();
    let mut used = vec![false; count];
    let mut current = Vec::new();
    match graph.topology() {
        Topology::Explicit { .. } => {
            let mut slots = vec![Slot::Open; count];
            explicit_rec(graph, 0, &mut slots, &mut current, &mut out)
        }
        _ => {
            // In K_n with n odd exactly one vertex is skipped.
            let skips = count % 2 == 1 && matches!(graph.topology(), Topology::Complete { .. });
            clique_rec(graph, 0, skips, &mut used, &mut current, &mut out)
        }
    }
    for m in &mut out {
        m.sort_unstable();
    }
    Ok(out)
}

fn clique_rec(
    graph: &WeightedGraph,
    from: VertexId,
    skips: bool,
    used: &mut [bool],
    current: &mut Vec<EdgeId>,
    out: &mut Vec<Vec<EdgeId>>,
) {
    let Some(v) = (from..used.len()).find(|&v| !used[v]) else {
        out.push(current.clone());
        return;
    };
    if let Topology::Bipartite { n } = graph.topology() {
        if v >= *n {
            // every left vertex is matched
            out.push(current.clone());
            return;
        }
    }
    used[v] = true;
    if skips {
        clique_rec(graph, v + 1, false, used, current, out);
    }
    let mut partners = Vec::new();
    graph.for_each_incident(v, |e, w| {
        if !used[w] {
            partners.push((e, w));
        }
    });
    for (e, w) in partners {
        used[w] = true;
        current.push(e);
        clique_rec(graph, v + 1, skips, used, current, out);
        current.pop();
        used[w] = false;
    }
    used[v] = false;
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Open,
    Matched,
    Free,
}

fn explicit_rec(
    graph: &WeightedGraph,
    from: VertexId,
    slots: &mut [Slot],
    current: &mut Vec<EdgeId>,
    out: &mut Vec<Vec<EdgeId>>,
) {
    let Some(v) = (from..slots.len()).find(|&v| slots[v] == Slot::Open) else {
        // Maximal iff no edge joins two free vertices.
        let mut maximal = true;
        graph.for_each_edge(|_, a, b| maximal &= slots[a] != Slot::Free || slots[b] != Slot::Free);
        if maximal {
            out.push(current.clone());
        }
        return;
    };
    let mut partners = Vec::new();
    graph.for_each_incident(v, |e, w| {
        if slots[w] == Slot::Open {
            partners.push((e, w));
        }
    });
    slots[v] = Slot::Matched;
    for (e, w) in partners {
        slots[w] = Slot::Matched;
        current.push(e);
        explicit_rec(graph, v + 1, slots, current, out);
        current.pop();
        slots[w] = Slot::Open;
    }
    slots[v] = Slot::Free;
    explicit_rec(graph, v + 1, slots, current, out);
    slots[v] = Slot::Open;
}

/// All stable matchings of `graph`, by filtering every maximal matching.
pub fn enumerate_stable_oracle(graph: &WeightedGraph) -> Result<Vec<Matching>> {
    let costs = graph.costs()?;
    let mut stable = Vec::new();
    for edges in maximal_matchings(graph)? {
        let mut m = Matching::empty(graph.vertex_count());
        for e in edges {
            let (u, v) = graph.endpoints(e);
            m.insert(e, u, v, costs[e]);
        }
        if is_stable(graph, &m)?.is_none() {
            stable.push(m);
        }
    }
    Ok(stable)
}

/// Step-and-erase greedy: find the globally cheapest remaining edge by a
/// full scan, match it, erase both endpoints, repeat. Quadratic per step;
/// a reference for the sweep implementation.
pub fn step_and_erase(graph: &WeightedGraph) -> Result<GreedyRun> {
    let costs = graph.costs()?;
    let count = graph.vertex_count();
    let mut erased = vec![false; count];
    let mut matching = Matching::empty(count);
    let mut profile = Vec::new();
    loop {
        let mut best: Option<(f64, EdgeId, VertexId, VertexId)> = None;
        graph.for_each_edge(|e, u, v| {
            if erased[u] || erased[v] {
                return;
            }
            let c = costs[e];
            if best.is_none_or(|(bc, be, _, _)| key_less(c, e, bc, be)) {
                best = Some((c, e, u, v));
            }
        });
        let Some((c, e, u, v)) = best else { break };
        matching.insert(e, u, v, c);
        profile.push(c);
        erased[u] = true;
        erased[v] = true;
    }
    Ok(GreedyRun {
        matching,
        profile: CostProfile::new(profile),
    })
}
