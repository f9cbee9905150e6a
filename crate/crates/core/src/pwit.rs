//! Truncated Poisson weighted infinite trees and the limiting rank.
//!
//! The truncation `D_0(T, s)` keeps the root's children with cost below `s`
//! and, below them, every child cheaper than the edge leading to its parent.
//! Nodes are stored in breadth-first order and the children of a node are
//! contiguous and sorted by cost, so child `j` of a node is the `j`-th
//! arrival of its Poisson process.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::matching::general_greedy;
use crate::math;
use crate::rng::RngStream;

pub const DEFAULT_NODE_CAP: usize = 10_000_000;
pub const DEFAULT_J_MAX: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct PwitTree {
    ceiling: f64,
    /// Incoming edge cost; `+∞` at the root.
    cost: Vec<f64>,
    parent: Vec<u32>,
    depth: Vec<u32>,
    first_child: Vec<u32>,
    child_count: Vec<u32>,
    capped: bool,
}

impl PwitTree {
    pub fn ceiling(&self) -> f64 {
        self.ceiling
    }

    pub fn len(&self) -> usize {
        self.cost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cost.is_empty()
    }

    /// True when generation stopped at the node cap.
    pub fn capped(&self) -> bool {
        self.capped
    }

    pub fn cost(&self, node: usize) -> f64 {
        self.cost[node]
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        (node > 0).then(|| self.parent[node] as usize)
    }

    pub fn depth(&self, node: usize) -> u32 {
        self.depth[node]
    }

    pub fn children(&self, node: usize) -> core::ops::Range<usize> {
        let start = self.first_child[node] as usize;
        start..start + self.child_count[node] as usize
    }

    /// Number of nodes at each depth, starting with the root.
    pub fn depth_counts(&self) -> Vec<u64> {
        let mut counts = Vec::new();
        for &d in &self.depth {
            let d = d as usize;
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += 1;
        }
        counts
    }

    /// Nodes in preorder (root, then each child's subtree in cost order).
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::from([0usize]);
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.children(v).rev());
        }
        out
    }

    /// The tree as an explicit graph; edge `i - 1` joins node `i` to its
    /// parent.
    pub fn to_graph(&self) -> Result<WeightedGraph> {
        let edges = (1..self.len()).map(|v| (self.parent[v] as usize, v)).collect();
        let costs = self.cost[1..].to_vec();
        if costs.is_empty() {
            return WeightedGraph::explicit(1, Vec::new());
        }
        WeightedGraph::explicit(self.len(), edges)?.with_costs(costs)
    }
}

/// Samples `D_0(T, s)`. Children of the root are the unit-rate Poisson
/// arrivals on `[0, s)`; a node reached at cost `t` gets the arrivals on
/// `[0, t)`. Generation stops with the cap flag set once `node_cap` nodes
/// exist and more would be needed.
pub fn sample_descending_tree(s: f64, node_cap: usize, rng: &mut RngStream) -> Result<PwitTree> {
    if !(s > 0.0) {
        return Err(Error::OutOfRange { what: "ceiling", value: s });
    }
    if node_cap == 0 {
        return Err(Error::OutOfRange { what: "node cap", value: 0.0 });
    }
    let mut tree = PwitTree {
        ceiling: s,
        cost: Vec::from([f64::INFINITY]),
        parent: Vec::from([0]),
        depth: Vec::from([0]),
        first_child: Vec::new(),
        child_count: Vec::new(),
        capped: false,
    };
    let mut v = 0;
    while v < tree.len() {
        let limit = if v == 0 { s } else { tree.cost[v] };
        let start = tree.len();
        let mut t = 0.0;
        loop {
            t += rng.standard_exp();
            if t >= limit {
                break;
            }
            if tree.len() == node_cap {
                tree.capped = true;
                break;
            }
            tree.cost.push(t);
            tree.parent.push(v as u32);
            tree.depth.push(tree.depth[v] + 1);
        }
        tree.first_child.push(start as u32);
        tree.child_count.push((tree.len() - start) as u32);
        if tree.capped {
            break;
        }
        v += 1;
    }
    // Nodes never expanded after a cap get empty child ranges.
    let len = tree.len() as u32;
    tree.first_child.resize(tree.len(), len);
    tree.child_count.resize(tree.len(), 0);
    Ok(tree)
}

/// Root's fate in the stable matching.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOutcome {
    /// `W_0`; `+∞` when the root is unmatched.
    pub cost: f64,
    /// Position of the partner among the root's children, 1-based.
    pub rank: Option<u32>,
}

impl RootOutcome {
    pub const UNMATCHED: RootOutcome = RootOutcome {
        cost: f64::INFINITY,
        rank: None,
    };

    pub fn matched(&self) -> bool {
        self.rank.is_some()
    }
}

/// Root outcome from the mutual-favourites construction on the whole
/// truncated tree.
pub fn root_match_on_truncation(tree: &PwitTree) -> Result<RootOutcome> {
    if tree.capped {
        return Err(Error::TruncatedTree);
    }
    if tree.len() == 1 {
        return Ok(RootOutcome::UNMATCHED);
    }
    let graph = tree.to_graph()?;
    let matching = general_greedy(&graph)?;
    Ok(match matching.partner(0) {
        None => RootOutcome::UNMATCHED,
        Some(child) => RootOutcome {
            cost: tree.cost[child],
            rank: Some((child - tree.first_child[0] as usize + 1) as u32),
        },
    })
}

/// Root outcome from the bottom-up recursion: a node is matched to its
/// cheapest child `c` whose own subtree matching cost exceeds the edge
/// to `c`.
pub fn root_match_recursive(tree: &PwitTree) -> Result<RootOutcome> {
    if tree.capped {
        return Err(Error::TruncatedTree);
    }
    let mut w = alloc::vec![f64::INFINITY; tree.len()];
    let mut rank = None;
    for v in (0..tree.len()).rev() {
        for (j, c) in tree.children(v).enumerate() {
            if tree.cost[c] < w[c] {
                w[v] = tree.cost[c];
                if v == 0 {
                    rank = Some(j as u32 + 1);
                }
                break;
            }
        }
    }
    Ok(RootOutcome { cost: w[0], rank })
}

/// `R = min{j : T_j ≤ W_j}` for given arrival times and `W_j`, 1-based.
pub fn first_rank(arrivals: &[f64], w: &[f64]) -> Option<usize> {
    arrivals.iter().zip(w).position(|(t, w)| t <= w).map(|j| j + 1)
}

/// One draw of the limiting rank. `T_j` are unit-rate Poisson arrivals and
/// `W_j = U/(1-U)` independent with distribution `x/(1+x)`. `None` when no
/// `j ≤ j_max` qualifies.
pub fn sample_limit_rank(rng: &mut RngStream, j_max: u64) -> Option<u64> {
    let mut t = 0.0;
    for j in 1..=j_max {
        t += rng.standard_exp();
        let u = rng.uniform();
        // T ≤ U/(1-U)  ⇔  T(1-U) ≤ U
        if t * (1.0 - u) <= u {
            return Some(j);
        }
    }
    None
}

/// One row of the rank tail table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankRow {
    pub r: u32,
    /// `P(R ≥ r) = E[Π_{j<r} F_W(T_j)]`.
    pub p_ge: f64,
    pub se_ge: f64,
    /// `P(R > r) = E[Π_{j≤r} F_W(T_j)]`.
    pub p_gt: f64,
    pub se_gt: f64,
    /// `E[1/(1+T_r)]`.
    pub inverse_arrival: f64,
    pub se_inverse_arrival: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankReference {
    /// `P(R = 1) = e·E1(1)` by quadrature.
    pub p_one: f64,
    pub reps: u64,
    pub rows: Vec<RankRow>,
}

/// Reference values for the limiting rank. `P(R = 1)` is exact; the tail
/// rows are Monte Carlo averages over `reps` arrival sequences.
pub fn rank_reference(r_max: u32, reps: u64, rng: &mut RngStream) -> Result<RankReference> {
    if r_max == 0 {
        return Err(Error::OutOfRange { what: "r_max", value: 0.0 });
    }
    if reps < 2 {
        return Err(Error::TooFewObservations { need: 2, got: reps as usize });
    }
    let r_max = r_max as usize;
    // Running sums and sums of squares of Π_{j≤r} F_W(T_j) and 1/(1+T_r).
    let mut prod_sum = alloc::vec![0.0; r_max + 1];
    let mut prod_sq = alloc::vec![0.0; r_max + 1];
    let mut inv_sum = alloc::vec![0.0; r_max + 1];
    let mut inv_sq = alloc::vec![0.0; r_max + 1];
    for _ in 0..reps {
        let mut t = 0.0;
        let mut prod = 1.0;
        for r in 1..=r_max {
            t += rng.standard_exp();
            let inv = 1.0 / (1.0 + t);
            prod *= t * inv;
            prod_sum[r] += prod;
            prod_sq[r] += prod * prod;
            inv_sum[r] += inv;
            inv_sq[r] += inv * inv;
        }
    }
    let n = reps as f64;
    let est = |sum: f64, sq: f64| {
        let mean = sum / n;
        let var = ((sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
        (mean, math::sqrt(var / n))
    };
    let mut rows = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let (p_ge, se_ge) = if r == 1 {
            (1.0, 0.0)
        } else {
            est(prod_sum[r - 1], prod_sq[r - 1])
        };
        let (p_gt, se_gt) = est(prod_sum[r], prod_sq[r]);
        let (inverse_arrival, se_inverse_arrival) = est(inv_sum[r], inv_sq[r]);
        rows.push(RankRow {
            r: r as u32,
            p_ge,
            se_ge,
            p_gt,
            se_gt,
            inverse_arrival,
            se_inverse_arrival,
        });
    }
    Ok(RankReference {
        p_one: crate::special::rank_one_probability(),
        reps,
        rows,
    })
}
