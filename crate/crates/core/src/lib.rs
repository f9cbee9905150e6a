//! Stable matchings on complete bipartite and complete graphs with i.i.d.
//! exponential edge costs.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature; the only difference is where floating point intrinsics come from.
//!
//! Layout:
//!
//! * [`graph`], [`matching`], [`descending`], [`oracle`]: finite weighted
//!   graphs, the greedy and mutual-favourites constructions, stability checks,
//!   descending subgraphs and brute-force enumeration.
//! * [`cost_process`]: exact `O(n)` samplers for the matching cost process and
//!   closed-form moments and limit laws.
//! * [`pwit`]: truncated Poisson weighted infinite trees and the limiting rank.
//! * [`perturbation`]: resampling a fraction of edge costs and the overlap,
//!   tail and correlation experiments built on it.
//! * [`rng`], [`stats`], [`special`]: reproducible streams, estimators and the
//!   special functions everything above relies on.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is how NaN arguments get rejected along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

extern crate alloc;

pub mod cost_process;
pub mod descending;
pub mod error;
pub mod graph;
pub mod matching;
mod math;
pub mod oracle;
pub mod perturbation;
pub mod profile;
pub mod pwit;
pub mod rng;
pub mod special;
pub mod stats;
mod sweep;

pub use error::{Error, Result};
pub use graph::{CostScale, EdgeId, Topology, VertexId, WeightedGraph};
pub use matching::{GreedyRun, Matching, UnstablePair};
pub use profile::CostProfile;
pub use rng::{derive_stream, RngStream, StreamFamily};
