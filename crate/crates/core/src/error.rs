use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph size must be at least 1")]
    EmptyGraph,
    #[error("graph with {edges} edges exceeds the budget of {budget} edges")]
    OverBudget { edges: usize, budget: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("self loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("edge costs have not been set")]
    CostsUnset,
    #[error("expected {expected} edge costs, got {got}")]
    CostCount { expected: usize, got: usize },
    #[error("edge {edge} has invalid cost {cost}; costs must be positive and finite")]
    InvalidCost { edge: usize, cost: f64 },
    #[error("({0}, {1}) is not an edge of the graph")]
    NotAnEdge(usize, usize),
    #[error("vertex {0} appears in more than one matching edge")]
    VertexReused(usize),
    #[error("matching does not belong to this graph")]
    ForeignMatching,
    #[error("graph too large for exhaustive enumeration")]
    TooLargeForOracle,
    #[error("rate must be positive and finite, got {0}")]
    InvalidRate(f64),
    #[error("complete graph with odd n = {0} requires allow_odd")]
    OddComplete(usize),
    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("sample is empty")]
    EmptySample,
    #[error("need at least {need} observations, got {got}")]
    TooFewObservations { need: usize, got: usize },
    #[error("zero variance in a correlation coordinate")]
    ZeroVariance,
    #[error("tree sample hit the node cap and cannot be matched")]
    TruncatedTree,
    #[error("exponential integral routes disagree: quadrature {quadrature}, series {series}")]
    QuadratureMismatch { quadrature: f64, series: f64 },
}
