use thiserror::Error;

use crate::combinatorics::CombinationCount;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("binomial C({n}, {r}) overflows 128 bits")]
    Overflow { n: u64, r: u64 },

    #[error("invalid combination: {0}")]
    InvalidCombination(String),

    #[error("rank {rank} out of range (space holds {total} combinations)")]
    RankOutOfRange {
        rank: CombinationCount,
        total: CombinationCount,
    },

    #[error("no degree-{k} circulant on {n} vertices: {reason}")]
    InfeasibleDegree { n: usize, k: usize, reason: &'static str },

    #[error("invalid jump set: {0}")]
    InvalidJumpSet(String),

    #[error("{u} is not a unit modulo {n}")]
    NotAUnit { u: usize, n: usize },

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("graph is disconnected ({} of {n} vertices reachable)", reachable.len())]
    Disconnected { n: usize, reachable: Vec<u32> },

    #[error("strictly balanced bisection needs an even vertex count, got {0}")]
    OddVertexCount(usize),

    #[error("exact bisection refused for n = {n} (limit {limit}); use the heuristic")]
    ExactLimitExceeded { n: usize, limit: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("cannot merge results for different (n, k): {0}")]
    MixedResults(String),

    #[error("routing: {0}")]
    Routing(String),

    #[error("flow endpoint {vertex} out of range for {n} vertices")]
    EndpointOutOfRange { vertex: usize, n: usize },

    #[error("report: {0}")]
    Report(String),

    #[error("cannot parse topology spec {spec:?}: {reason}")]
    SpecParse { spec: String, reason: String },

    #[error("corrupt checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
