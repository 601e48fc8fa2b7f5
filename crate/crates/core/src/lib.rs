//! Design and analysis of circulant interconnect topologies.

pub mod combinatorics;
pub mod error;
pub mod metrics;
pub mod report;
pub mod routing;
pub mod search;
pub mod topology;
pub mod traffic;

pub use error::{Error, Result};
