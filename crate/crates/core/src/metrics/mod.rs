//! Diameter, mean path length and bisection width.
//!
//! Mean path length is the mean hop distance over ordered pairs of distinct
//! vertices. Distances are accumulated as exact integers and the mean is
//! kept as a rational, so comparisons never go through floating point.

mod bfs;
pub mod bisection;
mod bitset;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::Topology;

pub use bfs::bfs_distances;
pub use bisection::{
    bisection_exact, bisection_from_partition, bisection_heuristic, cut_size, parse_partition, Bisection,
    DEFAULT_EXACT_LIMIT, DEFAULT_RESTARTS,
};
pub use bitset::{CirculantBfs, Profile};

/// Distance summary of a connected topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStats {
    pub n: usize,
    pub diameter: u32,
    /// Sum of hop distances over all ordered vertex pairs.
    pub total: u64,
}

impl PathStats {
    /// Distance total per source vertex (an integer on vertex-symmetric graphs).
    pub fn dist_sum(&self) -> Ratio<u64> {
        Ratio::new(self.total, self.n as u64)
    }

    pub fn mpl(&self) -> Ratio<u64> {
        if self.n < 2 {
            return Ratio::from_integer(0);
        }
        Ratio::new(self.total, (self.n * (self.n - 1)) as u64)
    }
}

/// Diameter and distance total. A vertex-symmetric topology needs a single
/// BFS from vertex 0; otherwise every vertex is used as a source.
pub fn diameter_mpl(t: &Topology) -> Result<PathStats> {
    let n = t.n();
    if t.is_vertex_symmetric() {
        let d = bfs_distances(t, 0)?;
        let diameter = d.iter().copied().max().unwrap_or(0);
        let sum: u64 = d.iter().map(|&x| x as u64).sum();
        return Ok(PathStats { n, diameter, total: sum * n as u64 });
    }
    all_sources(t)
}

/// Diameter and distance total from BFS at every source, ignoring any
/// symmetry tag.
pub fn all_sources(t: &Topology) -> Result<PathStats> {
    let n = t.n();
    let per_source: Vec<Result<(u32, u64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![u32::MAX; n], bfs::Scratch::new(n)),
            |(dist, scratch), s| {
                dist.fill(u32::MAX);
                if bfs::bfs_into(t, s, dist, scratch) < n {
                    let reachable = (0..n as u32).filter(|&v| dist[v as usize] != u32::MAX).collect();
                    return Err(Error::Disconnected { n, reachable });
                }
                Ok((dist.iter().copied().max().unwrap_or(0), dist.iter().map(|&x| x as u64).sum()))
            },
        )
        .collect();
    let mut diameter = 0;
    let mut total = 0;
    for r in per_source {
        let (d, s) = r?;
        diameter = diameter.max(d);
        total += s;
    }
    Ok(PathStats { n, diameter, total })
}

/// Knobs for computing bisection width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisectionConfig {
    /// Largest vertex count solved exactly.
    pub exact_limit: usize,
    /// Random starts for the heuristic.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        BisectionConfig { exact_limit: DEFAULT_EXACT_LIMIT, restarts: DEFAULT_RESTARTS, seed: 0 }
    }
}

/// Exact when `n` is within the limit, heuristic otherwise. `None` for odd
/// `n`, where no strictly balanced split exists.
pub fn bisection_width(t: &Topology, cfg: &BisectionConfig) -> Result<Option<Bisection>> {
    if t.n() % 2 == 1 {
        return Ok(None);
    }
    let b = if t.n() <= cfg.exact_limit {
        bisection_exact(t, cfg.exact_limit)?
    } else {
        bisection_heuristic(t, cfg.restarts, cfg.seed)?
    };
    Ok(Some(b))
}

/// All three properties of one topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsRecord {
    pub n: usize,
    /// Maximum vertex degree (the degree, for regular graphs).
    pub degree: usize,
    pub diameter: u32,
    /// Distance total over ordered pairs; `dist_sum = total / n`.
    pub total: u64,
    pub bisection: Option<usize>,
    pub bisection_exact: bool,
}

impl MetricsRecord {
    pub fn from_parts(t: &Topology, stats: PathStats, bisection: Option<&Bisection>) -> Self {
        MetricsRecord {
            n: t.n(),
            degree: t.max_degree(),
            diameter: stats.diameter,
            total: stats.total,
            bisection: bisection.map(|b| b.width),
            bisection_exact: bisection.is_some_and(|b| b.exact),
        }
    }

    pub fn stats(&self) -> PathStats {
        PathStats { n: self.n, diameter: self.diameter, total: self.total }
    }

    pub fn dist_sum(&self) -> Ratio<u64> {
        self.stats().dist_sum()
    }

    pub fn mpl(&self) -> Ratio<u64> {
        self.stats().mpl()
    }

    pub fn mpl_f64(&self) -> f64 {
        ratio_f64(self.mpl())
    }
}

pub(crate) fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Wire form: `{n, degree, diameter, dist_sum, mpl, bisection, bisection_exact}`.
/// `dist_sum` is an integer whenever the per-source total is integral.
impl Serialize for MetricsRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("MetricsRecord", 7)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("diameter", &self.diameter)?;
        let ds = self.dist_sum();
        if ds.is_integer() {
            st.serialize_field("dist_sum", &ds.to_integer())?;
        } else {
            st.serialize_field("dist_sum", &ratio_f64(ds))?;
        }
        st.serialize_field("mpl", &self.mpl_f64())?;
        st.serialize_field("bisection", &self.bisection)?;
        st.serialize_field("bisection_exact", &self.bisection_exact)?;
        st.end()
    }
}

/// Diameter, MPL and bisection width of `t`.
pub fn analyze(t: &Topology, cfg: &BisectionConfig) -> Result<MetricsRecord> {
    let stats = diameter_mpl(t)?;
    let b = bisection_width(t, cfg)?;
    Ok(MetricsRecord::from_parts(t, stats, b.as_ref()))
}
