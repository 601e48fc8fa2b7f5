//! Flow-level load evaluation: every flow follows its single static route
//! and adds its demand to each directed link on the way.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::routing::RoutingTable;
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flow {
    pub src: usize,
    pub dst: usize,
    pub demand: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternKind {
    AllToAll,
    RandomPairs,
    RingShift,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrafficPattern {
    pub kind: PatternKind,
    pub flows: Vec<Flow>,
}

impl TrafficPattern {
    pub fn total_demand(&self) -> u64 {
        self.flows.iter().map(|f| f.demand).sum()
    }
}

/// One unit flow per ordered pair of distinct vertices.
pub fn pattern_all_to_all(n: usize) -> TrafficPattern {
    let flows = (0..n)
        .flat_map(|s| (0..n).filter(move |&d| d != s).map(move |d| Flow { src: s, dst: d, demand: 1 }))
        .collect();
    TrafficPattern { kind: PatternKind::AllToAll, flows }
}

/// `pairs` unit flows, each between two distinct uniformly drawn vertices.
pub fn pattern_random_pairs(n: usize, pairs: usize, seed: u64) -> Result<TrafficPattern> {
    if n < 2 {
        return Err(Error::InvalidTopology(format!("random pairs need at least 2 vertices, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flows = (0..pairs)
        .map(|_| {
            let src = rng.gen_range(0..n);
            // second endpoint from the remaining n - 1 vertices
            let mut dst = rng.gen_range(0..n - 1);
            if dst >= src {
                dst += 1;
            }
            Flow { src, dst, demand: 1 }
        })
        .collect();
    Ok(TrafficPattern { kind: PatternKind::RandomPairs, flows })
}

/// Unit flow `i -> (i + shift) mod n` for every vertex.
pub fn pattern_ring_shift(n: usize, shift: usize) -> Result<TrafficPattern> {
    if shift == 0 || shift >= n {
        return Err(Error::InvalidTopology(format!("shift {shift} outside [1, {n})")));
    }
    let flows = (0..n).map(|i| Flow { src: i, dst: (i + shift) % n, demand: 1 }).collect();
    Ok(TrafficPattern { kind: PatternKind::RingShift, flows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadReport {
    pub n: usize,
    pub links: usize,
    pub flows: usize,
    pub total_demand: u64,
    /// Sum over flows of demand × path length.
    pub demand_hops: u64,
    pub max_load: u64,
    pub mean_load: f64,
    /// Demand-weighted mean path length.
    pub mean_hops: f64,
    /// Total demand over the busiest link's load, in link-bandwidth units.
    pub eb_proxy: f64,
    #[serde(skip)]
    pub loads: Vec<((usize, usize), u64)>,
}

impl LoadReport {
    pub fn total_load(&self) -> u64 {
        self.loads.iter().map(|(_, l)| l).sum()
    }

    pub fn load(&self, u: usize, v: usize) -> Option<u64> {
        self.loads.iter().find(|(l, _)| *l == (u, v)).map(|(_, x)| *x)
    }

    /// `src,dst,load` rows with a header.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "src,dst,load")?;
        for ((u, v), l) in &self.loads {
            writeln!(w, "{u},{v},{l}")?;
        }
        Ok(())
    }
}

/// Routes every flow of `p` through `table` on `t` and accumulates loads.
pub fn evaluate(t: &Topology, table: &RoutingTable, p: &TrafficPattern) -> Result<LoadReport> {
    let n = t.n();
    if table.n() != n {
        return Err(Error::Routing(format!("table for {} vertices used on {n}", table.n())));
    }
    let mut load = vec![0u64; 2 * t.edge_count()];
    let mut demand_hops = 0u64;
    for f in &p.flows {
        for v in [f.src, f.dst] {
            if v >= n {
                return Err(Error::EndpointOutOfRange { vertex: v, n });
            }
        }
        let mut cur = f.src;
        while cur != f.dst {
            let next = table.next_hop(cur, f.dst);
            let link = t
                .link_index(cur, next)
                .ok_or_else(|| Error::Routing(format!("next hop {cur} -> {next} is not a link")))?;
            load[link] += f.demand;
            demand_hops += f.demand;
            cur = next;
        }
    }
    let total_demand = p.total_demand();
    let max_load = load.iter().copied().max().unwrap_or(0);
    let total_load: u64 = load.iter().sum();
    Ok(LoadReport {
        n,
        links: load.len(),
        flows: p.flows.len(),
        total_demand,
        demand_hops,
        max_load,
        mean_load: if load.is_empty() { 0.0 } else { total_load as f64 / load.len() as f64 },
        mean_hops: if total_demand == 0 { 0.0 } else { demand_hops as f64 / total_demand as f64 },
        eb_proxy: if max_load == 0 { 0.0 } else { total_demand as f64 / max_load as f64 },
        loads: t.links().zip(load).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::routes_for;

    #[test]
    fn pattern_sizes() {
        assert_eq!(pattern_all_to_all(4).flows.len(), 12);
        assert_eq!(pattern_all_to_all(2).flows.len(), 2);
        assert_eq!(pattern_all_to_all(9).total_demand(), 72);
        let r = pattern_ring_shift(8, 1).unwrap();
        assert!(r.flows.iter().all(|f| f.dst == (f.src + 1) % 8));
        assert!(pattern_ring_shift(8, 4).unwrap().flows.iter().all(|f| (f.dst + 8 - f.src) % 8 == 4));
        assert_eq!(pattern_ring_shift(8, 3).unwrap().total_demand(), 8);
        assert!(pattern_ring_shift(8, 8).is_err());
    }

    #[test]
    fn random_pairs_are_reproducible() {
        let a = pattern_random_pairs(8, 3, 7).unwrap();
        assert_eq!(a, pattern_random_pairs(8, 3, 7).unwrap());
        let big = pattern_random_pairs(1024, 1024, 1).unwrap();
        assert_eq!(big.flows.len(), 1024);
        assert!(big.flows.iter().all(|f| f.src != f.dst && f.dst < 1024));
    }

    #[test]
    fn complete_graph_all_to_all() {
        let t = Topology::complete(4).unwrap();
        let r = evaluate(&t, &routes_for(&t).unwrap(), &pattern_all_to_all(4)).unwrap();
        assert!(r.loads.iter().all(|(_, l)| *l == 1));
        assert_eq!(r.eb_proxy, 12.0);
    }

    #[test]
    fn ring4_all_to_all() {
        // Every antipodal flow i -> i+2 goes through i+1, so each +1 link
        // carries one adjacent flow and two antipodal ones; -1 links carry one.
        let t = Topology::ring(4).unwrap();
        let r = evaluate(&t, &routes_for(&t).unwrap(), &pattern_all_to_all(4)).unwrap();
        assert_eq!(r.max_load, 3);
        assert_eq!(r.total_load(), 16);
        assert_eq!(r.demand_hops, 16);
        assert_eq!(r.load(0, 1), Some(3));
        assert_eq!(r.load(1, 0), Some(1));
    }

    #[test]
    fn out_of_range_endpoint() {
        let t = Topology::ring(4).unwrap();
        let p = TrafficPattern { kind: PatternKind::RingShift, flows: vec![Flow { src: 0, dst: 4, demand: 1 }] };
        assert!(matches!(
            evaluate(&t, &routes_for(&t).unwrap(), &p),
            Err(Error::EndpointOutOfRange { vertex: 4, n: 4 })
        ));
    }

    #[test]
    fn csv_output() {
        let t = Topology::ring(3).unwrap();
        let r = evaluate(&t, &routes_for(&t).unwrap(), &pattern_ring_shift(3, 1).unwrap()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "src,dst,load\n0,1,1\n0,2,0\n1,0,0\n1,2,1\n2,0,1\n2,1,0\n");
    }
}
