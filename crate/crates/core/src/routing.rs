//! Static shortest-path routing tables.
//!
//! Circulants get a shift-generated table: one BFS tree from vertex 0 gives
//! the first hop towards every destination, and the hop from `i` towards
//! `d` is that of `0` towards `d - i`, shifted by `i`. Products (tori and
//! hypercubes included) use dimension-order routing, correcting the
//! rightmost factor coordinate first, each factor along its own routes.
//! Anything else falls back to per-destination BFS.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::bfs_distances;
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    VertexSymmetric,
    DimensionOrder,
    ShortestPath,
}

/// `next_hop[s·n + d]` is the neighbour of `s` on the route to `d`; the
/// diagonal holds `s` itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingTable {
    n: usize,
    scheme: Scheme,
    next_hop: Vec<u32>,
}

impl RoutingTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn next_hop(&self, s: usize, d: usize) -> usize {
        self.next_hop[s * self.n + d] as usize
    }

    /// Vertex sequence from `s` to `d`, both included; `[s]` when `s == d`.
    pub fn path(&self, s: usize, d: usize) -> Vec<usize> {
        let mut p = vec![s];
        let mut cur = s;
        while cur != d {
            cur = self.next_hop(cur, d);
            p.push(cur);
            debug_assert!(p.len() <= self.n, "routing loop from {s} to {d}");
        }
        p
    }

    /// Number of hops from `s` to `d`.
    pub fn hops(&self, s: usize, d: usize) -> usize {
        let mut cur = s;
        let mut h = 0;
        while cur != d {
            cur = self.next_hop(cur, d);
            h += 1;
        }
        h
    }

    /// `{scheme, n, rows}` with one next-hop array per source.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<&[u32]> = self.next_hop.chunks(self.n).collect();
        serde_json::json!({ "scheme": self.scheme, "n": self.n, "rows": rows })
    }
}

/// First hop from 0 to every vertex along the BFS tree in which each vertex
/// hangs off its smallest-index predecessor.
fn first_hops_from_zero(t: &Topology) -> Result<Vec<u32>> {
    let dist = bfs_distances(t, 0)?;
    let mut order: Vec<usize> = (0..t.n()).collect();
    order.sort_by_key(|&v| (dist[v], v));
    let mut first = vec![0u32; t.n()];
    for v in order.into_iter().skip(1) {
        let parent = t
            .neighbors(v)
            .iter()
            .map(|&u| u as usize)
            .find(|&u| dist[u] + 1 == dist[v])
            .expect("BFS predecessor exists");
        first[v] = if parent == 0 { v as u32 } else { first[parent] };
    }
    Ok(first)
}

/// Shift-generated table for a circulant.
pub fn circulant_routes(t: &Topology) -> Result<RoutingTable> {
    if t.circulant_jumps().is_none() {
        return Err(Error::Routing("vertex-symmetric routing needs a circulant".into()));
    }
    let n = t.n();
    let first = first_hops_from_zero(t)?;
    let mut next_hop = vec![0u32; n * n];
    for s in 0..n {
        let row = &mut next_hop[s * n..(s + 1) * n];
        for (d, slot) in row.iter_mut().enumerate() {
            let rel = (d + n - s) % n;
            *slot = if rel == 0 { s as u32 } else { ((first[rel] as usize + s) % n) as u32 };
        }
    }
    Ok(RoutingTable { n, scheme: Scheme::VertexSymmetric, next_hop })
}

/// Dimension-order table for a product topology.
pub fn dimension_order_routes(t: &Topology) -> Result<RoutingTable> {
    if !t.is_product() {
        return Err(Error::Routing("dimension-order routing needs a product topology".into()));
    }
    let factors = t.factors();
    let tables: Vec<RoutingTable> = factors.iter().map(|f| factor_routes(f)).collect::<Result<_>>()?;
    let sizes: Vec<usize> = factors.iter().map(|f| f.n()).collect();
    let mut strides = vec![1usize; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sizes[i + 1];
    }
    let n = t.n();
    let mut next_hop = vec![0u32; n * n];
    for s in 0..n {
        for d in 0..n {
            let mut hop = s;
            // rightmost factor first
            for f in (0..sizes.len()).rev() {
                let (cs, cd) = ((s / strides[f]) % sizes[f], (d / strides[f]) % sizes[f]);
                if cs != cd {
                    let step = tables[f].next_hop(cs, cd);
                    hop = s - cs * strides[f] + step * strides[f];
                    break;
                }
            }
            next_hop[s * n + d] = hop as u32;
        }
    }
    Ok(RoutingTable { n, scheme: Scheme::DimensionOrder, next_hop })
}

fn factor_routes(f: &Topology) -> Result<RoutingTable> {
    if f.circulant_jumps().is_some() {
        circulant_routes(f)
    } else {
        shortest_path_routes(f)
    }
}

/// Generic table: towards each destination, step to the smallest-index
/// neighbour that is one hop closer.
pub fn shortest_path_routes(t: &Topology) -> Result<RoutingTable> {
    let n = t.n();
    let mut next_hop = vec![0u32; n * n];
    for d in 0..n {
        let dist = bfs_distances(t, d)?;
        for s in 0..n {
            next_hop[s * n + d] = if s == d {
                s as u32
            } else {
                *t.neighbors(s)
                    .iter()
                    .find(|&&u| dist[u as usize] + 1 == dist[s])
                    .expect("neighbour closer to destination")
            };
        }
    }
    Ok(RoutingTable { n, scheme: Scheme::ShortestPath, next_hop })
}

/// The table the topology's structure calls for.
pub fn routes_for(t: &Topology) -> Result<RoutingTable> {
    if t.circulant_jumps().is_some() {
        circulant_routes(t)
    } else if t.is_product() {
        dimension_order_routes(t)
    } else {
        shortest_path_routes(t)
    }
}
