//! Undirected interconnect graphs: circulants, the reference topologies they
//! are compared against, and Cartesian products.
//!
//! A [`Topology`] is immutable once built. Alongside its adjacency it keeps
//! how it was made ([`Kind`]), the jump set when the graph is a circulant,
//! and the flattened list of factors when it is a product. Product vertices
//! use mixed-radix numbering with the rightmost factor least significant, so
//! in `a × b` the pair `(u, v)` is vertex `u·|b| + v`.

mod grammar;
mod jumps;

use std::io::Write;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};

pub use grammar::parse_spec;
pub use jumps::{jump_space, JumpSet, JumpSpace};

/// How a topology was constructed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kind {
    Ring(usize),
    Complete(usize),
    Circulant(JumpSet),
    Hypercube(usize),
    Torus(Vec<usize>),
    /// Product operands in construction order; never nested.
    Product(Vec<Kind>),
    Custom,
}

#[derive(Debug, Clone)]
pub struct Topology {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    kind: Kind,
    circulant: Option<JumpSet>,
    factors: Vec<Arc<Topology>>,
    vertex_symmetric: bool,
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.offsets == other.offsets && self.targets == other.targets
    }
}

impl Eq for Topology {}

impl Topology {
    fn from_adjacency(adj: Vec<Vec<u32>>, kind: Kind) -> Self {
        let n = adj.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        offsets.push(0);
        for mut list in adj {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        Topology {
            n,
            offsets,
            targets,
            kind,
            circulant: None,
            factors: Vec::new(),
            vertex_symmetric: false,
        }
    }

    /// Arbitrary simple graph from an edge list. Duplicate edges are merged;
    /// self-loops and out-of-range endpoints are errors.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTopology("empty vertex set".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidTopology(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::InvalidTopology(format!("self-loop at {u}")));
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        Ok(Self::from_adjacency(adj, Kind::Custom))
    }

    /// The one-vertex graph, identity of the Cartesian product.
    pub fn singleton() -> Self {
        let mut t = Self::from_adjacency(vec![Vec::new()], Kind::Custom);
        t.vertex_symmetric = true;
        t
    }

    pub fn circulant(js: &JumpSet) -> Self {
        Self::circulant_with_kind(js, Kind::Circulant(js.clone()))
    }

    fn circulant_with_kind(js: &JumpSet, kind: Kind) -> Self {
        let n = js.n();
        let adj = (0..n)
            .map(|i| {
                js.jumps()
                    .iter()
                    .flat_map(|&s| [((i + s) % n) as u32, ((i + n - s) % n) as u32])
                    .collect()
            })
            .collect();
        let mut t = Self::from_adjacency(adj, kind);
        t.circulant = Some(js.clone());
        t.vertex_symmetric = true;
        t
    }

    pub fn ring(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidTopology(format!("ring needs at least 3 vertices, got {m}")));
        }
        let js = JumpSet::new(m, [1])?;
        Ok(Self::circulant_with_kind(&js, Kind::Ring(m)))
    }

    pub fn complete(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidTopology(format!("complete graph needs at least 2 vertices, got {m}")));
        }
        let js = JumpSet::new(m, 1..=m / 2)?;
        Ok(Self::circulant_with_kind(&js, Kind::Complete(m)))
    }

    pub fn hypercube(d: usize) -> Result<Self> {
        if d == 0 || d > 24 {
            return Err(Error::InvalidTopology(format!("hypercube dimension {d} outside [1, 24]")));
        }
        let edge = Arc::new(Self::complete(2)?);
        let n = 1usize << d;
        let adj = (0..n)
            .map(|v| (0..d).map(|b| (v ^ (1 << b)) as u32).collect())
            .collect();
        let mut t = Self::from_adjacency(adj, Kind::Hypercube(d));
        t.factors = vec![edge; d];
        t.vertex_symmetric = true;
        Ok(t)
    }

    /// Iterated product of rings, first dimension most significant.
    pub fn torus(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidTopology("torus needs at least one dimension".into()));
        }
        let mut t = Self::ring(dims[0])?;
        for &d in &dims[1..] {
            t = Self::cartesian_product(&t, &Self::ring(d)?);
        }
        if dims.len() == 1 {
            t.factors = vec![Arc::new(t.clone())];
        }
        t.kind = Kind::Torus(dims.to_vec());
        Ok(t)
    }

    pub fn cartesian_product(a: &Topology, b: &Topology) -> Topology {
        let nb = b.n;
        let adj = (0..a.n * b.n)
            .map(|x| {
                let (u, v) = (x / nb, x % nb);
                a.neighbors(u)
                    .iter()
                    .map(|&u2| (u2 as usize * nb + v) as u32)
                    .chain(b.neighbors(v).iter().map(|&v2| (u * nb + v2 as usize) as u32))
                    .collect()
            })
            .collect();
        let operands: Vec<Kind> = [a, b]
            .iter()
            .flat_map(|t| match &t.kind {
                Kind::Product(ops) => ops.clone(),
                other => vec![other.clone()],
            })
            .collect();
        let mut t = Self::from_adjacency(adj, Kind::Product(operands));
        t.factors = a.leaf_factors().chain(b.leaf_factors()).collect();
        t.vertex_symmetric = a.vertex_symmetric && b.vertex_symmetric;
        t
    }

    fn leaf_factors(&self) -> Box<dyn Iterator<Item = Arc<Topology>> + '_> {
        if self.factors.is_empty() {
            Box::new(std::iter::once(Arc::new(self.clone())))
        } else {
            Box::new(self.factors.iter().cloned())
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Jump set when the graph is a circulant (rings and complete graphs included).
    pub fn circulant_jumps(&self) -> Option<&JumpSet> {
        self.circulant.as_ref()
    }

    /// Leaf factors of a product, leftmost (most significant) first. Empty
    /// for graphs that are not products.
    pub fn factors(&self) -> &[Arc<Topology>] {
        &self.factors
    }

    pub fn is_product(&self) -> bool {
        !self.factors.is_empty()
    }

    pub fn is_vertex_symmetric(&self) -> bool {
        self.vertex_symmetric
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.neighbors(v).len()).max().unwrap_or(0)
    }

    /// Common degree when the graph is regular.
    pub fn degree(&self) -> Option<usize> {
        let d = self.neighbors(0).len();
        (0..self.n).all(|v| self.neighbors(v).len() == d).then_some(d)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Index of the directed link `u -> v` in `0..2·|E|`.
    pub fn link_index(&self, u: usize, v: usize) -> Option<usize> {
        self.neighbors(u)
            .binary_search(&(v as u32))
            .ok()
            .map(|p| self.offsets[u] + p)
    }

    /// Directed links `(u, v)` in link-index order.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v as usize)))
    }

    /// Undirected edges with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.links().filter(|&(u, v)| u < v)
    }

    /// One `u v` pair per line, zero-based, `u < v`, sorted.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    /// Spec string accepted by [`parse_spec`], when the construction has one.
    pub fn spec(&self) -> Option<String> {
        kind_spec(&self.kind)
    }

    /// `{n, kind, params}` descriptor used in reports.
    pub fn descriptor(&self) -> Value {
        kind_descriptor(&self.kind, self.n)
    }

    /// Human-readable label in `(n,k)` notation, factors largest first.
    pub fn label(&self) -> String {
        match &self.kind {
            Kind::Hypercube(d) => format!("Hypercube {d}D"),
            Kind::Torus(dims) => {
                let mut dims = dims.clone();
                dims.sort_unstable_by(|a, b| b.cmp(a));
                let parts: Vec<String> = dims.iter().map(|d| format!("({d},2)")).collect();
                format!("Torus {}D {}", dims.len(), parts.join("×"))
            }
            Kind::Product(ops) => {
                let mut parts: Vec<(usize, String)> = ops.iter().map(kind_label).collect();
                parts.sort_by(|a, b| b.0.cmp(&a.0));
                parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join("×")
            }
            other => kind_label(other).1,
        }
    }
}

fn kind_label(kind: &Kind) -> (usize, String) {
    match kind {
        Kind::Ring(m) => (*m, format!("({m},2)")),
        Kind::Complete(m) => (*m, format!("({m},{})", m - 1)),
        Kind::Circulant(js) => (js.n(), format!("({},{})", js.n(), js.degree())),
        Kind::Hypercube(d) => (1 << d, format!("Hypercube {d}D")),
        Kind::Torus(dims) => {
            let parts: Vec<String> = dims.iter().map(|d| format!("({d},2)")).collect();
            (dims.iter().product(), parts.join("×"))
        }
        Kind::Product(ops) => {
            let parts: Vec<(usize, String)> = ops.iter().map(kind_label).collect();
            (
                parts.iter().map(|p| p.0).product(),
                parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join("×"),
            )
        }
        Kind::Custom => (0, "custom".into()),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn kind_spec(kind: &Kind) -> Option<String> {
    Some(match kind {
        Kind::Ring(m) => format!("ring:{m}"),
        Kind::Complete(m) => format!("complete:{m}"),
        Kind::Circulant(js) => format!("circulant:{}:{}", js.n(), join(js.jumps())),
        Kind::Hypercube(d) => format!("hypercube:{d}"),
        Kind::Torus(dims) => format!("torus:{}", join(dims)),
        Kind::Product(ops) => {
            let parts: Option<Vec<String>> = ops.iter().map(kind_spec).collect();
            format!("product:{}", parts?.join("*"))
        }
        Kind::Custom => return None,
    })
}

fn kind_descriptor(kind: &Kind, n: usize) -> Value {
    let (name, params) = match kind {
        Kind::Ring(m) => ("ring", json!({ "m": m })),
        Kind::Complete(m) => ("complete", json!({ "m": m })),
        Kind::Circulant(js) => ("circulant", json!({ "jumps": js.jumps() })),
        Kind::Hypercube(d) => ("hypercube", json!({ "d": d })),
        Kind::Torus(dims) => ("torus", json!({ "dims": dims })),
        Kind::Product(ops) => {
            let factors: Vec<Value> = ops
                .iter()
                .map(|k| kind_descriptor(k, kind_label(k).0))
                .collect();
            ("product", json!({ "factors": factors }))
        }
        Kind::Custom => ("custom", json!({})),
    };
    json!({ "n": n, "kind": name, "params": params })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected_simple(t: &Topology) -> bool {
        (0..t.n()).all(|u| {
            let nb = t.neighbors(u);
            nb.windows(2).all(|w| w[0] < w[1])
                && nb.iter().all(|&v| v as usize != u && t.has_edge(v as usize, u))
        })
    }

    #[test]
    fn circulant_examples() {
        let t = Topology::circulant(&JumpSet::new(16, [1, 6]).unwrap());
        assert_eq!(t.degree(), Some(4));
        assert_eq!(t.neighbors(0), &[1, 6, 10, 15]);

        let k5 = Topology::circulant(&JumpSet::new(5, [1, 2]).unwrap());
        assert_eq!(k5.edge_count(), 10);

        let c8 = Topology::circulant(&JumpSet::new(8, [1]).unwrap());
        assert_eq!(c8.degree(), Some(2));
        assert_eq!(c8, Topology::ring(8).unwrap());
    }

    #[test]
    fn half_jump_contributes_one_edge() {
        let t = Topology::circulant(&JumpSet::new(32, [1, 6, 16]).unwrap());
        assert_eq!(t.degree(), Some(5));
        assert!(undirected_simple(&t));
    }

    #[test]
    fn reference_topologies() {
        let h = Topology::hypercube(5).unwrap();
        assert_eq!((h.n(), h.degree()), (32, Some(5)));
        assert_eq!(h.factors().len(), 5);

        let t = Topology::torus(&[8, 4]).unwrap();
        assert_eq!((t.n(), t.degree()), (32, Some(4)));
        assert_eq!(t.factors().len(), 2);

        let k4 = Topology::complete(4).unwrap();
        assert_eq!(k4.degree(), Some(3));
        assert_eq!(k4.edge_count(), 6);

        assert!(Topology::ring(2).is_err());
        assert!(Topology::complete(1).is_err());
        assert!(Topology::hypercube(0).is_err());
        assert!(Topology::torus(&[8, 2]).is_err());
        for t in [h, t, k4] {
            assert!(undirected_simple(&t));
        }
    }

    #[test]
    fn hypercube_is_product_of_edges() {
        let k2 = Topology::complete(2).unwrap();
        let mut p = k2.clone();
        for _ in 1..4 {
            p = Topology::cartesian_product(&p, &k2);
        }
        assert_eq!(p, Topology::hypercube(4).unwrap());
    }

    #[test]
    fn product_examples() {
        let p = Topology::cartesian_product(&Topology::ring(8).unwrap(), &Topology::complete(4).unwrap());
        assert_eq!((p.n(), p.degree()), (32, Some(5)));
        assert!(p.is_vertex_symmetric());
        assert_eq!(p.label(), "(8,2)×(4,3)");
        // (1, 2) is vertex 1·4 + 2
        assert!(p.has_edge(6, 2) && p.has_edge(6, 10) && p.has_edge(6, 7));

        let a = Topology::torus(&[4, 3]).unwrap();
        let same = Topology::cartesian_product(&a, &Topology::singleton());
        assert_eq!(same, a);

        let big = Topology::cartesian_product(
            &Topology::circulant(&JumpSet::new(256, [1, 13, 33, 128]).unwrap()),
            &Topology::complete(4).unwrap(),
        );
        assert_eq!((big.n(), big.degree()), (1024, Some(10)));
        assert_eq!(big.label(), "(256,7)×(4,3)");
    }

    #[test]
    fn labels() {
        assert_eq!(Topology::torus(&[8, 4, 8]).unwrap().label(), "Torus 3D (8,2)×(8,2)×(4,2)");
        assert_eq!(Topology::hypercube(7).unwrap().label(), "Hypercube 7D");
        assert_eq!(Topology::circulant(&JumpSet::new(64, [1, 4, 25]).unwrap()).label(), "(64,6)");
    }

    #[test]
    fn edge_list_export() {
        let mut out = Vec::new();
        Topology::ring(4).unwrap().write_edge_list(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 1\n0 3\n1 2\n2 3\n");
    }

    #[test]
    fn from_edges_validation() {
        assert!(Topology::from_edges(3, [(0, 0)]).is_err());
        assert!(Topology::from_edges(3, [(0, 3)]).is_err());
        let t = Topology::from_edges(3, [(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(t.edge_count(), 2);
        assert_eq!(t.degree(), None);
        assert_eq!(t.spec(), None);
    }

    #[test]
    fn descriptor_shape() {
        let d = Topology::torus(&[8, 4]).unwrap().descriptor();
        assert_eq!(d["n"], 32);
        assert_eq!(d["kind"], "torus");
        assert_eq!(d["params"]["dims"], json!([8, 4]));
    }
}
