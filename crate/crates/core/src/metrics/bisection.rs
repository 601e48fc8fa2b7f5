//! Strictly balanced bisection: exact branch and bound for small graphs, a
//! multi-start Kernighan–Lin/Fiduccia–Mattheyses refinement for large ones,
//! and validation of partitions produced elsewhere.

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::bfs::bfs_into;
use super::bfs::Scratch;
use crate::error::{Error, Result};
use crate::topology::Topology;

pub const DEFAULT_EXACT_LIMIT: usize = 32;
pub const DEFAULT_RESTARTS: usize = 64;

/// A balanced two-way split and the number of edges it cuts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bisection {
    pub width: usize,
    /// `true` when `width` is proven minimal, `false` for an upper bound.
    pub exact: bool,
    /// Side of each vertex; exactly half the entries are `true`.
    pub part: Vec<bool>,
}

pub fn cut_size(t: &Topology, part: &[bool]) -> usize {
    t.edges().filter(|&(u, v)| part[u] != part[v]).count()
}

fn require_even(t: &Topology) -> Result<()> {
    if t.n() % 2 == 1 {
        return Err(Error::OddVertexCount(t.n()));
    }
    Ok(())
}

/// Minimum balanced cut by exhaustive branch and bound over bipartitions
/// that keep vertex 0 on the first side.
pub fn bisection_exact(t: &Topology, limit: usize) -> Result<Bisection> {
    require_even(t)?;
    if t.n() > limit {
        return Err(Error::ExactLimitExceeded { n: t.n(), limit });
    }
    let start = bisection_heuristic(t, 8, 0)?;
    let mut bb = BranchAndBound::new(t, start.width, start.part);
    bb.search(0);
    Ok(Bisection { width: bb.best, exact: true, part: bb.best_part })
}

struct BranchAndBound<'a> {
    t: &'a Topology,
    order: Vec<usize>,
    side: Vec<i8>,
    // assigned neighbours of each vertex on side 0 / side 1
    nb: [Vec<u32>; 2],
    count: [usize; 2],
    cut: usize,
    // sum over unassigned vertices of min(nb0, nb1)
    floor: usize,
    best: usize,
    best_part: Vec<bool>,
}

impl<'a> BranchAndBound<'a> {
    fn new(t: &'a Topology, best: usize, best_part: Vec<bool>) -> Self {
        let n = t.n();
        // BFS order makes the partial cut grow early.
        let mut dist = vec![u32::MAX; n];
        let mut scratch = Scratch::new(n);
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            bfs_into(t, root, &mut dist, &mut scratch);
            let mut comp: Vec<usize> = (0..n).filter(|&v| !seen[v] && dist[v] != u32::MAX).collect();
            comp.sort_by_key(|&v| (dist[v], v));
            for &v in &comp {
                seen[v] = true;
            }
            order.extend(comp);
            dist.fill(u32::MAX);
        }
        BranchAndBound {
            t,
            order,
            side: vec![-1; n],
            nb: [vec![0; n], vec![0; n]],
            count: [0, 0],
            cut: 0,
            floor: 0,
            best,
            best_part,
        }
    }

    fn assign(&mut self, v: usize, s: usize) {
        let (a, b) = (self.nb[0][v] as usize, self.nb[1][v] as usize);
        self.floor -= a.min(b);
        self.cut += if s == 0 { b } else { a };
        self.side[v] = s as i8;
        self.count[s] += 1;
        for &w in self.t.neighbors(v) {
            let w = w as usize;
            if self.side[w] < 0 {
                let before = self.nb[0][w].min(self.nb[1][w]);
                self.nb[s][w] += 1;
                self.floor += (self.nb[0][w].min(self.nb[1][w]) - before) as usize;
            }
        }
    }

    fn unassign(&mut self, v: usize, s: usize) {
        for &w in self.t.neighbors(v) {
            let w = w as usize;
            if self.side[w] < 0 {
                let before = self.nb[0][w].min(self.nb[1][w]);
                self.nb[s][w] -= 1;
                self.floor -= (before - self.nb[0][w].min(self.nb[1][w])) as usize;
            }
        }
        self.side[v] = -1;
        self.count[s] -= 1;
        let (a, b) = (self.nb[0][v] as usize, self.nb[1][v] as usize);
        self.cut -= if s == 0 { b } else { a };
        self.floor += a.min(b);
    }

    fn search(&mut self, depth: usize) {
        let n = self.t.n();
        if depth == n {
            if self.cut < self.best {
                self.best = self.cut;
                self.best_part = self.side.iter().map(|&s| s == 1).collect();
            }
            return;
        }
        let v = self.order[depth];
        let sides: &[usize] = if depth == 0 { &[0] } else { &[0, 1] };
        for &s in sides {
            if self.count[s] == n / 2 {
                continue;
            }
            self.assign(v, s);
            if self.cut + self.floor < self.best {
                self.search(depth + 1);
            }
            self.unassign(v, s);
        }
    }
}

/// Best balanced cut found by local search: structured starting points
/// (multiplier relabelings of circulants, lifted factor cuts of products)
/// plus `restarts` random balanced starts, each refined by balanced
/// swap passes. Deterministic for a given `seed`.
pub fn bisection_heuristic(t: &Topology, restarts: usize, seed: u64) -> Result<Bisection> {
    require_even(t)?;
    let n = t.n();
    let mut starts: Vec<Vec<u8>> = structured_starts(t, restarts, seed);
    let random: Vec<Vec<u8>> = (0..restarts as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let mut side = vec![0u8; n];
            for &v in &perm[n / 2..] {
                side[v] = 1;
            }
            side
        })
        .collect();
    starts.extend(random);
    if starts.is_empty() {
        starts.push((0..n).map(|v| (v >= n / 2) as u8).collect());
    }
    let best = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, side)| {
            let (width, side) = refine(t, side);
            (width, i, side)
        })
        .min_by_key(|(w, i, _)| (*w, *i))
        .expect("at least one start");
    Ok(Bisection {
        width: best.0,
        exact: false,
        part: best.2.into_iter().map(|s| s == 1).collect(),
    })
}

fn structured_starts(t: &Topology, restarts: usize, seed: u64) -> Vec<Vec<u8>> {
    let n = t.n();
    let mut starts = Vec::new();
    if let Some(js) = t.circulant_jumps() {
        // Contiguous halves after relabelling v -> u·v; refine the best quarter.
        let mut scored: Vec<(usize, Vec<u8>)> = (1..=n / 2)
            .filter(|u| u.gcd(&n) == 1)
            .map(|u| {
                let side: Vec<u8> = (0..n).map(|v| ((u * v % n) >= n / 2) as u8).collect();
                (cut_of(t, &side), side)
            })
            .collect();
        debug_assert!(js.n() == n);
        scored.sort_by_key(|a| a.0);
        let keep = (scored.len() / 4).max(4);
        starts.extend(scored.into_iter().take(keep).map(|(_, s)| s));
    }
    if t.is_product() {
        let factors = t.factors();
        let mut stride = n;
        for f in factors {
            stride /= f.n();
            if f.n() % 2 != 0 {
                continue;
            }
            let Ok(fb) = bisection_heuristic(f, restarts.min(16), seed) else {
                continue;
            };
            let fsize = f.n();
            starts.push((0..n).map(|x| fb.part[(x / stride) % fsize] as u8).collect());
        }
    }
    starts
}

fn cut_of(t: &Topology, side: &[u8]) -> usize {
    t.edges().filter(|&(u, v)| side[u] != side[v]).count()
}

const NIL: u32 = u32::MAX;

/// Gain-bucket state for balanced swap passes.
struct Refiner<'a> {
    t: &'a Topology,
    offset: i32,
    side: Vec<u8>,
    gain: Vec<i32>,
    locked: Vec<bool>,
    head: [Vec<u32>; 2],
    next: Vec<u32>,
    prev: Vec<u32>,
    top: [i32; 2],
}

impl<'a> Refiner<'a> {
    fn new(t: &'a Topology, side: Vec<u8>) -> Self {
        let n = t.n();
        let maxdeg = t.max_degree() as i32;
        let buckets = (2 * maxdeg + 1) as usize;
        Refiner {
            t,
            offset: maxdeg,
            side,
            gain: vec![0; n],
            locked: vec![false; n],
            head: [vec![NIL; buckets], vec![NIL; buckets]],
            next: vec![NIL; n],
            prev: vec![NIL; n],
            top: [-1, -1],
        }
    }

    fn bucket(&self, v: usize) -> usize {
        (self.gain[v] + self.offset) as usize
    }

    fn insert(&mut self, v: usize) {
        let (s, b) = (self.side[v] as usize, self.bucket(v));
        let h = self.head[s][b];
        self.next[v] = h;
        self.prev[v] = NIL;
        if h != NIL {
            self.prev[h as usize] = v as u32;
        }
        self.head[s][b] = v as u32;
        self.top[s] = self.top[s].max(b as i32);
    }

    fn remove(&mut self, v: usize) {
        let (s, b) = (self.side[v] as usize, self.bucket(v));
        let (p, nx) = (self.prev[v], self.next[v]);
        if p != NIL {
            self.next[p as usize] = nx;
        } else {
            self.head[s][b] = nx;
        }
        if nx != NIL {
            self.prev[nx as usize] = p;
        }
    }

    fn pop_best(&mut self, s: usize) -> Option<usize> {
        while self.top[s] >= 0 {
            let h = self.head[s][self.top[s] as usize];
            if h != NIL {
                let v = h as usize;
                self.remove(v);
                return Some(v);
            }
            self.top[s] -= 1;
        }
        None
    }

    /// Flip a vertex already removed from the buckets and update its free
    /// neighbours' gains.
    fn flip(&mut self, v: usize) -> i32 {
        let g = self.gain[v];
        let old = self.side[v];
        self.side[v] = 1 - old;
        self.locked[v] = true;
        for i in 0..self.t.neighbors(v).len() {
            let w = self.t.neighbors(v)[i] as usize;
            if self.locked[w] {
                continue;
            }
            self.remove(w);
            self.gain[w] += if self.side[w] == old { 2 } else { -2 };
            self.insert(w);
        }
        g
    }

    /// One pass of tentative swaps; keeps the best prefix and returns the
    /// cut reduction it achieved.
    fn pass(&mut self) -> i32 {
        let n = self.t.n();
        for h in &mut self.head {
            h.fill(NIL);
        }
        self.top = [-1, -1];
        self.locked.fill(false);
        for v in 0..n {
            let s = self.side[v];
            self.gain[v] = self
                .t
                .neighbors(v)
                .iter()
                .map(|&w| if self.side[w as usize] == s { -1 } else { 1 })
                .sum();
            self.insert(v);
        }
        let mut moves = Vec::with_capacity(n / 2);
        let (mut total, mut best, mut best_len) = (0i32, 0i32, 0usize);
        for _ in 0..n / 2 {
            let Some(a) = self.pop_best(0) else { break };
            total += self.flip(a);
            let Some(b) = self.pop_best(1) else {
                // undo the unmatched half-swap
                self.side[a] = 0;
                break;
            };
            total += self.flip(b);
            moves.push((a, b));
            if total > best {
                best = total;
                best_len = moves.len();
            }
        }
        for &(a, b) in &moves[best_len..] {
            self.side[a] = 0;
            self.side[b] = 1;
        }
        best
    }
}

fn refine(t: &Topology, side: Vec<u8>) -> (usize, Vec<u8>) {
    let mut cut = cut_of(t, &side);
    let mut r = Refiner::new(t, side);
    for _ in 0..100 {
        let gain = r.pass();
        if gain <= 0 {
            break;
        }
        cut -= gain as usize;
    }
    debug_assert_eq!(cut, cut_of(t, &r.side));
    (cut, r.side)
}

/// Parses a two-line partition file (space-separated vertex lists) and
/// checks it is a strictly balanced, disjoint cover of `0..n`.
pub fn parse_partition(text: &str, n: usize) -> Result<Vec<bool>> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != 2 {
        return Err(Error::InvalidPartition(format!("expected 2 non-empty lines, found {}", lines.len())));
    }
    let mut seen = vec![None; n];
    for (side, line) in lines.iter().enumerate() {
        for tok in line.split_whitespace() {
            let v: usize = tok
                .parse()
                .map_err(|_| Error::InvalidPartition(format!("bad vertex {tok:?}")))?;
            if v >= n {
                return Err(Error::InvalidPartition(format!("vertex {v} out of range for n = {n}")));
            }
            if seen[v].replace(side).is_some() {
                return Err(Error::InvalidPartition(format!("vertex {v} listed twice")));
            }
        }
    }
    if let Some(v) = seen.iter().position(Option::is_none) {
        return Err(Error::InvalidPartition(format!("vertex {v} missing")));
    }
    let part: Vec<bool> = seen.into_iter().map(|s| s == Some(1)).collect();
    let ones = part.iter().filter(|&&b| b).count();
    if 2 * ones != n {
        return Err(Error::InvalidPartition(format!("unbalanced: {} vs {ones}", n - ones)));
    }
    Ok(part)
}

/// Cut of an externally computed partition, recomputed here.
pub fn bisection_from_partition(t: &Topology, text: &str) -> Result<Bisection> {
    let part = parse_partition(text, t.n())?;
    Ok(Bisection { width: cut_size(t, &part), exact: false, part })
}
