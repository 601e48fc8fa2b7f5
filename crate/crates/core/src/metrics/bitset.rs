//! Packed bit arrays and the shift-based breadth-first search used on
//! circulants.
//!
//! On a circulant the neighbourhood of a vertex set `F` is the union of the
//! cyclic rotations of `F` by `±s` for every jump `s`, so a whole BFS level
//! is a handful of word-wide shifts, an and-not against the visited set and
//! a popcount.

use num_integer::Integer;

use crate::topology::JumpSet;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn get(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

#[inline]
pub(crate) fn set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

/// `dst |= src << s` over bit arrays of equal length; bits shifted past the
/// end are dropped.
fn shl_or(dst: &mut [u64], src: &[u64], s: usize) {
    let (ws, bs) = (s / 64, s % 64);
    for i in (ws..dst.len()).rev() {
        let j = i - ws;
        let mut w = src[j] << bs;
        if bs != 0 && j > 0 {
            w |= src[j - 1] >> (64 - bs);
        }
        dst[i] |= w;
    }
}

/// `dst |= src >> s`.
fn shr_or(dst: &mut [u64], src: &[u64], s: usize) {
    let (ws, bs) = (s / 64, s % 64);
    let len = src.len();
    for i in 0..len.saturating_sub(ws) {
        let j = i + ws;
        let mut w = src[j] >> bs;
        if bs != 0 && j + 1 < len {
            w |= src[j + 1] << (64 - bs);
        }
        dst[i] |= w;
    }
}

/// `dst |= rotate(src, s)` on an `n`-bit cyclic array: bit `i` of `src`
/// lands on bit `(i + s) mod n`. Requires `0 < s < n` and `src` clear above
/// bit `n`; `dst` may pick up junk above bit `n`, callers mask it.
fn rotl_or(dst: &mut [u64], src: &[u64], s: usize, n: usize) {
    shl_or(dst, src, s);
    shr_or(dst, src, n - s);
}

/// Outcome of a single-source profile on a circulant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Eccentricity of every vertex and the distance total from one vertex.
    Connected { diameter: u32, dist_sum: u64 },
    Disconnected,
    /// Stopped early: provably worse than the bound in `(diameter, dist_sum)` order.
    Pruned,
}

/// Reusable scratch space for profiling many circulants of one order.
#[derive(Debug, Clone)]
pub struct CirculantBfs {
    n: usize,
    mask: u64,
    visited: Vec<u64>,
    frontier: Vec<u64>,
    next: Vec<u64>,
    /// distinct nonzero rotation amounts (s and n - s per jump)
    shifts: Vec<usize>,
}

impl CirculantBfs {
    pub fn new(n: usize) -> Self {
        let w = words_for(n);
        let mask = if n.is_multiple_of(64) { u64::MAX } else { (1u64 << (n % 64)) - 1 };
        CirculantBfs {
            n,
            mask,
            visited: vec![0; w],
            frontier: vec![0; w],
            next: vec![0; w],
            shifts: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn profile_jumps(&mut self, js: &JumpSet) -> Profile {
        debug_assert_eq!(js.n(), self.n);
        self.profile(js.jumps(), None)
    }

    /// Level-synchronous BFS from vertex 0. With a `bound`, gives up as soon
    /// as the result is certain to be strictly worse than it in
    /// lexicographic `(diameter, dist_sum)` order; ties are never pruned.
    pub fn profile(&mut self, jumps: &[usize], bound: Option<(u32, u64)>) -> Profile {
        let n = self.n;
        if n == 1 {
            return Profile::Connected { diameter: 0, dist_sum: 0 };
        }
        if jumps.iter().fold(n, |g, &s| g.gcd(&s)) != 1 {
            return Profile::Disconnected;
        }
        self.shifts.clear();
        for &s in jumps {
            self.shifts.push(s);
            if 2 * s != n {
                self.shifts.push(n - s);
            }
        }
        if n <= 64 {
            self.profile_word(bound)
        } else {
            self.profile_words(bound)
        }
    }

    fn profile_word(&mut self, bound: Option<(u32, u64)>) -> Profile {
        let n = self.n;
        let mask = self.mask;
        let rot = |x: u64, s: usize| -> u64 {
            if n == 64 {
                x.rotate_left(s as u32)
            } else {
                ((x << s) | (x >> (n - s))) & mask
            }
        };
        let mut visited: u64 = 1;
        let mut frontier: u64 = 1;
        let mut reached = 1usize;
        let mut level = 0u32;
        let mut sum = 0u64;
        while reached < n {
            let mut next = 0u64;
            for &s in &self.shifts {
                next |= rot(frontier, s);
            }
            next &= !visited;
            if next == 0 {
                return Profile::Disconnected;
            }
            level += 1;
            let c = next.count_ones() as usize;
            reached += c;
            sum += c as u64 * level as u64;
            visited |= next;
            frontier = next;
            if let Some(b) = bound {
                if reached < n && prune(b, level, sum, n - reached) {
                    return Profile::Pruned;
                }
            }
        }
        Profile::Connected { diameter: level, dist_sum: sum }
    }

    fn profile_words(&mut self, bound: Option<(u32, u64)>) -> Profile {
        let n = self.n;
        let last = self.visited.len() - 1;
        self.visited.fill(0);
        self.frontier.fill(0);
        self.visited[0] = 1;
        self.frontier[0] = 1;
        let mut reached = 1usize;
        let mut level = 0u32;
        let mut sum = 0u64;
        while reached < n {
            self.next.fill(0);
            for &s in &self.shifts {
                rotl_or(&mut self.next, &self.frontier, s, n);
            }
            self.next[last] &= self.mask;
            let mut c = 0usize;
            for (nx, v) in self.next.iter_mut().zip(&mut self.visited) {
                *nx &= !*v;
                *v |= *nx;
                c += nx.count_ones() as usize;
            }
            if c == 0 {
                return Profile::Disconnected;
            }
            level += 1;
            reached += c;
            sum += c as u64 * level as u64;
            std::mem::swap(&mut self.frontier, &mut self.next);
            if let Some(b) = bound {
                if reached < n && prune(b, level, sum, n - reached) {
                    return Profile::Pruned;
                }
            }
        }
        Profile::Connected { diameter: level, dist_sum: sum }
    }
}

/// After finishing `level` with `remaining` vertices unreached, every one of
/// them sits at distance `>= level + 1`.
#[inline]
fn prune((best_d, best_sum): (u32, u64), level: u32, sum: u64, remaining: usize) -> bool {
    let min_d = level + 1;
    if min_d > best_d {
        return true;
    }
    // Only once the diameter can no longer drop below best_d does the
    // distance total decide.
    min_d == best_d && sum + remaining as u64 * min_d as u64 > best_sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_rotate(bits: &[bool], s: usize) -> Vec<bool> {
        let n = bits.len();
        let mut out = vec![false; n];
        for i in 0..n {
            out[(i + s) % n] = bits[i];
        }
        out
    }

    #[test]
    fn rotation_matches_naive() {
        for n in [5usize, 63, 64, 65, 100, 128, 130, 200] {
            let bits: Vec<bool> = (0..n).map(|i| (i * 7 + i / 3) % 5 < 2).collect();
            let mut packed = vec![0u64; words_for(n)];
            for (i, &b) in bits.iter().enumerate() {
                if b {
                    set(&mut packed, i);
                }
            }
            for s in 1..n {
                let mut dst = vec![0u64; words_for(n)];
                rotl_or(&mut dst, &packed, s, n);
                let expect = naive_rotate(&bits, s);
                for i in 0..n {
                    assert_eq!(get(&dst, i), expect[i], "n={n} s={s} i={i}");
                }
            }
        }
    }

    #[test]
    fn ring_profile() {
        let mut bfs = CirculantBfs::new(8);
        assert_eq!(bfs.profile(&[1], None), Profile::Connected { diameter: 4, dist_sum: 16 });
        let mut bfs = CirculantBfs::new(200);
        assert_eq!(
            bfs.profile(&[1], None),
            Profile::Connected { diameter: 100, dist_sum: 2 * (1..100).sum::<u64>() + 100 }
        );
    }

    #[test]
    fn disconnected_and_pruned() {
        let mut bfs = CirculantBfs::new(8);
        assert_eq!(bfs.profile(&[2, 4], None), Profile::Disconnected);
        let mut bfs = CirculantBfs::new(32);
        let exact = bfs.profile(&[1, 7], None);
        assert_eq!(exact, Profile::Connected { diameter: 4, dist_sum: 84 });
        // equal bound is a tie, never pruned
        assert_eq!(bfs.profile(&[1, 7], Some((4, 84))), exact);
        assert_eq!(bfs.profile(&[1, 7], Some((4, 83))), Profile::Pruned);
        assert_eq!(bfs.profile(&[1, 7], Some((3, 1000))), Profile::Pruned);
        assert_eq!(bfs.profile(&[1, 2], Some((4, 84))), Profile::Pruned);
    }
}
