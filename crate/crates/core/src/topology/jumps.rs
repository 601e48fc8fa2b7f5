use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{Combination, CombinationCount, Space};
use crate::error::{Error, Result};

/// Generator set of a circulant graph on `n` vertices: vertex `i` is joined
/// to `i ± s (mod n)` for every jump `s`.
///
/// Jumps are kept sorted and lie in `[1, n/2]`. When `n` is even the jump
/// `n/2` contributes a single edge per vertex, every other jump two.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JumpSet {
    n: usize,
    jumps: Vec<usize>,
}

impl JumpSet {
    /// Builds a jump set, sorting the input. Duplicates and jumps outside
    /// `[1, n/2]` are rejected.
    pub fn new(n: usize, jumps: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut jumps: Vec<usize> = jumps.into_iter().collect();
        jumps.sort_unstable();
        if n == 0 {
            return Err(Error::InvalidJumpSet("vertex count must be positive".into()));
        }
        if let Some(w) = jumps.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidJumpSet(format!("jump {} repeated", w[0])));
        }
        if let Some(&s) = jumps.iter().find(|&&s| s == 0 || s > n / 2) {
            return Err(Error::InvalidJumpSet(format!(
                "jump {s} outside [1, {}] for n = {n}",
                n / 2
            )));
        }
        Ok(JumpSet { n, jumps })
    }

    pub(crate) fn from_sorted_unchecked(n: usize, jumps: Vec<usize>) -> Self {
        debug_assert!(jumps.windows(2).all(|w| w[0] < w[1]));
        JumpSet { n, jumps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn jumps(&self) -> &[usize] {
        &self.jumps
    }

    /// True when `s` is the antipodal jump `n/2` of an even `n`.
    pub fn is_half_jump(&self, s: usize) -> bool {
        self.n.is_multiple_of(2) && s * 2 == self.n
    }

    pub fn degree(&self) -> usize {
        self.jumps
            .iter()
            .map(|&s| if self.is_half_jump(s) { 1 } else { 2 })
            .sum()
    }

    /// Connectivity test: a circulant is connected iff `gcd(n, S) = 1`.
    pub fn is_connected(&self) -> bool {
        self.jumps.iter().fold(self.n, |g, &s| g.gcd(&s)) == 1
    }

    /// Image of the jump set under the vertex map `v -> u·v (mod n)`; the
    /// resulting circulant is isomorphic to this one.
    pub fn adam_multiply(&self, u: usize) -> Result<JumpSet> {
        let n = self.n;
        if u.gcd(&n) != 1 {
            return Err(Error::NotAUnit { u, n });
        }
        let mut jumps: Vec<usize> = self
            .jumps
            .iter()
            .map(|&s| {
                let m = (u % n) * s % n;
                m.min(n - m)
            })
            .collect();
        jumps.sort_unstable();
        Ok(JumpSet { n, jumps })
    }

    /// Lexicographically smallest jump set among all multiplier images.
    /// Two jump sets with equal canonical forms describe isomorphic graphs.
    pub fn adam_canonical(&self) -> JumpSet {
        (1..self.n.max(2))
            .filter(|u| u.gcd(&self.n) == 1)
            .map(|u| self.adam_multiply(u).expect("u is a unit"))
            .min()
            .unwrap_or_else(|| self.clone())
    }
}

impl fmt::Display for JumpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.jumps.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Shape of the search space for degree-`k` circulants on `n` vertices:
/// jumps that are always present plus a free choice of `free.r` jumps from
/// `[free.lo, free.hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpSpace {
    pub n: usize,
    pub k: usize,
    pub fixed: Vec<usize>,
    pub free: Space,
    /// Whether jump 1 was fixed in through the multiplier reduction.
    pub reduced: bool,
}

impl JumpSpace {
    pub fn count(&self) -> Result<CombinationCount> {
        self.free.count()
    }

    /// Fixed jumps merged with a free choice, as a sorted jump set.
    pub fn assemble(&self, choice: &Combination) -> JumpSet {
        let mut jumps = Vec::with_capacity(self.fixed.len() + choice.elements().len());
        self.assemble_into(choice.elements(), &mut jumps);
        JumpSet::from_sorted_unchecked(self.n, jumps)
    }

    pub(crate) fn assemble_into(&self, choice: &[u32], out: &mut Vec<usize>) {
        out.clear();
        out.extend_from_slice(&self.fixed);
        out.extend(choice.iter().map(|&c| c as usize));
        out.sort_unstable();
    }
}

/// Search-space shape for `(n, k)`.
///
/// For odd `k` the jump `n/2` is always present. With `reduced` set and `n`
/// a power of two, some jump must be odd (hence a unit) for the graph to be
/// connected, and multiplying by its inverse maps it to 1, so jump 1 is
/// fixed and the remaining jumps are drawn from `[2, (n-1)/2]`.
pub fn jump_space(n: usize, k: usize, reduced: bool) -> Result<JumpSpace> {
    if k < 3 {
        return Err(Error::InfeasibleDegree { n, k, reason: "degree must be at least 3" });
    }
    if k >= n {
        return Err(Error::InfeasibleDegree { n, k, reason: "degree must be below n" });
    }
    if k % 2 == 1 && n % 2 == 1 {
        return Err(Error::InfeasibleDegree {
            n,
            k,
            reason: "odd degree needs an even vertex count",
        });
    }
    let reduced = reduced && n.is_power_of_two();
    let mut fixed = Vec::new();
    let mut free_count = k / 2;
    let mut lo = 1;
    if reduced {
        fixed.push(1);
        free_count -= 1;
        lo = 2;
    }
    if k % 2 == 1 {
        fixed.push(n / 2);
    }
    let hi = (n - 1) / 2;
    Ok(JumpSpace {
        n,
        k,
        fixed,
        free: Space::new(lo as u32, hi as u32, free_count),
        reduced,
    })
}
