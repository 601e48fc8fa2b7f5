//! r-combinations of an integer range in co-lexicographic order.
//!
//! Combinations are compared by their largest element first, so over
//! `[1, 4]` with `r = 2` the order is `{1,2} {1,3} {2,3} {1,4} {2,4} {3,4}`.
//! The successor depends only on the current combination, and the rank of a
//! combination `c_0 < c_1 < ... < c_{r-1}` (shifted to start at zero) is
//! `sum_i C(c_i, i + 1)`. Together they let a worker start at an arbitrary
//! rank and walk forward without touching any shared state.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts and ranks. 128 bits leaves ample headroom over the ~10^15 spaces
/// the search deals with; every arithmetic step is checked.
pub type CombinationCount = u128;

/// Exact binomial coefficient `C(n, r)`, `0` when `r > n`.
pub fn binomial(n: u64, r: u64) -> Result<CombinationCount> {
    if r > n {
        return Ok(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1); split the division so the
        // intermediate product never exceeds the final magnitude by much.
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = acc.gcd(&den);
        let acc_red = acc / g;
        let num_red = num / (den / g);
        acc = acc_red
            .checked_mul(num_red)
            .ok_or(Error::Overflow { n, r })?;
    }
    Ok(acc)
}

/// The ground set `[lo, hi]` together with the combination size `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    pub lo: u32,
    pub hi: u32,
    pub r: usize,
}

impl Space {
    pub fn new(lo: u32, hi: u32, r: usize) -> Self {
        Space { lo, hi, r }
    }

    /// Number of elements in the ground range (zero when `hi < lo`).
    pub fn width(&self) -> u64 {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo) as u64 + 1
        }
    }

    pub fn count(&self) -> Result<CombinationCount> {
        binomial(self.width(), self.r as u64)
    }

    /// First combination in co-lex order, `None` if the space is empty.
    pub fn first(&self) -> Option<Combination> {
        if (self.r as u64) > self.width() {
            return None;
        }
        Some(Combination {
            elements: (0..self.r as u32).map(|i| self.lo + i).collect(),
            space: *self,
        })
    }
}

/// A strictly increasing selection of `space.r` values from `[space.lo, space.hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Combination {
    elements: Vec<u32>,
    space: Space,
}

impl Combination {
    pub fn new(elements: Vec<u32>, space: Space) -> Result<Self> {
        let ok = elements.len() == space.r
            && elements.windows(2).all(|w| w[0] < w[1])
            && elements.iter().all(|&e| e >= space.lo && e <= space.hi);
        if !ok {
            return Err(Error::InvalidCombination(format!(
                "{elements:?} is not a {}-combination of [{}, {}]",
                space.r, space.lo, space.hi
            )));
        }
        Ok(Combination { elements, space })
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Step to the co-lex successor in place. Returns `false` (leaving the
    /// combination untouched) when this is the last combination.
    pub fn advance(&mut self) -> bool {
        let r = self.elements.len();
        let e = &mut self.elements;
        for i in 0..r {
            let limit = if i + 1 < r { e[i + 1] } else { self.space.hi + 1 };
            if e[i] + 1 < limit {
                e[i] += 1;
                for (j, slot) in e.iter_mut().take(i).enumerate() {
                    *slot = self.space.lo + j as u32;
                }
                return true;
            }
        }
        false
    }

    /// Zero-based position in co-lex order.
    pub fn rank(&self) -> CombinationCount {
        self.elements
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                // C(x, i+1) with x < width; cannot overflow because the total
                // count of a constructible space fits (it was checked).
                binomial((e - self.space.lo) as u64, i as u64 + 1)
                    .expect("rank term bounded by space count")
            })
            .sum()
    }
}

/// Co-lex successor of `c`, or `None` at the end of the sequence.
pub fn colex_next(c: &Combination) -> Option<Combination> {
    let mut next = c.clone();
    next.advance().then_some(next)
}

pub fn rank(c: &Combination) -> CombinationCount {
    c.rank()
}

/// The combination of `space` whose co-lex rank is `idx`.
pub fn unrank(idx: CombinationCount, space: Space) -> Result<Combination> {
    let total = space.count()?;
    if idx >= total {
        return Err(Error::RankOutOfRange { rank: idx, total });
    }
    let mut rest = idx;
    let mut elements = vec![0u32; space.r];
    // Upper bound (exclusive) on the zero-based value of the current slot.
    let mut bound = space.width();
    for i in (0..space.r).rev() {
        let k = i as u64 + 1;
        // Largest x < bound with C(x, k) <= rest; C(x, k) is increasing in x
        // for x >= k - 1, so binary search over [i, bound).
        let (mut lo, mut hi) = (i as u64, bound);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if binomial(mid, k)? <= rest {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        rest -= binomial(lo, k)?;
        elements[i] = space.lo + lo as u32;
        bound = lo;
    }
    debug_assert_eq!(rest, 0);
    Ok(Combination { elements, space })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space4() -> Space {
        Space::new(1, 4, 2)
    }

    fn comb(e: &[u32]) -> Combination {
        Combination::new(e.to_vec(), space4()).unwrap()
    }

    // Pascal's rule, kept separate from the multiplicative formula. Only the
    // first r + 1 columns are tracked.
    fn pascal(n: usize, r: usize) -> u128 {
        let mut row = vec![0u128; r + 1];
        row[0] = 1;
        for _ in 0..n {
            for j in (1..=r).rev() {
                row[j] += row[j - 1];
            }
        }
        row[r]
    }

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(4, 2).unwrap(), 6);
        assert_eq!(binomial(0, 0).unwrap(), 1);
        assert_eq!(binomial(17, 0).unwrap(), 1);
        assert_eq!(binomial(3, 5).unwrap(), 0);
    }

    #[test]
    fn binomial_matches_pascal() {
        for n in 0..=60 {
            for r in 0..=n + 1 {
                assert_eq!(binomial(n as u64, r as u64).unwrap(), pascal(n, r), "C({n},{r})");
            }
        }
        assert_eq!(binomial(510, 4).unwrap(), pascal(510, 4));
        assert_eq!(binomial(510, 4).unwrap(), 2_785_790_085);
    }

    #[test]
    fn binomial_overflow_is_an_error() {
        assert!(matches!(binomial(400, 200), Err(Error::Overflow { .. })));
        // Near the top of the range but still representable.
        assert!(binomial(130, 65).is_ok());
    }

    #[test]
    fn successor_examples() {
        assert_eq!(colex_next(&comb(&[1, 2])), Some(comb(&[1, 3])));
        assert_eq!(colex_next(&comb(&[2, 3])), Some(comb(&[1, 4])));
        assert_eq!(colex_next(&comb(&[3, 4])), None);
    }

    #[test]
    fn rank_and_unrank_examples() {
        assert_eq!(rank(&comb(&[1, 2])), 0);
        assert_eq!(rank(&comb(&[1, 4])), 3);
        assert_eq!(rank(&comb(&[3, 4])), 5);
        assert_eq!(unrank(0, space4()).unwrap(), comb(&[1, 2]));
        assert_eq!(unrank(3, space4()).unwrap(), comb(&[1, 4]));
        assert_eq!(unrank(5, space4()).unwrap(), comb(&[3, 4]));
        assert!(matches!(unrank(6, space4()), Err(Error::RankOutOfRange { .. })));
    }

    #[test]
    fn empty_selection() {
        let s = Space::new(2, 1, 0);
        assert_eq!(s.count().unwrap(), 1);
        let c = s.first().unwrap();
        assert_eq!(c.rank(), 0);
        assert_eq!(colex_next(&c), None);
        assert_eq!(unrank(0, s).unwrap(), c);
    }

    #[test]
    fn invalid_combinations_rejected() {
        assert!(Combination::new(vec![2, 2], space4()).is_err());
        assert!(Combination::new(vec![0, 2], space4()).is_err());
        assert!(Combination::new(vec![1, 2, 3], space4()).is_err());
    }
}
