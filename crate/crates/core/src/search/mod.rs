//! Rank-partitioned exhaustive search for optimal circulants.
//!
//! The free jumps of every `(n, k)` circulant form an r-combination, so the
//! whole space is the interval of co-lex ranks `[0, count)`. It is split into
//! contiguous ranges, each worker unranks its start and walks forward with
//! the co-lex successor, profiling every connected graph with one BFS (the
//! graphs are vertex-symmetric). Workers keep the jump sets attaining the
//! smallest `(diameter, dist_sum)`; the merged survivors are then ranked by
//! bisection width.

mod checkpoint;

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{unrank, CombinationCount};
use crate::error::{Error, Result};
use crate::metrics::{bisection_width, BisectionConfig, CirculantBfs, MetricsRecord, PathStats, Profile};
use crate::topology::{jump_space, JumpSet, JumpSpace, Topology};

pub use checkpoint::{search_resumable, Cursor, SearchOutcome};

/// Half-open interval of combination ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RankRange {
    pub start: CombinationCount,
    pub end: CombinationCount,
}

impl RankRange {
    pub fn len(&self) -> CombinationCount {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }
}

impl fmt::Display for RankRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

/// Number of `(n, k)` jump sets the search visits.
pub fn count_space(n: usize, k: usize, reduced: bool) -> Result<CombinationCount> {
    jump_space(n, k, reduced)?.count()
}

/// `workers` contiguous ranges covering `[0, total)`; the first
/// `total mod workers` ranges hold one extra rank.
pub fn partition_ranks(total: CombinationCount, workers: usize) -> Vec<RankRange> {
    let w = workers.max(1) as CombinationCount;
    let (base, extra) = (total / w, total % w);
    let mut start = 0;
    (0..w)
        .map(|i| {
            let len = base + CombinationCount::from(i < extra);
            let r = RankRange { start, end: start + len };
            start += len;
            r
        })
        .collect()
}

/// Best `(diameter, dist_sum)` within a rank range and every jump set
/// attaining it.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub n: usize,
    pub k: usize,
    pub best_diameter: Option<u32>,
    pub best_dist_sum: Option<u64>,
    pub candidates: Vec<JumpSet>,
    pub scanned: u64,
    pub elapsed: Duration,
}

/// Equality ignores `elapsed`.
impl PartialEq for SearchResult {
    fn eq(&self, o: &Self) -> bool {
        (self.n, self.k, self.best_diameter, self.best_dist_sum, &self.candidates, self.scanned)
            == (o.n, o.k, o.best_diameter, o.best_dist_sum, &o.candidates, o.scanned)
    }
}

impl SearchResult {
    pub fn best(&self) -> Option<(u32, u64)> {
        self.best_diameter.zip(self.best_dist_sum)
    }
}

/// Running state of a scan over one range; also the checkpoint payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ScanState {
    pub range: RankRange,
    pub cursor: CombinationCount,
    pub scanned: u64,
    pub best: Option<(u32, u64)>,
    pub candidates: Vec<Vec<usize>>,
}

impl ScanState {
    pub fn fresh(range: RankRange) -> Self {
        ScanState { range, cursor: range.start, scanned: 0, best: None, candidates: Vec::new() }
    }

    pub fn done(&self) -> bool {
        self.cursor >= self.range.end
    }

    fn offer(&mut self, jumps: &[usize], profile: Profile) {
        if let Profile::Connected { diameter, dist_sum } = profile {
            let key = (diameter, dist_sum);
            match self.best {
                Some(b) if key > b => {}
                Some(b) if key == b => self.candidates.push(jumps.to_vec()),
                _ => {
                    self.best = Some(key);
                    self.candidates.clear();
                    self.candidates.push(jumps.to_vec());
                }
            }
        }
    }

    fn into_result(self, space: &JumpSpace, elapsed: Duration) -> SearchResult {
        let mut candidates: Vec<JumpSet> = self
            .candidates
            .into_iter()
            .map(|j| JumpSet::from_sorted_unchecked(space.n, j))
            .collect();
        candidates.sort();
        candidates.dedup();
        SearchResult {
            n: space.n,
            k: space.k,
            best_diameter: self.best.map(|b| b.0),
            best_dist_sum: self.best.map(|b| b.1),
            candidates,
            scanned: self.scanned,
            elapsed,
        }
    }
}

/// Why a scan stopped before reaching its range end.
pub(crate) enum Stop {
    Finished,
    Budget,
}

/// Advances `state` through its range. Calls `emit` every `interval` graphs
/// and once more on stopping. With a `budget`, stops after that many graphs.
pub(crate) fn scan_state(
    space: &JumpSpace,
    state: &mut ScanState,
    budget: Option<u64>,
    interval: u64,
    emit: &mut dyn FnMut(&ScanState),
) -> Result<Stop> {
    if state.done() {
        return Ok(Stop::Finished);
    }
    let mut comb = unrank(state.cursor, space.free)?;
    let mut bfs = CirculantBfs::new(space.n);
    let mut jumps = Vec::with_capacity(space.fixed.len() + space.free.r);
    let mut session = 0u64;
    loop {
        space.assemble_into(comb.elements(), &mut jumps);
        let profile = bfs.profile(&jumps, state.best);
        state.offer(&jumps, profile);
        state.scanned += 1;
        state.cursor += 1;
        session += 1;
        if state.done() {
            emit(state);
            return Ok(Stop::Finished);
        }
        if budget.is_some_and(|b| session >= b) {
            emit(state);
            return Ok(Stop::Budget);
        }
        if interval > 0 && session.is_multiple_of(interval) {
            emit(state);
        }
        let advanced = comb.advance();
        debug_assert!(advanced, "range end lies within the space");
    }
}

/// Scans `range` of the `(n, k)` space.
pub fn scan_range(n: usize, k: usize, range: RankRange, reduced: bool) -> Result<SearchResult> {
    let space = jump_space(n, k, reduced)?;
    let total = space.count()?;
    if range.end > total || range.start > range.end {
        return Err(Error::RankOutOfRange { rank: range.end, total });
    }
    let started = Instant::now();
    let mut state = ScanState::fresh(range);
    scan_state(&space, &mut state, None, 0, &mut |_| {})?;
    Ok(state.into_result(&space, started.elapsed()))
}

/// Lexicographic minimum of `(diameter, dist_sum)` over all results, with
/// the candidate lists of tied results combined, sorted and deduplicated.
pub fn merge(results: Vec<SearchResult>) -> Result<SearchResult> {
    let mut it = results.into_iter();
    let mut acc = it.next().ok_or_else(|| Error::MixedResults("nothing to merge".into()))?;
    for r in it {
        if (r.n, r.k) != (acc.n, acc.k) {
            return Err(Error::MixedResults(format!("({}, {}) vs ({}, {})", acc.n, acc.k, r.n, r.k)));
        }
        acc.scanned += r.scanned;
        acc.elapsed = acc.elapsed.max(r.elapsed);
        match (acc.best(), r.best()) {
            (_, None) => {}
            (None, Some(_)) => {
                acc.best_diameter = r.best_diameter;
                acc.best_dist_sum = r.best_dist_sum;
                acc.candidates = r.candidates;
            }
            (Some(a), Some(b)) if b < a => {
                acc.best_diameter = r.best_diameter;
                acc.best_dist_sum = r.best_dist_sum;
                acc.candidates = r.candidates;
            }
            (Some(a), Some(b)) if b == a => acc.candidates.extend(r.candidates),
            _ => {}
        }
    }
    acc.candidates.sort();
    acc.candidates.dedup();
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub workers: usize,
    /// Fix jump 1 when `n` is a power of two.
    pub reduced: bool,
    pub bisection: BisectionConfig,
    /// Graphs between checkpoint cursors (resumable searches only).
    pub checkpoint_interval: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            reduced: true,
            bisection: BisectionConfig::default(),
            checkpoint_interval: 1_000_000,
        }
    }
}

/// One optimal circulant with its full metrics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalRecord {
    pub n: usize,
    pub k: usize,
    pub jumps: JumpSet,
    pub metrics: MetricsRecord,
}

/// Results-file line: `{n, k, jumps, diameter, dist_sum, mpl, bisection, bisection_exact}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordLine {
    pub n: usize,
    pub k: usize,
    pub jumps: Vec<usize>,
    pub diameter: u32,
    pub dist_sum: u64,
    pub mpl: f64,
    pub bisection: Option<usize>,
    pub bisection_exact: bool,
}

impl OptimalRecord {
    pub fn line(&self) -> RecordLine {
        RecordLine {
            n: self.n,
            k: self.k,
            jumps: self.jumps.jumps().to_vec(),
            diameter: self.metrics.diameter,
            dist_sum: self.metrics.dist_sum().to_integer(),
            mpl: self.metrics.mpl_f64(),
            bisection: self.metrics.bisection,
            bisection_exact: self.metrics.bisection_exact,
        }
    }
}

/// Writes one JSON line per record.
pub fn write_results<W: std::io::Write>(records: &[OptimalRecord], mut w: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, &r.line())?;
        writeln!(w)?;
    }
    Ok(())
}

/// Full pipeline: partition, concurrent scans, merge, then keep the
/// candidates of maximal bisection width.
pub fn search_optimal(n: usize, k: usize, cfg: &SearchConfig) -> Result<Vec<OptimalRecord>> {
    let merged = run_scans(n, k, cfg)?;
    finalize(merged, cfg)
}

fn run_scans(n: usize, k: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    let total = count_space(n, k, cfg.reduced)?;
    let ranges = partition_ranks(total, cfg.workers);
    let results = in_pool(cfg.workers, || {
        ranges
            .par_iter()
            .map(|&r| scan_range(n, k, r, cfg.reduced))
            .collect::<Result<Vec<_>>>()
    })?;
    merge(results)
}

pub(crate) fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Bisection stage. Isomorphic candidates (equal multiplier-canonical form)
/// share one bisection computation.
pub(crate) fn finalize(merged: SearchResult, cfg: &SearchConfig) -> Result<Vec<OptimalRecord>> {
    let (Some(diameter), Some(dist_sum)) = (merged.best_diameter, merged.best_dist_sum) else {
        return Ok(Vec::new());
    };
    let n = merged.n;
    let stats = PathStats { n, diameter, total: dist_sum * n as u64 };
    let mut classes: BTreeMap<JumpSet, Vec<JumpSet>> = BTreeMap::new();
    for js in merged.candidates {
        classes.entry(js.adam_canonical()).or_default().push(js);
    }
    let reps: Vec<JumpSet> = classes.keys().cloned().collect();
    let widths = reps
        .par_iter()
        .map(|rep| bisection_width(&Topology::circulant(rep), &cfg.bisection))
        .collect::<Result<Vec<_>>>()?;
    let best_width = widths.iter().flatten().map(|b| b.width).max();
    let mut out = Vec::new();
    for ((_, members), b) in classes.into_iter().zip(widths) {
        if b.as_ref().map(|b| b.width) != best_width {
            continue;
        }
        for js in members {
            let t = Topology::circulant(&js);
            out.push(OptimalRecord {
                n,
                k: merged.k,
                metrics: MetricsRecord::from_parts(&t, stats, b.as_ref()),
                jumps: js,
            });
        }
    }
    out.sort_by(|a, b| a.jumps.cmp(&b.jumps));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(workers: usize, reduced: bool) -> SearchConfig {
        SearchConfig { workers, reduced, ..SearchConfig::default() }
    }

    #[test]
    fn space_counts() {
        assert_eq!(count_space(1024, 10, true).unwrap(), 2_785_790_085);
        assert_eq!(count_space(32, 4, true).unwrap(), 14);
        assert_eq!(count_space(8, 4, false).unwrap(), 3);
        assert!(count_space(9, 3, true).is_err());
    }

    #[test]
    fn partitions() {
        let r = |s, e| RankRange { start: s, end: e };
        assert_eq!(partition_ranks(10, 3), vec![r(0, 4), r(4, 7), r(7, 10)]);
        assert_eq!(partition_ranks(6, 6), (0..6).map(|i| r(i, i + 1)).collect::<Vec<_>>());
        let p = partition_ranks(5, 8);
        assert_eq!(p.iter().filter(|x| x.len() == 1).count(), 5);
        assert_eq!(p.iter().filter(|x| x.is_empty()).count(), 3);
        assert_eq!(p.last().unwrap().end, 5);
    }

    #[test]
    fn scan_32_4() {
        let total = count_space(32, 4, true).unwrap();
        let r = scan_range(32, 4, RankRange { start: 0, end: total }, true).unwrap();
        assert_eq!(r.best(), Some((4, 84)));
        assert!(r.candidates.contains(&JumpSet::new(32, [1, 7]).unwrap()));
        assert_eq!(r.scanned, 14);
    }

    #[test]
    fn scan_8_4_brute_force() {
        // {1,2}: D=2 sum 1+1+1+1+2+2+2=10; {1,3}: D=2 sum 4·1+3·2 = 10;
        // {2,3}: D=2, also 10. All three tie.
        let r = scan_range(8, 4, RankRange { start: 0, end: 3 }, false).unwrap();
        assert_eq!(r.best_diameter, Some(2));
        assert!(r.candidates.contains(&JumpSet::new(8, [1, 3]).unwrap()));
    }

    #[test]
    fn empty_range() {
        let r = scan_range(32, 4, RankRange { start: 5, end: 5 }, true).unwrap();
        assert_eq!((r.scanned, r.candidates.len(), r.best()), (0, 0, None));
        assert!(scan_range(32, 4, RankRange { start: 0, end: 15 }, true).is_err());
    }

    #[test]
    fn merge_rules() {
        let total = count_space(64, 6, true).unwrap();
        let whole = scan_range(64, 6, RankRange { start: 0, end: total }, true).unwrap();
        for w in [1, 2, 5, 13] {
            let parts = partition_ranks(total, w)
                .into_iter()
                .map(|r| scan_range(64, 6, r, true).unwrap())
                .collect();
            assert_eq!(merge(parts).unwrap(), whole);
        }
        assert_eq!(merge(vec![whole.clone()]).unwrap(), whole);
        let other = scan_range(32, 4, RankRange { start: 0, end: 14 }, true).unwrap();
        assert!(matches!(merge(vec![whole, other]), Err(Error::MixedResults(_))));
    }

    #[test]
    fn merge_unions_ties() {
        let mut a = SearchResult {
            n: 8,
            k: 4,
            best_diameter: Some(2),
            best_dist_sum: Some(10),
            candidates: Vec::new(),
            scanned: 0,
            elapsed: Duration::ZERO,
        };
        let mut b = a.clone();
        a.candidates = vec![JumpSet::new(8, [1, 3]).unwrap()];
        b.candidates = vec![JumpSet::new(8, [1, 2]).unwrap(), JumpSet::new(8, [1, 3]).unwrap()];
        let m = merge(vec![a, b]).unwrap();
        assert_eq!(m.candidates.len(), 2);
        assert_eq!(m.candidates[0].jumps(), &[1, 2]);
    }

    #[test]
    fn optimal_16_4_and_32_4() {
        let r = search_optimal(16, 4, &cfg(2, true)).unwrap();
        assert!(r.iter().any(|x| x.jumps.jumps() == [1, 6]));
        let r = search_optimal(32, 4, &cfg(2, true)).unwrap();
        let hit = r.iter().find(|x| x.jumps.jumps() == [1, 7]).unwrap();
        assert_eq!((hit.metrics.diameter, hit.metrics.bisection), (4, Some(16)));
        assert!(hit.metrics.bisection_exact);
    }

    #[test]
    fn complete_graph_case() {
        let r = search_optimal(8, 7, &cfg(1, true)).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].jumps.jumps(), &[1, 2, 3, 4]);
        assert_eq!(r[0].metrics.diameter, 1);
    }

    #[test]
    fn odd_order_skips_bisection_filter() {
        let r = search_optimal(15, 4, &cfg(1, false)).unwrap();
        assert!(!r.is_empty());
        assert!(r.iter().all(|x| x.metrics.bisection.is_none()));
    }

    #[test]
    fn record_line_shape() {
        let r = search_optimal(32, 5, &cfg(1, true)).unwrap();
        let mut buf = Vec::new();
        write_results(&r, &mut buf).unwrap();
        let first: serde_json::Value = serde_json::from_slice(buf.split(|&b| b == b'\n').next().unwrap()).unwrap();
        for key in ["n", "k", "jumps", "diameter", "dist_sum", "mpl", "bisection", "bisection_exact"] {
            assert!(first.get(key).is_some(), "{key}");
        }
    }
}
