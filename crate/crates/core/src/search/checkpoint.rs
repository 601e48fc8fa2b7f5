//! Resumable searches. Each worker appends its cursor (position plus
//! running best) to a JSON-lines file; on restart the latest cursor of every
//! range is picked up, so an interrupted search finishes with exactly the
//! result of an uninterrupted one.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{finalize, in_pool, merge, partition_ranks, scan_state, OptimalRecord, RankRange, ScanState, SearchConfig, Stop};
use crate::combinatorics::CombinationCount;
use crate::error::{Error, Result};
use crate::topology::{jump_space, JumpSet, JumpSpace};

/// One checkpoint line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cursor {
    pub n: usize,
    pub k: usize,
    pub reduced: bool,
    pub range: RankRange,
    pub cursor_rank: CombinationCount,
    pub scanned: u64,
    pub best_diameter: Option<u32>,
    pub best_dist_sum: Option<u64>,
    pub candidates: Vec<Vec<usize>>,
}

impl Cursor {
    fn from_state(space: &JumpSpace, s: &ScanState) -> Self {
        Cursor {
            n: space.n,
            k: space.k,
            reduced: space.reduced,
            range: s.range,
            cursor_rank: s.cursor,
            scanned: s.scanned,
            best_diameter: s.best.map(|b| b.0),
            best_dist_sum: s.best.map(|b| b.1),
            candidates: s.candidates.clone(),
        }
    }

    fn into_state(self) -> ScanState {
        ScanState {
            range: self.range,
            cursor: self.cursor_rank,
            scanned: self.scanned,
            best: self.best_diameter.zip(self.best_dist_sum),
            candidates: self.candidates,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Complete(Vec<OptimalRecord>),
    /// The per-worker budget ran out; the checkpoint holds the progress.
    Interrupted { scanned: u64, remaining: CombinationCount },
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

fn load(path: &Path, space: &JumpSpace, total: CombinationCount) -> Result<Vec<ScanState>> {
    let mut latest: BTreeMap<RankRange, Cursor> = BTreeMap::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let c: Cursor = serde_json::from_str(&line).map_err(|e| corrupt(format!("line {}: {e}", i + 1)))?;
        if (c.n, c.k, c.reduced) != (space.n, space.k, space.reduced) {
            return Err(corrupt(format!(
                "line {}: cursor for (n={}, k={}, reduced={}) does not match this search",
                i + 1,
                c.n,
                c.k,
                c.reduced
            )));
        }
        let r = c.range;
        if r.start > r.end || r.end > total || c.cursor_rank < r.start || c.cursor_rank > r.end {
            return Err(corrupt(format!("line {}: cursor {} outside range {r}", i + 1, c.cursor_rank)));
        }
        if c.scanned as CombinationCount != c.cursor_rank - r.start {
            return Err(corrupt(format!("line {}: scanned count disagrees with cursor", i + 1)));
        }
        if c.best_diameter.is_some() != c.best_dist_sum.is_some()
            || (c.best_diameter.is_none() && !c.candidates.is_empty())
        {
            return Err(corrupt(format!("line {}: inconsistent running best", i + 1)));
        }
        for js in &c.candidates {
            JumpSet::new(space.n, js.iter().copied())
                .map_err(|e| corrupt(format!("line {}: {e}", i + 1)))?;
        }
        match latest.get(&r) {
            Some(prev) if prev.cursor_rank >= c.cursor_rank => {}
            _ => {
                latest.insert(r, c);
            }
        }
    }
    let mut expect = 0;
    for r in latest.keys() {
        if r.start != expect {
            return Err(corrupt(format!("ranges do not tile [0, {total}) at rank {expect}")));
        }
        expect = r.end;
    }
    if expect != total {
        return Err(corrupt(format!("ranges end at {expect}, space holds {total}")));
    }
    Ok(latest.into_values().map(Cursor::into_state).collect())
}

/// Like [`super::search_optimal`], checkpointing to `path`. An existing
/// checkpoint is resumed using its recorded ranges (the worker count then
/// only sets parallelism). With `budget`, each worker stops after that many
/// graphs in this session.
pub fn search_resumable(
    n: usize,
    k: usize,
    cfg: &SearchConfig,
    path: &Path,
    budget: Option<u64>,
) -> Result<SearchOutcome> {
    let space = jump_space(n, k, cfg.reduced)?;
    let total = space.count()?;
    let resuming = path.metadata().map(|m| m.len() > 0).unwrap_or(false);
    let states = if resuming {
        load(path, &space, total)?
    } else {
        partition_ranks(total, cfg.workers).into_iter().map(ScanState::fresh).collect()
    };
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let sink: Mutex<(File, Option<std::io::Error>)> = Mutex::new((file, None));
    let emit = |s: &ScanState| {
        let mut line = serde_json::to_string(&Cursor::from_state(&space, s)).expect("cursor serializes");
        line.push('\n');
        let mut g = sink.lock().unwrap_or_else(|p| p.into_inner());
        if g.1.is_none() {
            if let Err(e) = g.0.write_all(line.as_bytes()).and_then(|_| g.0.flush()) {
                g.1 = Some(e);
            }
        }
    };
    if !resuming {
        for s in &states {
            emit(s);
        }
    }
    let started = Instant::now();
    let finished = in_pool(cfg.workers, || {
        states
            .into_par_iter()
            .map(|mut st| {
                let stop = scan_state(&space, &mut st, budget, cfg.checkpoint_interval, &mut |s| emit(s))?;
                Ok((st, stop))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    if let Some(e) = sink.into_inner().unwrap_or_else(|p| p.into_inner()).1 {
        return Err(e.into());
    }
    if finished.iter().any(|(_, stop)| matches!(stop, Stop::Budget)) {
        let scanned = finished.iter().map(|(s, _)| s.scanned).sum();
        let remaining = finished.iter().map(|(s, _)| s.range.end - s.cursor).sum();
        return Ok(SearchOutcome::Interrupted { scanned, remaining });
    }
    let elapsed = started.elapsed();
    let results = finished.into_iter().map(|(s, _)| s.into_result(&space, elapsed)).collect();
    Ok(SearchOutcome::Complete(finalize(merge(results)?, cfg)?))
}
