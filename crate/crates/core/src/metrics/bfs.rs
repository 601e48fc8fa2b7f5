use super::bitset::{get, set, words_for};
use crate::error::{Error, Result};
use crate::topology::Topology;

/// Hop distances from `source` to every vertex.
///
/// Visited vertices are tracked in a packed bit array. A disconnected graph
/// yields [`Error::Disconnected`] carrying the vertices that were reached.
pub fn bfs_distances(t: &Topology, source: usize) -> Result<Vec<u32>> {
    let mut dist = vec![u32::MAX; t.n()];
    let reached = bfs_into(t, source, &mut dist, &mut Scratch::new(t.n()));
    if reached < t.n() {
        let reachable = (0..t.n() as u32).filter(|&v| dist[v as usize] != u32::MAX).collect();
        return Err(Error::Disconnected { n: t.n(), reachable });
    }
    Ok(dist)
}

pub(crate) struct Scratch {
    visited: Vec<u64>,
    queue: Vec<u32>,
}

impl Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Scratch { visited: vec![0; words_for(n)], queue: Vec::with_capacity(n) }
    }
}

/// Fills `dist` (unreached entries left untouched) and returns the number of
/// reached vertices.
pub(crate) fn bfs_into(t: &Topology, source: usize, dist: &mut [u32], s: &mut Scratch) -> usize {
    s.visited.fill(0);
    s.queue.clear();
    set(&mut s.visited, source);
    dist[source] = 0;
    s.queue.push(source as u32);
    let mut head = 0;
    while head < s.queue.len() {
        let u = s.queue[head] as usize;
        head += 1;
        let du = dist[u];
        for &v in t.neighbors(u) {
            let v = v as usize;
            if !get(&s.visited, v) {
                set(&mut s.visited, v);
                dist[v] = du + 1;
                s.queue.push(v as u32);
            }
        }
    }
    s.queue.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::JumpSet;

    #[test]
    fn ring_distances() {
        let t = Topology::ring(8).unwrap();
        assert_eq!(bfs_distances(&t, 0).unwrap(), vec![0, 1, 2, 3, 4, 3, 2, 1]);
    }

    #[test]
    fn hypercube_hamming() {
        let t = Topology::hypercube(5).unwrap();
        let d = bfs_distances(&t, 0).unwrap();
        for (v, &dv) in d.iter().enumerate() {
            assert_eq!(dv, (v as u32).count_ones());
        }
    }

    #[test]
    fn optimal_32_4_diameter() {
        let t = Topology::circulant(&JumpSet::new(32, [1, 7]).unwrap());
        assert_eq!(bfs_distances(&t, 0).unwrap().into_iter().max(), Some(4));
    }

    #[test]
    fn disconnected_reports_reachable_set() {
        let t = Topology::circulant(&JumpSet::new(8, [2, 4]).unwrap());
        match bfs_distances(&t, 0) {
            Err(Error::Disconnected { n, reachable }) => {
                assert_eq!(n, 8);
                assert_eq!(reachable, vec![0, 2, 4, 6]);
            }
            other => panic!("expected disconnected, got {other:?}"),
        }
    }
}
