//! Exhaustive enumeration of small boards.
//!
//! Boards are simply-connected polyominoes, deduplicated up to translation
//! only: rotations and reflections are kept as distinct instances so that
//! orientation-dependent code paths get exercised.

use std::collections::HashSet;

use crate::disk::{DiskError, QuadDisk};

pub const MAX_CELLS: usize = 10;

/// Generator parameters for the exhaustive test universe, plus a seed for
/// sampled sub-suites.
#[derive(Clone, Copy, Debug)]
pub struct InstanceUniverse {
    pub max_cells: usize,
    pub seed: u64,
}

impl InstanceUniverse {
    pub fn new(max_cells: usize) -> Result<Self, DiskError> {
        if max_cells == 0 || max_cells > MAX_CELLS {
            return Err(DiskError::EmptyGrid);
        }
        Ok(InstanceUniverse {
            max_cells,
            seed: 0,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn boards(&self) -> impl Iterator<Item = QuadDisk> {
        enumerate_cell_sets(self.max_cells)
            .into_iter()
            .map(|cells| QuadDisk::from_cells(&cells))
    }

    /// Deterministic pseudo-random selection of `count` instances (with
    /// repetition) from the universe.
    pub fn sampled_boards(&self, count: usize) -> Vec<QuadDisk> {
        let all = enumerate_cell_sets(self.max_cells);
        let mut rng = SplitMix64::new(self.seed);
        (0..count)
            .map(|_| {
                let idx = (rng.next() % all.len() as u64) as usize;
                QuadDisk::from_cells(&all[idx])
            })
            .collect()
    }
}

/// All simply-connected polyomino cell sets with up to `max_cells` cells, in
/// a deterministic order: sizes ascending, cell lists sorted lexicographically
/// within a size.
pub fn enumerate_cell_sets(max_cells: usize) -> Vec<Vec<(i64, i64)>> {
    assert!((1..=MAX_CELLS).contains(&max_cells), "cell cap out of range");
    let mut out = Vec::new();
    // Levels keep every polyomino (holes included) so growth stays complete;
    // only the emitted sets are filtered.
    let mut level: HashSet<Vec<(i64, i64)>> = HashSet::new();
    level.insert(vec![(0, 0)]);
    for size in 1..=max_cells {
        let mut sorted: Vec<Vec<(i64, i64)>> = level.iter().cloned().collect();
        sorted.sort();
        for cells in &sorted {
            if is_simply_connected(cells) {
                out.push(cells.clone());
            }
        }
        if size == max_cells {
            break;
        }
        let mut next: HashSet<Vec<(i64, i64)>> = HashSet::new();
        for cells in &sorted {
            let occupied: HashSet<(i64, i64)> = cells.iter().copied().collect();
            for &(x, y) in cells {
                for cand in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
                    if occupied.contains(&cand) {
                        continue;
                    }
                    let mut grown = cells.clone();
                    grown.push(cand);
                    next.insert(normalize(&grown));
                }
            }
        }
        level = next;
    }
    out
}

/// Number of boards of each size `1..=max_cells`.
pub fn board_counts(max_cells: usize) -> Vec<usize> {
    let mut counts = vec![0usize; max_cells];
    for cells in enumerate_cell_sets(max_cells) {
        counts[cells.len() - 1] += 1;
    }
    counts
}

pub fn enumerate_boards(max_cells: usize) -> Result<impl Iterator<Item = QuadDisk>, DiskError> {
    if max_cells == 0 || max_cells > MAX_CELLS {
        return Err(DiskError::EmptyGrid);
    }
    Ok(enumerate_cell_sets(max_cells)
        .into_iter()
        .map(|cells| QuadDisk::from_cells(&cells)))
}

fn normalize(cells: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let minx = cells.iter().map(|c| c.0).min().unwrap();
    let miny = cells.iter().map(|c| c.1).min().unwrap();
    let mut out: Vec<(i64, i64)> = cells.iter().map(|&(x, y)| (x - minx, y - miny)).collect();
    out.sort_unstable();
    out
}

fn is_simply_connected(cells: &[(i64, i64)]) -> bool {
    let set: HashSet<(i64, i64)> = cells.iter().copied().collect();
    let minx = cells.iter().map(|c| c.0).min().unwrap() - 1;
    let maxx = cells.iter().map(|c| c.0).max().unwrap() + 1;
    let miny = cells.iter().map(|c| c.1).min().unwrap() - 1;
    let maxy = cells.iter().map(|c| c.1).max().unwrap() + 1;
    let mut seen = HashSet::new();
    let mut stack = vec![(minx, miny)];
    seen.insert((minx, miny));
    while let Some((x, y)) = stack.pop() {
        for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
            if n.0 < minx || n.0 > maxx || n.1 < miny || n.1 > maxy || set.contains(&n) {
                continue;
            }
            if seen.insert(n) {
                stack.push(n);
            }
        }
    }
    let total = ((maxx - minx + 1) * (maxy - miny + 1)) as usize;
    seen.len() + set.len() == total
}

/// Tiny deterministic generator for sampled suites; stable across platforms.
pub(crate) struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub(crate) fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}
