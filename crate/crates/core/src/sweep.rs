//! Gauss-Seidel sweep kernels shared by the sweeping and cell-based solvers.

use crate::grid::Problem;
use crate::local::{directional_update, gather, node_update, Direction};

/// Half-open node rectangle `[i0, i1) × [j0, j1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl Rect {
    pub fn new(i0: usize, i1: usize, j0: usize, j1: usize) -> Self {
        debug_assert!(i0 < i1 && j0 < j1);
        Rect { i0, i1, j0, j1 }
    }

    pub fn width(&self) -> usize {
        self.i1 - self.i0
    }

    pub fn height(&self) -> usize {
        self.j1 - self.j0
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.i0..self.i1).contains(&i) && (self.j0..self.j1).contains(&j)
    }
}

/// How a node recomputes its value inside a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateRule {
    /// Smallest quadrant, i.e. the full upwind discretization.
    Full,
    /// Only the quadrant facing the sweep's starting corner.
    Directional,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepResult {
    pub changed: bool,
    pub updates: u64,
}

#[inline]
fn ordered(lo: usize, hi: usize, k: usize, asc: bool) -> usize {
    if asc {
        lo + k
    } else {
        hi - 1 - k
    }
}

/// One sweep over `rect` from `dir`, recomputing every non-exit node.
/// Values outside `rect` act as fixed boundary data.
pub fn sweep_plain(problem: &Problem, values: &mut [f64], rect: Rect, dir: Direction, rule: UpdateRule) -> SweepResult {
    let grid = problem.grid();
    let (m, n, h) = (grid.m(), grid.n(), grid.h());
    let (ia, ja) = (dir.i_ascending(), dir.j_ascending());
    let mut res = SweepResult::default();
    for ki in 0..rect.width() {
        let i = ordered(rect.i0, rect.i1, ki, ia);
        for kj in 0..rect.height() {
            let j = ordered(rect.j0, rect.j1, kj, ja);
            let idx = i * n + j;
            if problem.is_exit(idx) {
                continue;
            }
            let nb = gather(values, idx, i, j, m, n);
            let f = problem.speed(idx);
            let cand = match rule {
                UpdateRule::Full => node_update(&nb, f, h),
                UpdateRule::Directional => directional_update(&nb, dir, f, h),
            };
            res.updates += 1;
            if cand < values[idx] {
                values[idx] = cand;
                res.changed = true;
            }
        }
    }
    res
}

/// Lock flags for locking sweeps: all nodes locked except the non-exit
/// neighbours of exit nodes.
pub fn initial_locks(problem: &Problem) -> Vec<bool> {
    let grid = problem.grid();
    let mut locked = vec![true; grid.len()];
    for &(e, _) in problem.exits() {
        for nb in grid.neighbors(e) {
            if !problem.is_exit(nb) {
                locked[nb] = false;
            }
        }
    }
    locked
}

/// One locking sweep over `rect` from `dir`. Only unlocked nodes are
/// recomputed; each processed node is locked, and a node whose value drops
/// unlocks its larger non-exit neighbours anywhere on the grid.
pub fn sweep_locking(problem: &Problem, values: &mut [f64], locked: &mut [bool], rect: Rect, dir: Direction) -> SweepResult {
    let grid = problem.grid();
    let (m, n, h) = (grid.m(), grid.n(), grid.h());
    let (ia, ja) = (dir.i_ascending(), dir.j_ascending());
    let mut res = SweepResult::default();
    for ki in 0..rect.width() {
        let i = ordered(rect.i0, rect.i1, ki, ia);
        for kj in 0..rect.height() {
            let j = ordered(rect.j0, rect.j1, kj, ja);
            let idx = i * n + j;
            if locked[idx] {
                continue;
            }
            locked[idx] = true;
            if problem.is_exit(idx) {
                continue;
            }
            let nb = gather(values, idx, i, j, m, n);
            let cand = node_update(&nb, problem.speed(idx), h);
            res.updates += 1;
            if cand < values[idx] {
                values[idx] = cand;
                res.changed = true;
                let mut unlock = |k: usize| {
                    if values[k] > cand && !problem.is_exit(k) {
                        locked[k] = false;
                    }
                };
                if i > 0 {
                    unlock(idx - n);
                }
                if i + 1 < m {
                    unlock(idx + n);
                }
                if j > 0 {
                    unlock(idx - 1);
                }
                if j + 1 < n {
                    unlock(idx + 1);
                }
            }
        }
    }
    res
}
