//! Heap-Cell solvers: cells are kept in a heap keyed by an estimate of
//! their value and processed by locking sweeps restricted to the cell.
//!
//! [`hcm_solve`] iterates each processed cell to convergence and yields the
//! exact discrete solution. [`fhcm_solve`] does one sweep per raised
//! direction flag and narrows flags with a monotonicity check on the
//! border, trading a small additional error for fewer sweeps.

use crate::cells::{monotonicity_flags, scan_cell_boundary, CellDecomposition};
use crate::error::{EikonalError, Result};
use crate::grid::{CellStats, Problem, SolverOutput};
use crate::heap::IndexedMinHeap;
use crate::local::{DirSet, Direction};
use crate::sweep::{initial_locks, sweep_locking};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    Convergent,
    Fast,
}

/// Removal budget per cell before a run is declared non-terminating.
const REMOVALS_PER_CELL: usize = 100;

pub fn hcm_solve(problem: &Problem, cells: &CellDecomposition) -> Result<SolverOutput> {
    solve(problem, cells, Variant::Convergent)
}

pub fn fhcm_solve(problem: &Problem, cells: &CellDecomposition) -> Result<SolverOutput> {
    solve(problem, cells, Variant::Fast)
}

/// Sweep directions for the first four sweeps of a convergent cell
/// processing: flagged ones first, both groups in rotation order.
fn preferred_order(flags: DirSet) -> [Direction; 4] {
    let mut out = [Direction::SW; 4];
    let flagged = Direction::ROTATION.iter().filter(|d| flags.contains(**d));
    let rest = Direction::ROTATION.iter().filter(|d| !flags.contains(**d));
    for (slot, d) in out.iter_mut().zip(flagged.chain(rest)) {
        *slot = *d;
    }
    out
}

fn solve(problem: &Problem, cells: &CellDecomposition, variant: Variant) -> Result<SolverOutput> {
    if cells.grid() != problem.grid() {
        return Err(EikonalError::config("cell decomposition was built for a different grid"));
    }
    let j_cells = cells.len();
    let mut values = problem.initial_values();
    let mut locked = initial_locks(problem);
    let mut cell_value = vec![f64::INFINITY; j_cells];
    let mut flags = vec![DirSet::EMPTY; j_cells];
    let mut processed = vec![false; j_cells];
    let mut heap = IndexedMinHeap::new(j_cells);
    let mut stats = CellStats {
        cells: j_cells,
        ..CellStats::default()
    };
    let mut updates = 0u64;

    for &(e, q) in problem.exits() {
        let c = cells.cell_of(e);
        cell_value[c] = if cell_value[c].is_finite() { cell_value[c].max(q) } else { q };
        if variant == Variant::Fast {
            flags[c] = DirSet::FULL;
        }
    }
    for (c, &v) in cell_value.iter().enumerate() {
        if v.is_finite() {
            heap.insert(c, v);
        }
    }

    let budget = REMOVALS_PER_CELL * j_cells;
    let mut pairs_buf = Vec::new();
    let mut before = Vec::new();
    let mut snapshot: Vec<Vec<f64>> = Vec::with_capacity(4);
    while let Some((c, _)) = heap.pop() {
        stats.removals += 1;
        if stats.removals as usize > budget {
            return Err(EikonalError::Budget(budget));
        }
        let rect = cells.rect(c);
        let first = !processed[c];

        snapshot.clear();
        for &(_, side) in cells.neighbors(c) {
            let pairs = cells.border_pairs(c, side);
            snapshot.push(pairs.iter().map(|&(xi, _)| values[xi]).collect());
        }

        match variant {
            Variant::Convergent => {
                let order = preferred_order(flags[c]);
                let mut k = 0usize;
                loop {
                    let dir = if k < 4 { order[k] } else { Direction::from_sweep_number(k) };
                    let r = sweep_locking(problem, values.as_mut_slice(), &mut locked, rect, dir);
                    k += 1;
                    updates += r.updates;
                    if !r.changed {
                        break;
                    }
                }
                stats.sweeps += k as u64;
            }
            Variant::Fast => {
                for dir in flags[c].iter() {
                    let r = sweep_locking(problem, values.as_mut_slice(), &mut locked, rect, dir);
                    updates += r.updates;
                    stats.sweeps += 1;
                }
            }
        }
        flags[c] = DirSet::EMPTY;
        processed[c] = true;

        for (nb_pos, &(k, side)) in cells.neighbors(c).iter().enumerate() {
            pairs_buf.clear();
            pairs_buf.extend(cells.border_pairs(c, side));
            before.clear();
            before.extend_from_slice(&snapshot[nb_pos]);
            let scan = scan_cell_boundary(problem, cells, values.as_slice(), &pairs_buf, &before, side, first);
            if scan.candidate < cell_value[k] {
                cell_value[k] = scan.candidate;
                if heap.contains(k) {
                    heap.decrease_key(k, scan.candidate);
                }
            }
            if !scan.should_add {
                continue;
            }
            let raise = match variant {
                Variant::Convergent => scan.flags,
                Variant::Fast => {
                    let seq: Vec<f64> = pairs_buf.iter().map(|&(xi, _)| values[xi]).collect();
                    let f = monotonicity_flags(&seq, side);
                    stats.mon_checks += 1;
                    if f.len() == 1 {
                        stats.mon_single += 1;
                    }
                    f
                }
            };
            flags[k] = flags[k].union(raise);
            if !heap.contains(k) {
                heap.insert(k, cell_value[k]);
            }
        }
    }

    let mut output = SolverOutput::new(values);
    output.node_updates = updates;
    output.heap_removals = stats.removals;
    output.sweeps = stats.sweeps;
    output.cells = Some(stats);
    Ok(output)
}
