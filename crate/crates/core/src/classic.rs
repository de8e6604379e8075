//! Single-scale solvers: Fast Marching, Fast Sweeping and Locking Sweeping.
//! All three return the exact solution of the discretized system.

use crate::grid::{Problem, SolverOutput};
use crate::heap::IndexedMinHeap;
use crate::local::{gather, node_update, Direction};
use crate::sweep::{initial_locks, sweep_locking, sweep_plain, Rect, UpdateRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Label {
    Far,
    Considered,
    Accepted,
}

/// Fast Marching result together with the order in which non-exit nodes
/// were removed from the heap.
#[derive(Clone, Debug)]
pub struct MarchingRun {
    pub output: SolverOutput,
    pub order: Vec<usize>,
}

pub fn fmm_solve(problem: &Problem) -> SolverOutput {
    fmm_solve_with_order(problem).output
}

pub fn fmm_solve_with_order(problem: &Problem) -> MarchingRun {
    let grid = problem.grid();
    let (m, n, h) = (grid.m(), grid.n(), grid.h());
    let mut values = problem.initial_values();
    let mut label = vec![Label::Far; grid.len()];
    let mut heap = IndexedMinHeap::new(grid.len());
    let mut updates = 0u64;

    for &(e, _) in problem.exits() {
        label[e] = Label::Accepted;
    }

    // Accepted neighbours are skipped: by causality their recomputation
    // could never lower them.
    let mut relax = |idx: usize, values: &mut crate::grid::ValueField, label: &mut [Label], heap: &mut IndexedMinHeap| {
        if label[idx] == Label::Accepted {
            return;
        }
        let (i, j) = (idx / n, idx % n);
        let nb = gather(values.as_slice(), idx, i, j, m, n);
        let cand = node_update(&nb, problem.speed(idx), h);
        updates += 1;
        if cand < values[idx] {
            values[idx] = cand;
        }
        if label[idx] == Label::Far {
            label[idx] = Label::Considered;
            heap.insert(idx, values[idx]);
        } else {
            heap.decrease_key(idx, values[idx]);
        }
    };

    for &(e, _) in problem.exits() {
        for nb in grid.neighbors(e) {
            relax(nb, &mut values, &mut label, &mut heap);
        }
    }

    let mut order = Vec::with_capacity(grid.len() - problem.exits().len());
    while let Some((idx, _)) = heap.pop() {
        label[idx] = Label::Accepted;
        order.push(idx);
        for nb in grid.neighbors(idx) {
            relax(nb, &mut values, &mut label, &mut heap);
        }
    }

    let removals = order.len() as u64;
    let mut output = SolverOutput::new(values);
    output.node_updates = updates;
    output.heap_removals = removals;
    MarchingRun { output, order }
}

/// Node orders of sweep `sweep_number` on an `m × n` grid as
/// `(i-order, j-order)`.
pub fn sweep_order(sweep_number: usize, m: usize, n: usize) -> (Vec<usize>, Vec<usize>) {
    let dir = Direction::from_sweep_number(sweep_number);
    let axis = |len: usize, asc: bool| -> Vec<usize> {
        if asc {
            (0..len).collect()
        } else {
            (0..len).rev().collect()
        }
    };
    (axis(m, dir.i_ascending()), axis(n, dir.j_ascending()))
}

fn full_rect(problem: &Problem) -> Rect {
    Rect::new(0, problem.grid().m(), 0, problem.grid().n())
}

pub fn fsm_solve(problem: &Problem) -> SolverOutput {
    let mut values = problem.initial_values();
    let rect = full_rect(problem);
    let mut sweeps = 0usize;
    let mut updates = 0u64;
    loop {
        let dir = Direction::from_sweep_number(sweeps);
        let r = sweep_plain(problem, values.as_mut_slice(), rect, dir, UpdateRule::Full);
        sweeps += 1;
        updates += r.updates;
        if !r.changed {
            break;
        }
    }
    let mut output = SolverOutput::new(values);
    output.sweeps = sweeps as u64;
    output.node_updates = updates;
    output
}

pub fn lsm_solve(problem: &Problem) -> SolverOutput {
    let mut values = problem.initial_values();
    let mut locked = initial_locks(problem);
    let rect = full_rect(problem);
    let mut sweeps = 0usize;
    let mut updates = 0u64;
    loop {
        let dir = Direction::from_sweep_number(sweeps);
        let r = sweep_locking(problem, values.as_mut_slice(), &mut locked, rect, dir);
        sweeps += 1;
        updates += r.updates;
        if !r.changed {
            break;
        }
    }
    let mut output = SolverOutput::new(values);
    output.sweeps = sweeps as u64;
    output.node_updates = updates;
    output
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_problem, ExitSpec, Grid, ProblemSpec, SpeedField};
    use crate::problems::SpeedSpec;

    fn three_by_three() -> Problem {
        let g = Grid::new(3, 3, 1.0, (0.0, 0.0)).unwrap();
        Problem::new(g, SpeedField::Analytic(SpeedSpec::Constant(1.0)), vec![(g.index(1, 1), 0.0)]).unwrap()
    }

    #[test]
    fn sweep_order_cases() {
        assert_eq!(sweep_order(0, 3, 3), (vec![0, 1, 2], vec![0, 1, 2]));
        assert_eq!(sweep_order(1, 2, 3), (vec![0, 1], vec![2, 1, 0]));
        assert_eq!(sweep_order(2, 2, 2), (vec![1, 0], vec![1, 0]));
        assert_eq!(sweep_order(3, 2, 2), (vec![1, 0], vec![0, 1]));
        assert_eq!(sweep_order(7, 4, 5), sweep_order(3, 4, 5));
    }

    #[test]
    fn fmm_three_by_three() {
        let p = three_by_three();
        let run = fmm_solve_with_order(&p);
        let v = &run.output.values;
        for (i, j) in [(0, 1), (1, 0), (2, 1), (1, 2)] {
            assert!((v.at(i, j) - 1.0).abs() < 1e-15);
        }
        for (i, j) in [(0, 0), (2, 0), (0, 2), (2, 2)] {
            assert!((v.at(i, j) - (1.0 + std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-12);
        }
        assert_eq!(run.order.len(), 8);
        assert_eq!(run.output.heap_removals, 8);
    }

    #[test]
    fn all_exit_problem_is_trivial() {
        let g = Grid::unit_square(6).unwrap();
        let exits = (0..g.len()).map(|k| (k, 0.5 * k as f64)).collect();
        let p = Problem::new(g, SpeedField::Analytic(SpeedSpec::Constant(3.0)), exits).unwrap();
        let fmm = fmm_solve(&p);
        assert_eq!(fmm.node_updates, 0);
        assert_eq!(fmm.values, p.initial_values());
        let fsm = fsm_solve(&p);
        assert_eq!(fsm.sweeps, 1);
        assert_eq!(fsm.values, p.initial_values());
        let lsm = lsm_solve(&p);
        assert_eq!(lsm.node_updates, 0);
        assert_eq!(lsm.sweeps, 1);
    }

    #[test]
    fn acceptance_order_is_non_decreasing() {
        let p = build_problem(&ProblemSpec {
            speed: SpeedSpec::checkerboard(5, 1.0, 2.0).unwrap(),
            grid_size: 41,
            exits: ExitSpec::point(0.5, 0.5),
        })
        .unwrap();
        let run = fmm_solve_with_order(&p);
        let v = &run.output.values;
        assert!(run.order.windows(2).all(|w| v[w[0]] <= v[w[1]]));
        assert_eq!(run.order.len(), p.grid().len() - 1);
    }

    #[test]
    fn lsm_matches_fsm_and_saves_updates() {
        let p = build_problem(&ProblemSpec {
            speed: SpeedSpec::sinusoid_a(),
            grid_size: 65,
            exits: ExitSpec::point(0.5, 0.5),
        })
        .unwrap();
        let fsm = fsm_solve(&p);
        let lsm = lsm_solve(&p);
        assert_eq!(fsm.values, lsm.values);
        assert_eq!(fsm.sweeps, lsm.sweeps);
        assert!(lsm.node_updates < fsm.node_updates);
    }
}
