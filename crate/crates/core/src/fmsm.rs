//! Fast Marching-Sweeping: Fast Marching on a coarse grid of cell centers
//! orders the cells, then each cell is swept once per upwind direction.

use crate::cells::{CellDecomposition, Side};
use crate::classic::fmm_solve_with_order;
use crate::error::{EikonalError, Result};
use crate::grid::{CellStats, Grid, Problem, SolverOutput, SpeedField};
use crate::local::{DirSet, Direction};
use crate::sweep::{sweep_plain, UpdateRule};

/// Coarse problem with one node per cell, at the cell centers.
#[derive(Clone, Debug)]
pub struct CoarseProblem {
    pub problem: Problem,
    /// Coarse exit nodes (cell ids) with their costs.
    pub exit_cells: Vec<(usize, f64)>,
}

pub fn build_coarse_problem(problem: &Problem, cells: &CellDecomposition) -> Result<CoarseProblem> {
    let (cx, cy) = (cells.cells_x(), cells.cells_y());
    if cx < 2 || cy < 2 {
        return Err(EikonalError::config("the coarse grid needs at least 2×2 cells"));
    }
    let g = problem.grid();
    if g.m() / cx != g.n() / cy {
        return Err(EikonalError::config("coarse grid needs square cells"));
    }
    let coarse_grid = Grid::new(cx, cy, cells.h_c(), cells.center(0))?;
    let speed: Vec<f64> = (0..cells.len()).map(|c| problem.speed_at_point(cells.center(c))).collect();

    let mut per_cell: Vec<Vec<(usize, f64)>> = vec![Vec::new(); cells.len()];
    for &(e, q) in problem.exits() {
        per_cell[cells.cell_of(e)].push((e, q));
    }
    let exit_count = per_cell.iter().filter(|v| !v.is_empty()).count();
    let mut exit_cells = Vec::with_capacity(exit_count);
    for (c, exits) in per_cell.iter().enumerate() {
        if exits.is_empty() {
            continue;
        }
        let cost = if exit_count == 1 {
            exits.iter().map(|e| e.1).fold(f64::INFINITY, f64::min)
        } else {
            // one-sided estimate from the center to the nearest exit node
            let (x, y) = cells.center(c);
            exits
                .iter()
                .map(|&(e, q)| {
                    let (i, j) = g.coords(e);
                    let (ex, ey) = g.position(i, j);
                    q + (ex - x).hypot(ey - y) / speed[c]
                })
                .fold(f64::INFINITY, f64::min)
        };
        exit_cells.push((c, cost));
    }
    let coarse = Problem::new(coarse_grid, SpeedField::Sampled(speed), exit_cells.clone())?;
    Ok(CoarseProblem {
        problem: coarse,
        exit_cells,
    })
}

/// Sweep directions for a cell given which neighbouring sides hold cells
/// processed earlier. Corners flanked by two processed sides win; without
/// such a corner every processed side contributes both of its directions.
pub fn sweep_directions(accepted: &[Side]) -> DirSet {
    let has = |s: Side| accepted.contains(&s);
    let mut corners = DirSet::EMPTY;
    for (d, a, b) in [
        (Direction::NE, Side::North, Side::East),
        (Direction::NW, Side::North, Side::West),
        (Direction::SE, Side::South, Side::East),
        (Direction::SW, Side::South, Side::West),
    ] {
        if has(a) && has(b) {
            corners.insert(d);
        }
    }
    if !corners.is_empty() {
        return corners;
    }
    accepted.iter().fold(DirSet::EMPTY, |acc, s| acc.union(s.entering()))
}

pub fn fmsm_solve(problem: &Problem, cells: &CellDecomposition) -> Result<SolverOutput> {
    if cells.grid() != problem.grid() {
        return Err(EikonalError::config("cell decomposition was built for a different grid"));
    }
    let coarse = build_coarse_problem(problem, cells)?;
    let run = fmm_solve_with_order(&coarse.problem);

    let mut exit_cells = coarse.exit_cells.clone();
    exit_cells.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let order: Vec<usize> = exit_cells.iter().map(|e| e.0).chain(run.order.iter().copied()).collect();
    debug_assert_eq!(order.len(), cells.len());

    let mut values = problem.initial_values();
    let mut done = vec![false; cells.len()];
    let mut stats = CellStats {
        cells: cells.len(),
        ..CellStats::default()
    };
    let mut updates = run.output.node_updates;
    let coarse_values = run.output.values.as_slice();
    let mut is_exit_cell = vec![false; cells.len()];
    for &(c, _) in &exit_cells {
        is_exit_cell[c] = true;
    }
    let mut sides = Vec::with_capacity(4);
    for &c in &order {
        let rect = cells.rect(c);
        // a neighbour with an equal coarse value is not upwind, whichever
        // of the two left the heap first
        sides.clear();
        sides.extend(
            cells
                .neighbors(c)
                .iter()
                .filter(|(k, _)| done[*k] && coarse_values[*k] < coarse_values[c])
                .map(|&(_, s)| s.opposite()),
        );
        let dirs = if is_exit_cell[c] { DirSet::EMPTY } else { sweep_directions(&sides) };
        if dirs.is_empty() {
            let mut k = 0usize;
            loop {
                let r = sweep_plain(
                    problem,
                    values.as_mut_slice(),
                    rect,
                    Direction::from_sweep_number(k),
                    UpdateRule::Full,
                );
                k += 1;
                updates += r.updates;
                if !r.changed {
                    break;
                }
            }
            stats.sweeps += k as u64;
        } else {
            for dir in Direction::ROTATION.into_iter().filter(|d| dirs.contains(*d)) {
                let r = sweep_plain(problem, values.as_mut_slice(), rect, dir, UpdateRule::Directional);
                updates += r.updates;
                stats.sweeps += 1;
            }
        }
        done[c] = true;
        stats.removals += 1;
    }

    let mut output = SolverOutput::new(values);
    output.node_updates = updates;
    output.heap_removals = run.output.heap_removals;
    output.sweeps = stats.sweeps;
    output.cells = Some(stats);
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::build_cells;
    use crate::classic::fmm_solve;
    use crate::grid::{build_problem, ExitSpec, ProblemSpec};
    use crate::problems::SpeedSpec;
    use Direction::*;

    fn problem(speed: SpeedSpec, m: usize, exits: ExitSpec) -> Problem {
        build_problem(&ProblemSpec {
            speed,
            grid_size: m,
            exits,
        })
        .unwrap()
    }

    #[test]
    fn direction_panels() {
        assert_eq!(sweep_directions(&[Side::West]), DirSet::of(&[NW, SW]));
        assert_eq!(sweep_directions(&[Side::West, Side::North]), DirSet::of(&[NW]));
        assert_eq!(sweep_directions(&[Side::West, Side::North, Side::East]), DirSet::of(&[NW, NE]));
        assert_eq!(sweep_directions(&[Side::West, Side::East]), DirSet::FULL);
        assert_eq!(sweep_directions(&[Side::West, Side::North, Side::East, Side::South]), DirSet::FULL);
        assert_eq!(sweep_directions(&[]), DirSet::EMPTY);
    }

    #[test]
    fn one_exit_cell_for_point_source() {
        let p = problem(SpeedSpec::checkerboard(11, 1.0, 2.0).unwrap(), 176, ExitSpec::point(0.5, 0.5));
        let cells = build_cells(p.grid(), 22, 22).unwrap();
        let c = build_coarse_problem(&p, &cells).unwrap();
        assert_eq!(c.exit_cells.len(), 1);
        assert_eq!(c.exit_cells[0].1, 0.0);
        assert_eq!(c.problem.grid().len(), 484);
    }

    #[test]
    fn boundary_exit_cells_are_perimeter() {
        let p = problem(SpeedSpec::constant(), 176, ExitSpec::Boundary);
        let cells = build_cells(p.grid(), 22, 22).unwrap();
        let c = build_coarse_problem(&p, &cells).unwrap();
        assert_eq!(c.exit_cells.len(), 84);
        // corner cell center sits at (3.5h, 3.5h); nearest exits are (0, 3) and (3, 0)
        let h = p.grid().h();
        let corner = c.exit_cells.iter().find(|e| e.0 == 0).unwrap();
        assert!((corner.1 - 3.5f64.hypot(0.5) * h).abs() < 1e-12);
    }

    #[test]
    fn needs_two_by_two() {
        let p = problem(SpeedSpec::constant(), 20, ExitSpec::point(0.5, 0.5));
        let cells = build_cells(p.grid(), 1, 4).unwrap();
        assert!(fmsm_solve(&p, &cells).unwrap_err().is_config());
    }

    #[test]
    fn one_pass_and_upper_bound() {
        let p = problem(SpeedSpec::sinusoid_a(), 60, ExitSpec::point(0.5, 0.5));
        let exact = fmm_solve(&p);
        for nc in [2, 4, 6, 12, 30] {
            let cells = build_cells(p.grid(), nc, nc).unwrap();
            let out = fmsm_solve(&p, &cells).unwrap();
            assert_eq!(out.cells.as_ref().unwrap().removals as usize, cells.len());
            for (v, u) in out.values.as_slice().iter().zip(exact.values.as_slice()) {
                assert!(*v >= u - 1e-12);
                assert!(v.is_finite());
            }
        }
    }

    #[test]
    fn boundary_exits_sweep_every_exit_cell_to_convergence() {
        let p = problem(SpeedSpec::sinusoid_b(), 48, ExitSpec::Boundary);
        let exact = fmm_solve(&p);
        let cells = build_cells(p.grid(), 6, 6).unwrap();
        let out = fmsm_solve(&p, &cells).unwrap();
        for (v, u) in out.values.as_slice().iter().zip(exact.values.as_slice()) {
            assert!(*v >= u - 1e-12);
            assert!(v.is_finite());
        }
        // 20 perimeter cells, each needing at least two sweeps
        assert!(out.cells.unwrap().sweeps >= 40 + 16);
    }

    #[test]
    fn tied_neighbour_is_not_upwind() {
        // cells (10,11) and (9,11) share the coarse value h_c; the former sits
        // right above the source and must still sweep westward
        let p = problem(SpeedSpec::checkerboard(11, 1.0, 2.0).unwrap(), 176, ExitSpec::point(0.5, 0.5));
        let cells = build_cells(p.grid(), 22, 22).unwrap();
        let c = build_coarse_problem(&p, &cells).unwrap();
        let v = fmm_solve(&c.problem).values;
        assert_eq!(v[cells.id(10, 11)], v[cells.id(9, 11)]);
        let exact = fmm_solve(&p);
        let out = fmsm_solve(&p, &cells).unwrap();
        let g = p.grid();
        for i in 80..88 {
            let k = g.index(i, 88);
            assert!(out.values[k] - exact.values[k] < 1e-3, "node ({i}, 88)");
        }
    }

    #[test]
    fn coarse_order_is_monotone() {
        let p = problem(SpeedSpec::checkerboard(5, 1.0, 2.0).unwrap(), 50, ExitSpec::point(0.3, 0.6));
        let cells = build_cells(p.grid(), 10, 10).unwrap();
        let c = build_coarse_problem(&p, &cells).unwrap();
        let run = fmm_solve_with_order(&c.problem);
        let v = &run.output.values;
        assert!(run.order.windows(2).all(|w| v[w[0]] <= v[w[1]]));
    }

    #[test]
    fn constant_speed_is_exact() {
        let p = problem(SpeedSpec::constant(), 45, ExitSpec::point(0.5, 0.5));
        let exact = fmm_solve(&p);
        for nc in [3, 5, 9, 15] {
            let cells = build_cells(p.grid(), nc, nc).unwrap();
            let out = fmsm_solve(&p, &cells).unwrap();
            for (v, u) in out.values.as_slice().iter().zip(exact.values.as_slice()) {
                assert!((v - u).abs() <= 1e-12 * u.max(1.0), "{nc} cells");
            }
        }
    }
}
