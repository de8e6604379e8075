//! Rectangular cell decompositions and the per-border logic shared by the
//! cell-based solvers.

use crate::error::{EikonalError, Result};
use crate::grid::{Grid, Problem};
use crate::local::{DirSet, Direction};
use crate::sweep::Rect;

/// Where the processed cell lies relative to the target cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    West,
    East,
    South,
    North,
}

impl Side {
    /// The two sweep directions that carry information across this border
    /// into the target cell.
    pub fn entering(self) -> DirSet {
        match self {
            Side::West => DirSet::of(&[Direction::NW, Direction::SW]),
            Side::East => DirSet::of(&[Direction::NE, Direction::SE]),
            Side::North => DirSet::of(&[Direction::NW, Direction::NE]),
            Side::South => DirSet::of(&[Direction::SW, Direction::SE]),
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::West => Side::East,
            Side::East => Side::West,
            Side::South => Side::North,
            Side::North => Side::South,
        }
    }

    /// Unit vector pointing from the processed cell into the target cell.
    fn step(self) -> (f64, f64) {
        match self {
            Side::West => (1.0, 0.0),
            Side::East => (-1.0, 0.0),
            Side::South => (0.0, 1.0),
            Side::North => (0.0, -1.0),
        }
    }
}

/// Split of the grid into `cells_x × cells_y` node rectangles. Cell `(a, b)`
/// has id `a * cells_y + b`, so ids follow the node layout.
#[derive(Clone, Debug, PartialEq)]
pub struct CellDecomposition {
    grid: Grid,
    cells_x: usize,
    cells_y: usize,
    /// Node boundaries along each axis, `cells + 1` entries.
    xs: Vec<usize>,
    ys: Vec<usize>,
    h_c: f64,
    node_cell: Vec<u32>,
    neighbors: Vec<Vec<(usize, Side)>>,
}

fn split_axis(nodes: usize, cells: usize) -> Vec<usize> {
    let base = nodes / cells;
    let mut cuts: Vec<usize> = (0..cells).map(|k| k * base).collect();
    cuts.push(nodes);
    cuts
}

/// Cells get `nodes / cells` nodes per axis; the last one takes the rest.
pub fn build_cells(grid: &Grid, cells_x: usize, cells_y: usize) -> Result<CellDecomposition> {
    if cells_x == 0 || cells_y == 0 {
        return Err(EikonalError::config("cell counts must be positive"));
    }
    if cells_x > grid.m() || cells_y > grid.n() {
        return Err(EikonalError::config(format!(
            "{cells_x}×{cells_y} cells do not fit a {}×{} grid",
            grid.m(),
            grid.n()
        )));
    }
    let xs = split_axis(grid.m(), cells_x);
    let ys = split_axis(grid.n(), cells_y);
    let mut node_cell = vec![0u32; grid.len()];
    for a in 0..cells_x {
        for b in 0..cells_y {
            let id = (a * cells_y + b) as u32;
            for i in xs[a]..xs[a + 1] {
                for j in ys[b]..ys[b + 1] {
                    node_cell[grid.index(i, j)] = id;
                }
            }
        }
    }
    let mut neighbors = Vec::with_capacity(cells_x * cells_y);
    for a in 0..cells_x {
        for b in 0..cells_y {
            // side of *this* cell as seen from the neighbour
            let mut nb = Vec::with_capacity(4);
            if a > 0 {
                nb.push(((a - 1) * cells_y + b, Side::East));
            }
            if a + 1 < cells_x {
                nb.push(((a + 1) * cells_y + b, Side::West));
            }
            if b > 0 {
                nb.push((a * cells_y + b - 1, Side::North));
            }
            if b + 1 < cells_y {
                nb.push((a * cells_y + b + 1, Side::South));
            }
            neighbors.push(nb);
        }
    }
    let h_c = (grid.m() / cells_x) as f64 * grid.h();
    Ok(CellDecomposition {
        grid: *grid,
        cells_x,
        cells_y,
        xs,
        ys,
        h_c,
        node_cell,
        neighbors,
    })
}

impl CellDecomposition {
    pub fn cells_x(&self) -> usize {
        self.cells_x
    }

    pub fn cells_y(&self) -> usize {
        self.cells_y
    }

    pub fn len(&self) -> usize {
        self.cells_x * self.cells_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Center-to-center spacing of the regular cells along x.
    pub fn h_c(&self) -> f64 {
        self.h_c
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn id(&self, a: usize, b: usize) -> usize {
        a * self.cells_y + b
    }

    pub fn coords(&self, c: usize) -> (usize, usize) {
        (c / self.cells_y, c % self.cells_y)
    }

    pub fn rect(&self, c: usize) -> Rect {
        let (a, b) = self.coords(c);
        Rect::new(self.xs[a], self.xs[a + 1], self.ys[b], self.ys[b + 1])
    }

    #[inline]
    pub fn cell_of(&self, idx: usize) -> usize {
        self.node_cell[idx] as usize
    }

    /// Adjacent cells, each paired with the side this cell occupies
    /// relative to it.
    pub fn neighbors(&self, c: usize) -> &[(usize, Side)] {
        &self.neighbors[c]
    }

    /// Geometric center of the cell's node rectangle.
    pub fn center(&self, c: usize) -> (f64, f64) {
        let r = self.rect(c);
        let (x0, y0) = self.grid.position(r.i0, r.j0);
        let (x1, y1) = self.grid.position(r.i1 - 1, r.j1 - 1);
        (0.5 * (x0 + x1), 0.5 * (y0 + y1))
    }

    /// Outside nodes adjacent to the cell.
    pub fn halo(&self, c: usize) -> Vec<usize> {
        let r = self.rect(c);
        let g = &self.grid;
        let mut out = Vec::new();
        for j in r.j0..r.j1 {
            if r.i0 > 0 {
                out.push(g.index(r.i0 - 1, j));
            }
            if r.i1 < g.m() {
                out.push(g.index(r.i1, j));
            }
        }
        for i in r.i0..r.i1 {
            if r.j0 > 0 {
                out.push(g.index(i, r.j0 - 1));
            }
            if r.j1 < g.n() {
                out.push(g.index(i, r.j1));
            }
        }
        out
    }

    /// Facing node pairs `(x_i in c, x_j in target)` along the border where
    /// `c` lies on `side` of `target`. Vertical borders run north to south,
    /// horizontal ones west to east.
    pub fn border_pairs(&self, c: usize, side: Side) -> Vec<(usize, usize)> {
        let r = self.rect(c);
        let g = &self.grid;
        match side {
            Side::West => (r.j0..r.j1).rev().map(|j| (g.index(r.i1 - 1, j), g.index(r.i1, j))).collect(),
            Side::East => (r.j0..r.j1).rev().map(|j| (g.index(r.i0, j), g.index(r.i0 - 1, j))).collect(),
            Side::South => (r.i0..r.i1).map(|i| (g.index(i, r.j1 - 1), g.index(i, r.j1))).collect(),
            Side::North => (r.i0..r.i1).map(|i| (g.index(i, r.j0), g.index(i, r.j0 - 1))).collect(),
        }
    }
}

/// Estimated value of a cell reached across a border whose largest value is
/// `v_boundary`.
pub fn cell_value_candidate(v_boundary: f64, f_probe: f64, h: f64, h_c: f64) -> f64 {
    v_boundary + 0.5 * (h + h_c) / f_probe
}

/// Outcome of inspecting one border after a cell was processed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BorderScan {
    pub should_add: bool,
    pub flags: DirSet,
    pub candidate: f64,
}

/// Inspect the border between the just-processed cell `c` and the target
/// cell it faces from `side`.
///
/// `before` holds the values of the border nodes of `c` (the first entry of
/// each pair) prior to processing, in the order of
/// [`CellDecomposition::border_pairs`].
pub fn scan_cell_boundary(
    problem: &Problem,
    cells: &CellDecomposition,
    values: &[f64],
    pairs: &[(usize, usize)],
    before: &[f64],
    side: Side,
    first_removal: bool,
) -> BorderScan {
    debug_assert_eq!(pairs.len(), before.len());
    let mut should_add = false;
    let mut argmax = pairs[0].0;
    for (&(xi, xj), &old) in pairs.iter().zip(before) {
        if values[xi] > values[argmax] {
            argmax = xi;
        }
        if should_add || problem.is_exit(xj) || values[xi] >= values[xj] {
            continue;
        }
        let changed = values[xi] < old;
        if changed || (first_removal && problem.is_exit(xi)) {
            should_add = true;
        }
    }
    let g = problem.grid();
    let v = values[argmax];
    let candidate = if v.is_finite() {
        let (i, j) = g.coords(argmax);
        let (x, y) = g.position(i, j);
        let d = 0.5 * (g.h() + cells.h_c());
        let (dx, dy) = side.step();
        let (x0, y0) = g.origin();
        let (x1, y1) = g.extent();
        let probe = ((x + d * dx).clamp(x0, x1), (y + d * dy).clamp(y0, y1));
        cell_value_candidate(v, problem.speed_at_point(probe), g.h(), cells.h_c())
    } else {
        f64::INFINITY
    };
    BorderScan {
        should_add,
        flags: if should_add { side.entering() } else { DirSet::EMPTY },
        candidate,
    }
}

/// Narrow the entering directions of a border using the shape of its
/// values. `seq` runs north to south for vertical borders and west to east
/// for horizontal ones; `side` is where the upstream cell lies.
pub fn monotonicity_flags(seq: &[f64], side: Side) -> DirSet {
    let non_decreasing = seq.windows(2).all(|w| w[0] <= w[1]);
    let non_increasing = seq.windows(2).all(|w| w[0] >= w[1]);
    // values growing along the border mean the front arrives from its start
    let (from_start, from_end) = match side {
        Side::West => (Direction::NW, Direction::SW),
        Side::East => (Direction::NE, Direction::SE),
        Side::North => (Direction::NW, Direction::NE),
        Side::South => (Direction::SW, Direction::SE),
    };
    match (non_decreasing, non_increasing) {
        (true, false) => DirSet::of(&[from_start]),
        (false, true) => DirSet::of(&[from_end]),
        _ => DirSet::of(&[from_start, from_end]),
    }
}
