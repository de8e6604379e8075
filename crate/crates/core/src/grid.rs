//! Grid geometry, problem instances, value storage and solver output.
//!
//! Nodes are vertex-centered: node `(i, j)` sits at `origin + (i·h, j·h)`.
//! The flat index of `(i, j)` is `i·n + j`, so the `j` (y) index runs
//! fastest, matching the inner loop of every sweep.

use std::ops::{Index, IndexMut};

use crate::error::{EikonalError, Result};
use crate::problems::SpeedSpec;

/// Relative slack used when deciding whether a point is inside the grid box
/// and whether it sits exactly halfway between two nodes.
const GEOM_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    m: usize,
    n: usize,
    h: f64,
    origin: (f64, f64),
}

impl Grid {
    pub fn new(m: usize, n: usize, h: f64, origin: (f64, f64)) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(EikonalError::config(format!("grid needs at least 2 nodes per axis, got {m}x{n}")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(EikonalError::config(format!("grid spacing must be positive, got {h}")));
        }
        Ok(Grid { m, n, h, origin })
    }

    /// `m × m` nodes covering the closed unit square, `h = 1/(m-1)`.
    pub fn unit_square(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(EikonalError::config(format!("grid needs at least 2 nodes per axis, got {m}")));
        }
        Grid::new(m, m, 1.0 / (m - 1) as f64, (0.0, 0.0))
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.m * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.m && j < self.n);
        i * self.n + j
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.n, idx % self.n)
    }

    #[inline]
    pub fn position(&self, i: usize, j: usize) -> (f64, f64) {
        (self.origin.0 + i as f64 * self.h, self.origin.1 + j as f64 * self.h)
    }

    /// Upper corner of the node bounding box.
    pub fn extent(&self) -> (f64, f64) {
        self.position(self.m - 1, self.n - 1)
    }

    /// Nearest node to `p`. Exact half-way ties go to the smaller index on
    /// each axis.
    pub fn snap_point_to_node(&self, p: (f64, f64)) -> Result<(usize, usize)> {
        let i = snap_axis(p.0, self.origin.0, self.h, self.m)
            .ok_or_else(|| EikonalError::Domain(format!("point {p:?} lies outside the grid")))?;
        let j = snap_axis(p.1, self.origin.1, self.h, self.n)
            .ok_or_else(|| EikonalError::Domain(format!("point {p:?} lies outside the grid")))?;
        Ok((i, j))
    }

    /// Flat indices of the (up to four) edge neighbours of `idx`.
    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> {
        let (i, j) = self.coords(idx);
        let n = self.n;
        let m = self.m;
        let west = (i > 0).then(|| idx - n);
        let east = (i + 1 < m).then(|| idx + n);
        let south = (j > 0).then(|| idx - 1);
        let north = (j + 1 < n).then(|| idx + 1);
        [west, east, south, north].into_iter().flatten()
    }
}

fn snap_axis(x: f64, x0: f64, h: f64, count: usize) -> Option<usize> {
    let t = (x - x0) / h;
    let last = (count - 1) as f64;
    if !t.is_finite() || t < -GEOM_EPS || t > last + GEOM_EPS {
        return None;
    }
    let t = t.clamp(0.0, last);
    let base = t.floor();
    let frac = t - base;
    let k = if frac > 0.5 + GEOM_EPS { base + 1.0 } else { base };
    Some((k as usize).min(count - 1))
}

/// Speed as seen by the solvers: either an analytic field evaluated on
/// demand or one value per node (used for coarse problems whose nodes sit
/// at cell centers).
#[derive(Clone, Debug, PartialEq)]
pub enum SpeedField {
    Analytic(SpeedSpec),
    Sampled(Vec<f64>),
}

/// Exit set description, before discretization.
#[derive(Clone, Debug, PartialEq)]
pub enum ExitSpec {
    /// Point sources, each snapped to its nearest node.
    Points(Vec<((f64, f64), f64)>),
    /// Every node on the outer boundary, with cost 0.
    Boundary,
    /// Explicit node list with costs.
    Nodes(Vec<((usize, usize), f64)>),
}

impl ExitSpec {
    pub fn point(x: f64, y: f64) -> Self {
        ExitSpec::Points(vec![((x, y), 0.0)])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub speed: SpeedSpec,
    pub grid_size: usize,
    pub exits: ExitSpec,
}

/// One discretized Eikonal boundary value problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    grid: Grid,
    speed: SpeedField,
    is_exit: Vec<bool>,
    exits: Vec<(usize, f64)>,
}

impl Problem {
    /// Build a problem from already-discretized exit nodes. Duplicate nodes
    /// keep the smallest cost.
    pub fn new(grid: Grid, speed: SpeedField, exits: Vec<(usize, f64)>) -> Result<Self> {
        if exits.is_empty() {
            return Err(EikonalError::config("exit set is empty"));
        }
        if let SpeedField::Sampled(v) = &speed {
            if v.len() != grid.len() {
                return Err(EikonalError::config(format!(
                    "sampled speed has {} entries for a {}-node grid",
                    v.len(),
                    grid.len()
                )));
            }
            if v.iter().any(|&f| !(f > 0.0) || !f.is_finite()) {
                return Err(EikonalError::config("sampled speed must be positive and finite"));
            }
        }
        let mut exits = exits;
        for &(idx, q) in &exits {
            if idx >= grid.len() {
                return Err(EikonalError::Domain(format!("exit node {idx} is off the grid")));
            }
            if !q.is_finite() {
                return Err(EikonalError::config(format!("exit cost {q} at node {idx} is not finite")));
            }
        }
        exits.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        exits.dedup_by_key(|e| e.0);
        let mut is_exit = vec![false; grid.len()];
        for &(idx, _) in &exits {
            is_exit[idx] = true;
        }
        Ok(Problem {
            grid,
            speed,
            is_exit,
            exits,
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn speed_field(&self) -> &SpeedField {
        &self.speed
    }

    /// Speed at an arbitrary point (analytic fields only; sampled fields
    /// fall back to the nearest node).
    pub fn speed_at_point(&self, p: (f64, f64)) -> f64 {
        match &self.speed {
            SpeedField::Analytic(s) => s.eval(p.0, p.1),
            SpeedField::Sampled(v) => {
                let (x1, y1) = self.grid.extent();
                let (x0, y0) = self.grid.origin;
                let q = (p.0.clamp(x0, x1), p.1.clamp(y0, y1));
                let (i, j) = self.grid.snap_point_to_node(q).expect("clamped point lies in the grid");
                v[self.grid.index(i, j)]
            }
        }
    }

    #[inline]
    pub fn speed(&self, idx: usize) -> f64 {
        match &self.speed {
            SpeedField::Analytic(s) => {
                let (i, j) = self.grid.coords(idx);
                let (x, y) = self.grid.position(i, j);
                s.eval(x, y)
            }
            SpeedField::Sampled(v) => v[idx],
        }
    }

    #[inline]
    pub fn is_exit(&self, idx: usize) -> bool {
        self.is_exit[idx]
    }

    pub fn exit_mask(&self) -> &[bool] {
        &self.is_exit
    }

    /// Exit nodes and their costs, sorted by node index.
    pub fn exits(&self) -> &[(usize, f64)] {
        &self.exits
    }

    /// Exit costs on exit nodes, `+inf` elsewhere.
    pub fn initial_values(&self) -> ValueField {
        let mut v = ValueField::filled(self.grid.m, self.grid.n, f64::INFINITY);
        for &(idx, q) in &self.exits {
            v.values[idx] = q;
        }
        v
    }
}

/// Discretize a problem description on the unit square.
pub fn build_problem(spec: &ProblemSpec) -> Result<Problem> {
    let grid = Grid::unit_square(spec.grid_size)?;
    let exits = match &spec.exits {
        ExitSpec::Points(points) => points
            .iter()
            .map(|&(p, q)| {
                let (i, j) = grid.snap_point_to_node(p)?;
                Ok((grid.index(i, j), q))
            })
            .collect::<Result<Vec<_>>>()?,
        ExitSpec::Boundary => (0..grid.len())
            .filter(|&idx| {
                let (i, j) = grid.coords(idx);
                i == 0 || j == 0 || i + 1 == grid.m || j + 1 == grid.n
            })
            .map(|idx| (idx, 0.0))
            .collect(),
        ExitSpec::Nodes(nodes) => nodes
            .iter()
            .map(|&((i, j), q)| {
                if i >= grid.m || j >= grid.n {
                    Err(EikonalError::Domain(format!("exit node ({i}, {j}) is off the grid")))
                } else {
                    Ok((grid.index(i, j), q))
                }
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Problem::new(grid, SpeedField::Analytic(spec.speed.clone()), exits)
}

/// Node values of one solve, stored with the same flat layout as [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValueField {
    m: usize,
    n: usize,
    values: Vec<f64>,
}

impl ValueField {
    pub fn filled(m: usize, n: usize, v: f64) -> Self {
        ValueField {
            m,
            n,
            values: vec![v; m * n],
        }
    }

    pub fn from_vec(m: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != m * n {
            return Err(EikonalError::Shape {
                expected: (m, n),
                got: (values.len(), 1),
            });
        }
        Ok(ValueField { m, n, values })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

impl Index<usize> for ValueField {
    type Output = f64;

    #[inline]
    fn index(&self, idx: usize) -> &f64 {
        &self.values[idx]
    }
}

impl IndexMut<usize> for ValueField {
    #[inline]
    fn index_mut(&mut self, idx: usize) -> &mut f64 {
        &mut self.values[idx]
    }
}

/// Per-run statistics of the cell-based solvers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellStats {
    pub cells: usize,
    pub removals: u64,
    pub sweeps: u64,
    pub mon_checks: u64,
    pub mon_single: u64,
}

impl CellStats {
    /// Average heap removals per cell.
    pub fn avhr(&self) -> f64 {
        if self.cells == 0 {
            return 0.0;
        }
        self.removals as f64 / self.cells as f64
    }

    /// Average in-cell sweeps per cell.
    pub fn avs(&self) -> f64 {
        if self.cells == 0 {
            return 0.0;
        }
        self.sweeps as f64 / self.cells as f64
    }

    /// Percentage of monotonicity checks that narrowed to one direction.
    pub fn mon_pct(&self) -> f64 {
        if self.mon_checks == 0 {
            return 0.0;
        }
        100.0 * self.mon_single as f64 / self.mon_checks as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOutput {
    pub values: ValueField,
    /// Full-grid sweeps (sweeping solvers only), including the final
    /// verification sweep.
    pub sweeps: u64,
    pub node_updates: u64,
    pub heap_removals: u64,
    pub cells: Option<CellStats>,
}

impl SolverOutput {
    pub(crate) fn new(values: ValueField) -> Self {
        SolverOutput {
            values,
            sweeps: 0,
            node_updates: 0,
            heap_removals: 0,
            cells: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snap_exact_node() {
        let g = Grid::unit_square(3).unwrap();
        assert_eq!(g.snap_point_to_node((0.5, 0.5)).unwrap(), (1, 1));
    }

    #[test]
    fn snap_nearest_corner() {
        let g = Grid::unit_square(2).unwrap();
        assert_eq!(g.snap_point_to_node((0.49, 0.49)).unwrap(), (0, 0));
        assert_eq!(g.snap_point_to_node((0.51, 0.2)).unwrap(), (1, 0));
    }

    #[test]
    fn snap_tie_goes_to_smaller_index() {
        let g = Grid::unit_square(2).unwrap();
        assert_eq!(g.snap_point_to_node((0.5, 0.5)).unwrap(), (0, 0));
        // 0.5 on a 176-node grid sits at 87.5 h
        let g = Grid::unit_square(176).unwrap();
        assert_eq!(g.snap_point_to_node((0.5, 0.5)).unwrap(), (87, 87));
    }

    #[test]
    fn snap_outside_is_domain_error() {
        let g = Grid::unit_square(5).unwrap();
        assert!(matches!(g.snap_point_to_node((1.5, 0.2)), Err(EikonalError::Domain(_))));
        assert!(g.snap_point_to_node((-0.1, 0.2)).is_err());
        assert!(g.snap_point_to_node((1.0, 1.0)).is_ok());
    }

    #[test]
    fn snap_round_trips_every_node() {
        for m in [2, 3, 17, 176] {
            let g = Grid::unit_square(m).unwrap();
            for i in 0..m {
                for j in (0..m).step_by(7) {
                    let p = g.position(i, j);
                    assert_eq!(g.snap_point_to_node(p).unwrap(), (i, j));
                }
            }
        }
    }

    #[test]
    fn grid_rejects_degenerate() {
        assert!(Grid::new(1, 4, 0.1, (0.0, 0.0)).is_err());
        assert!(Grid::new(4, 4, 0.0, (0.0, 0.0)).is_err());
        assert!(Grid::new(4, 4, f64::NAN, (0.0, 0.0)).is_err());
    }

    #[test]
    fn neighbors_at_corner_and_interior() {
        let g = Grid::unit_square(4).unwrap();
        let mut c: Vec<_> = g.neighbors(g.index(0, 0)).collect();
        c.sort();
        assert_eq!(c, vec![g.index(0, 1), g.index(1, 0)]);
        assert_eq!(g.neighbors(g.index(1, 2)).count(), 4);
    }

    #[test]
    fn build_point_source() {
        let p = build_problem(&ProblemSpec {
            speed: SpeedSpec::Constant(1.0),
            grid_size: 176,
            exits: ExitSpec::point(0.5, 0.5),
        })
        .unwrap();
        assert_eq!(p.exits().len(), 1);
        assert_eq!(p.exits()[0], (p.grid().index(87, 87), 0.0));
    }

    #[test]
    fn build_full_boundary_counts_perimeter() {
        let p = build_problem(&ProblemSpec {
            speed: SpeedSpec::sinusoid_b(),
            grid_size: 176,
            exits: ExitSpec::Boundary,
        })
        .unwrap();
        assert_eq!(p.exits().len(), 2 * 176 + 2 * 174);
        assert!(p.exits().iter().all(|&(_, q)| q == 0.0));
    }

    #[test]
    fn build_empty_exit_set_fails() {
        let err = build_problem(&ProblemSpec {
            speed: SpeedSpec::Constant(1.0),
            grid_size: 10,
            exits: ExitSpec::Points(vec![]),
        })
        .unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn build_is_pure() {
        let spec = ProblemSpec {
            speed: SpeedSpec::checkerboard(11, 1.0, 2.0).unwrap(),
            grid_size: 45,
            exits: ExitSpec::Nodes(vec![((3, 4), 0.25), ((3, 4), 0.5), ((0, 0), 1.0)]),
        };
        let a = build_problem(&spec).unwrap();
        let b = build_problem(&spec).unwrap();
        assert_eq!(a, b);
        // duplicate node keeps the smaller cost
        assert_eq!(a.exits().len(), 2);
        assert_eq!(a.initial_values()[a.grid().index(3, 4)], 0.25);
    }

    #[test]
    fn initial_values_mark_exits() {
        let p = build_problem(&ProblemSpec {
            speed: SpeedSpec::Constant(1.0),
            grid_size: 5,
            exits: ExitSpec::Nodes(vec![((2, 2), 0.7)]),
        })
        .unwrap();
        let v = p.initial_values();
        assert_eq!(v.at(2, 2), 0.7);
        assert_eq!(v.as_slice().iter().filter(|x| x.is_infinite()).count(), 24);
    }
}
