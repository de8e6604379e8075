//! First-order upwind local solver.
//!
//! A node value is the smallest of four quadrant updates; by monotonicity
//! only the quadrant built from the smaller horizontal and the smaller
//! vertical neighbour can win, so [`node_update`] solves one quadratic.

use std::fmt;

/// Values at the four edge neighbours of a node; `+inf` for missing or
/// unreached neighbours.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighborValues {
    pub east: f64,
    pub west: f64,
    pub north: f64,
    pub south: f64,
}

impl NeighborValues {
    pub fn new(east: f64, west: f64, north: f64, south: f64) -> Self {
        NeighborValues { east, west, north, south }
    }

    pub fn all(v: f64) -> Self {
        NeighborValues::new(v, v, v, v)
    }
}

/// Sweep direction, named by the corner the sweep starts from. A sweep
/// from `NE` visits nodes with decreasing `i` and `j`, so the north and east
/// neighbours of each node have already been visited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    NE,
    NW,
    SE,
    SW,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::NE, Direction::NW, Direction::SE, Direction::SW];

    /// Standard rotation: sweep `k` uses `ROTATION[k % 4]`.
    pub const ROTATION: [Direction; 4] = [Direction::SW, Direction::NW, Direction::NE, Direction::SE];

    /// Direction used by sweep number `k` of a standard sweeping loop.
    pub fn from_sweep_number(k: usize) -> Direction {
        Direction::ROTATION[k % 4]
    }

    /// Whether `i` runs upward in this sweep.
    pub fn i_ascending(self) -> bool {
        matches!(self, Direction::SW | Direction::NW)
    }

    /// Whether `j` runs upward in this sweep.
    pub fn j_ascending(self) -> bool {
        matches!(self, Direction::SW | Direction::SE)
    }

    fn bit(self) -> u8 {
        match self {
            Direction::NE => 1,
            Direction::NW => 2,
            Direction::SE => 4,
            Direction::SW => 8,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::NE => "NE",
            Direction::NW => "NW",
            Direction::SE => "SE",
            Direction::SW => "SW",
        };
        f.write_str(s)
    }
}

/// A set of sweep directions (directional flags).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct DirSet(u8);

impl DirSet {
    pub const EMPTY: DirSet = DirSet(0);
    pub const FULL: DirSet = DirSet(15);

    pub fn of(dirs: &[Direction]) -> DirSet {
        dirs.iter().fold(DirSet::EMPTY, |s, &d| s.with(d))
    }

    #[must_use]
    pub fn with(self, d: Direction) -> DirSet {
        DirSet(self.0 | d.bit())
    }

    pub fn insert(&mut self, d: Direction) {
        self.0 |= d.bit();
    }

    pub fn union(self, other: DirSet) -> DirSet {
        DirSet(self.0 | other.0)
    }

    pub fn contains(self, d: Direction) -> bool {
        self.0 & d.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in `NE, NW, SE, SW` order.
    pub fn iter(self) -> impl Iterator<Item = Direction> {
        Direction::ALL.into_iter().filter(move |&d| self.contains(d))
    }
}

/// Update from one quadrant with horizontal neighbour `u_a` and vertical
/// neighbour `u_b`: the root of `(U-a)^2 + (U-b)^2 = (h/f)^2` above both
/// neighbours, or the one-sided update from the smaller neighbour when no
/// such root exists.
#[inline]
pub fn quadrant_update(u_a: f64, u_b: f64, f: f64, h: f64) -> f64 {
    debug_assert!(!u_a.is_nan() && !u_b.is_nan(), "NaN neighbour value");
    debug_assert!(f > 0.0 && h > 0.0);
    let c = h / f;
    // branch on finiteness first so inf - inf never appears
    if u_a.is_finite() && u_b.is_finite() {
        let d = u_a - u_b;
        if d.abs() <= c {
            return 0.5 * (u_a + u_b) + 0.5 * (2.0 * c * c - d * d).sqrt();
        }
    }
    c + u_a.min(u_b)
}

#[inline]
pub fn node_update(nb: &NeighborValues, f: f64, h: f64) -> f64 {
    quadrant_update(nb.east.min(nb.west), nb.north.min(nb.south), f, h)
}

/// Quadrant update on exactly the two neighbours a sweep from `dir` has
/// already visited.
#[inline]
pub fn directional_update(nb: &NeighborValues, dir: Direction, f: f64, h: f64) -> f64 {
    let (a, b) = match dir {
        Direction::NE => (nb.east, nb.north),
        Direction::NW => (nb.west, nb.north),
        Direction::SE => (nb.east, nb.south),
        Direction::SW => (nb.west, nb.south),
    };
    quadrant_update(a, b, f, h)
}

/// Gather the neighbour values of flat node `idx` on an `m × n` layout.
#[inline]
pub(crate) fn gather(values: &[f64], idx: usize, i: usize, j: usize, m: usize, n: usize) -> NeighborValues {
    NeighborValues {
        west: if i > 0 { values[idx - n] } else { f64::INFINITY },
        east: if i + 1 < m { values[idx + n] } else { f64::INFINITY },
        south: if j > 0 { values[idx - 1] } else { f64::INFINITY },
        north: if j + 1 < n { values[idx + 1] } else { f64::INFINITY },
    }
}
