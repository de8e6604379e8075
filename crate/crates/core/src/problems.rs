//! Speed fields and named benchmark problems on the unit square.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{EikonalError, Result};
use crate::grid::{ExitSpec, ProblemSpec};

/// Axis-aligned closed rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Barrier {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Barrier {
    #[inline]
    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

/// Geometry of a comb maze: `count` vertical barriers centered at
/// `i/(count+1)`, alternately open at the top (odd `i`) and bottom (even).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CombGeometry {
    pub count: usize,
    pub barrier_speed: f64,
    /// Barrier thickness.
    pub thickness: f64,
    /// Height of the opening left at one end of each barrier.
    pub gap: f64,
    /// When set, barrier centers snap to the nearest multiple of `1/align`.
    pub align: Option<u32>,
}

impl CombGeometry {
    /// Four barriers whose edges fall on multiples of 1/22.
    pub fn four() -> Self {
        CombGeometry {
            count: 4,
            barrier_speed: 0.01,
            thickness: 2.0 / 22.0,
            gap: 4.0 / 22.0,
            align: Some(22),
        }
    }

    /// Eight thinner barriers that do not line up with any power-of-two
    /// cell split.
    pub fn eight() -> Self {
        CombGeometry {
            count: 8,
            barrier_speed: 0.01,
            thickness: 0.03,
            gap: 0.15,
            align: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpeedSpec {
    Constant(f64),
    /// `k × k` checkers; the checker with even index sum is slow.
    Checkerboard {
        k: u32,
        slow: f64,
        fast: f64,
    },
    /// `1 + amplitude · sin(freq·π·x) · sin(freq·π·y)`.
    Sinusoid {
        amplitude: f64,
        freq: u32,
    },
    CombMaze {
        barriers: Vec<Barrier>,
        barrier_speed: f64,
    },
}

impl SpeedSpec {
    pub fn constant() -> Self {
        SpeedSpec::Constant(1.0)
    }

    pub fn checkerboard(k: u32, slow: f64, fast: f64) -> Result<Self> {
        if k == 0 || k.is_multiple_of(2) {
            return Err(EikonalError::config(format!("checkerboard size must be odd, got {k}")));
        }
        if !(slow > 0.0) || !(fast > 0.0) {
            return Err(EikonalError::config("checker speeds must be positive"));
        }
        Ok(SpeedSpec::Checkerboard { k, slow, fast })
    }

    pub fn sinusoid(amplitude: f64, freq: u32) -> Result<Self> {
        if !(amplitude.abs() < 1.0) {
            return Err(EikonalError::config(format!(
                "sinusoid amplitude must satisfy |a| < 1, got {amplitude}"
            )));
        }
        Ok(SpeedSpec::Sinusoid { amplitude, freq })
    }

    pub fn sinusoid_a() -> Self {
        SpeedSpec::Sinusoid { amplitude: 0.5, freq: 20 }
    }

    pub fn sinusoid_b() -> Self {
        SpeedSpec::Sinusoid { amplitude: 0.99, freq: 2 }
    }

    pub fn comb_maze(geom: CombGeometry) -> Result<Self> {
        let CombGeometry {
            count,
            barrier_speed,
            thickness,
            gap,
            align,
        } = geom;
        if count == 0 {
            return Err(EikonalError::config("comb maze needs at least one barrier"));
        }
        if !(barrier_speed > 0.0) || !(thickness > 0.0) || !(0.0..1.0).contains(&gap) {
            return Err(EikonalError::config("invalid comb maze geometry"));
        }
        let mut barriers = Vec::with_capacity(count);
        for i in 1..=count {
            let mut xc = i as f64 / (count + 1) as f64;
            if let Some(a) = align {
                xc = (xc * a as f64).round() / a as f64;
            }
            let (y0, y1) = if i % 2 == 1 { (0.0, 1.0 - gap) } else { (gap, 1.0) };
            let b = Barrier {
                x0: xc - 0.5 * thickness,
                x1: xc + 0.5 * thickness,
                y0,
                y1,
            };
            if b.x0 <= 0.0 || b.x1 >= 1.0 {
                return Err(EikonalError::config(format!("barrier {i} leaves the unit square")));
            }
            if let Some(prev) = barriers.last() {
                let prev: &Barrier = prev;
                if b.x0 <= prev.x1 {
                    return Err(EikonalError::config(format!("barriers {} and {i} overlap", i - 1)));
                }
            }
            barriers.push(b);
        }
        Ok(SpeedSpec::CombMaze { barriers, barrier_speed })
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            SpeedSpec::Constant(c) => *c,
            SpeedSpec::Checkerboard { k, slow, fast } => {
                let k = *k as usize;
                let cell = |t: f64| ((k as f64 * t).floor().max(0.0) as usize).min(k - 1);
                if (cell(x) + cell(y)) % 2 == 0 {
                    *slow
                } else {
                    *fast
                }
            }
            SpeedSpec::Sinusoid { amplitude, freq } => {
                let w = *freq as f64 * PI;
                1.0 + amplitude * (w * x).sin() * (w * y).sin()
            }
            SpeedSpec::CombMaze { barriers, barrier_speed } => {
                if barriers.iter().any(|b| b.contains(x, y)) {
                    *barrier_speed
                } else {
                    1.0
                }
            }
        }
    }
}

/// Benchmark problems addressable by name from configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedProblem {
    Constant,
    Checker11,
    Checker41,
    SinusoidA,
    SinusoidB,
    Comb4,
    Comb8,
}

/// Exit set flavour for a named problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitMode {
    /// The problem's own source point.
    Point,
    /// The whole outer boundary.
    Boundary,
}

impl NamedProblem {
    pub const ALL: [NamedProblem; 7] = [
        NamedProblem::Constant,
        NamedProblem::Checker11,
        NamedProblem::Checker41,
        NamedProblem::SinusoidA,
        NamedProblem::SinusoidB,
        NamedProblem::Comb4,
        NamedProblem::Comb8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedProblem::Constant => "constant",
            NamedProblem::Checker11 => "checker11",
            NamedProblem::Checker41 => "checker41",
            NamedProblem::SinusoidA => "sinusoidA",
            NamedProblem::SinusoidB => "sinusoidB",
            NamedProblem::Comb4 => "comb4",
            NamedProblem::Comb8 => "comb8",
        }
    }

    pub fn speed(self) -> SpeedSpec {
        match self {
            NamedProblem::Constant => SpeedSpec::constant(),
            NamedProblem::Checker11 => SpeedSpec::Checkerboard {
                k: 11,
                slow: 1.0,
                fast: 2.0,
            },
            NamedProblem::Checker41 => SpeedSpec::Checkerboard {
                k: 41,
                slow: 1.0,
                fast: 2.0,
            },
            NamedProblem::SinusoidA => SpeedSpec::sinusoid_a(),
            NamedProblem::SinusoidB => SpeedSpec::sinusoid_b(),
            NamedProblem::Comb4 => SpeedSpec::comb_maze(CombGeometry::four()).expect("valid geometry"),
            NamedProblem::Comb8 => SpeedSpec::comb_maze(CombGeometry::eight()).expect("valid geometry"),
        }
    }

    /// Point source: the origin for comb mazes, the center otherwise.
    pub fn source(self) -> (f64, f64) {
        match self {
            NamedProblem::Comb4 | NamedProblem::Comb8 => (0.0, 0.0),
            _ => (0.5, 0.5),
        }
    }

    /// Grid sizes must put whole numbers of nodes in each checker.
    pub fn validate_grid(self, m: usize) -> Result<()> {
        let k = match self {
            NamedProblem::Checker11 => 11,
            NamedProblem::Checker41 => 41,
            _ => return Ok(()),
        };
        if !m.is_multiple_of(k) {
            return Err(EikonalError::config(format!(
                "{} needs a grid size divisible by {k}, got {m}",
                self.name()
            )));
        }
        Ok(())
    }

    pub fn spec(self, grid_size: usize, mode: ExitMode) -> ProblemSpec {
        let exits = match mode {
            ExitMode::Point => {
                let (x, y) = self.source();
                ExitSpec::point(x, y)
            }
            ExitMode::Boundary => ExitSpec::Boundary,
        };
        ProblemSpec {
            speed: self.speed(),
            grid_size,
            exits,
        }
    }
}

impl fmt::Display for NamedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedProblem {
    type Err = EikonalError;

    fn from_str(s: &str) -> Result<Self> {
        NamedProblem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| EikonalError::config(format!("unknown problem `{s}`")))
    }
}

impl FromStr for ExitMode {
    type Err = EikonalError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "point" => Ok(ExitMode::Point),
            "boundary" => Ok(ExitMode::Boundary),
            _ => Err(EikonalError::config(format!("unknown exit mode `{s}`"))),
        }
    }
}
