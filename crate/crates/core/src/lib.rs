//! Solvers for the static Eikonal equation `|∇u| F = 1` on uniform 2-D
//! grids.
//!
//! Single-scale solvers ([`fmm_solve`], [`fsm_solve`], [`lsm_solve`]) compute
//! the exact solution of the upwind discretization. The two-scale solvers
//! split the grid into cells: [`hcm_solve`] is exact, while [`fhcm_solve`]
//! and [`fmsm_solve`] accept a small additional error for speed. The
//! [`metrics`] module measures that error against a refined reference.

pub mod cells;
pub mod classic;
pub mod error;
pub mod experiment;
pub mod fmsm;
pub mod grid;
pub mod hcm;
pub mod heap;
pub mod local;
pub mod metrics;
pub mod problems;
pub mod sweep;

pub use cells::{build_cells, CellDecomposition};
pub use classic::{fmm_solve, fsm_solve, lsm_solve};
pub use error::{EikonalError, Result};
pub use fmsm::fmsm_solve;
pub use grid::{build_problem, ExitSpec, Grid, Problem, ProblemSpec, SolverOutput, SpeedField, ValueField};
pub use hcm::{fhcm_solve, hcm_solve};
pub use problems::{NamedProblem, SpeedSpec};
