//! Reference solutions and error statistics.
//!
//! `e` is the discretization error of the exact discrete solution against a
//! refined reference, `E` the error of a method under test. The ratios
//! measure how much error a method adds on top of the discretization.

use crate::classic::fmm_solve;
use crate::error::{EikonalError, Result};
use crate::grid::{Grid, Problem, SpeedField, ValueField};

/// Nodes whose discretization error is at or below this are treated as
/// exact.
pub const ERROR_FLOOR: f64 = 1e-14;

/// Fast Marching on a grid `refine` times finer, restricted back to the
/// original nodes.
pub fn ground_truth(problem: &Problem, refine: usize) -> Result<ValueField> {
    if refine == 0 {
        return Err(EikonalError::config("refinement factor must be at least 1"));
    }
    let g = problem.grid();
    let speed = match problem.speed_field() {
        SpeedField::Analytic(s) => SpeedField::Analytic(s.clone()),
        SpeedField::Sampled(_) if refine == 1 => problem.speed_field().clone(),
        SpeedField::Sampled(_) => {
            return Err(EikonalError::config("sampled speed fields cannot be refined"));
        }
    };
    let fine_grid = Grid::new(
        refine * (g.m() - 1) + 1,
        refine * (g.n() - 1) + 1,
        g.h() / refine as f64,
        g.origin(),
    )?;
    let exits = problem
        .exits()
        .iter()
        .map(|&(idx, q)| {
            let (i, j) = g.coords(idx);
            (fine_grid.index(refine * i, refine * j), q)
        })
        .collect();
    let fine = Problem::new(fine_grid, speed, exits)?;
    let solved = fmm_solve(&fine).values;
    let mut out = ValueField::filled(g.m(), g.n(), 0.0);
    for i in 0..g.m() {
        for j in 0..g.n() {
            out[g.index(i, j)] = solved.at(refine * i, refine * j);
        }
    }
    Ok(out)
}

/// Pointwise errors of a method and of the exact discrete solution.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorFields {
    /// `|exact - truth|`
    pub e: Vec<f64>,
    /// `|method - truth|`
    pub big_e: Vec<f64>,
    /// Non-exit nodes with `e > ERROR_FLOOR`.
    pub plus: Vec<bool>,
    /// Non-exit nodes, over which the norms are taken.
    pub counted: Vec<bool>,
}

fn check_shape(a: &ValueField, b: &ValueField) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(EikonalError::Shape {
            expected: a.shape(),
            got: b.shape(),
        });
    }
    Ok(())
}

pub fn error_fields(v_method: &ValueField, v_exact: &ValueField, v_truth: &ValueField, exit_mask: &[bool]) -> Result<ErrorFields> {
    check_shape(v_truth, v_method)?;
    check_shape(v_truth, v_exact)?;
    if exit_mask.len() != v_truth.as_slice().len() {
        return Err(EikonalError::Shape {
            expected: v_truth.shape(),
            got: (exit_mask.len(), 1),
        });
    }
    let t = v_truth.as_slice();
    let e: Vec<f64> = v_exact.as_slice().iter().zip(t).map(|(a, b)| (a - b).abs()).collect();
    let big_e: Vec<f64> = v_method.as_slice().iter().zip(t).map(|(a, b)| (a - b).abs()).collect();
    let counted: Vec<bool> = exit_mask.iter().map(|x| !x).collect();
    let plus = e.iter().zip(&counted).map(|(&ei, &c)| c && ei > ERROR_FLOOR).collect();
    Ok(ErrorFields { e, big_e, plus, counted })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    pub l_inf: f64,
    /// Mean absolute error over non-exit nodes.
    pub l_1: f64,
    /// `max E/e` over the nodes with nonzero discretization error.
    pub max_error_ratio: f64,
    /// Mean of `E/e` over the same nodes.
    pub avg_error_ratio: f64,
    /// `max E / max e`.
    pub ratio_of_max: f64,
    pub m_plus: usize,
    /// Set when no node had a nonzero discretization error and the ratios
    /// were reported as 1.
    pub degenerate: bool,
}

pub fn error_ratios(f: &ErrorFields) -> MetricsReport {
    let mut l_inf = 0.0f64;
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut max_e = 0.0f64;
    for k in 0..f.e.len() {
        if f.counted[k] {
            l_inf = l_inf.max(f.big_e[k]);
            max_e = max_e.max(f.e[k]);
            sum += f.big_e[k];
            count += 1;
        }
    }
    let l_1 = if count > 0 { sum / count as f64 } else { 0.0 };

    let mut max_ratio = f64::NEG_INFINITY;
    let mut ratio_sum = 0.0;
    let mut m_plus = 0usize;
    for k in 0..f.e.len() {
        if f.plus[k] {
            let r = f.big_e[k] / f.e[k];
            max_ratio = max_ratio.max(r);
            ratio_sum += r;
            m_plus += 1;
        }
    }
    if m_plus == 0 {
        return MetricsReport {
            l_inf,
            l_1,
            max_error_ratio: 1.0,
            avg_error_ratio: 1.0,
            ratio_of_max: 1.0,
            m_plus,
            degenerate: true,
        };
    }
    MetricsReport {
        l_inf,
        l_1,
        max_error_ratio: max_ratio,
        avg_error_ratio: ratio_sum / m_plus as f64,
        ratio_of_max: l_inf / max_e,
        m_plus,
        degenerate: false,
    }
}

/// Error statistics of `v_method` against `v_truth`, with `v_exact` as the
/// baseline for the ratios.
pub fn evaluate(problem: &Problem, v_method: &ValueField, v_exact: &ValueField, v_truth: &ValueField) -> Result<MetricsReport> {
    Ok(error_ratios(&error_fields(v_method, v_exact, v_truth, problem.exit_mask())?))
}
