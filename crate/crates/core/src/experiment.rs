//! Benchmark matrix runner, config parsing, CSV output and field dumps.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::cells::build_cells;
use crate::classic::{fmm_solve, fsm_solve, lsm_solve};
use crate::error::{EikonalError, Result};
use crate::fmsm::fmsm_solve;
use crate::grid::{build_problem, Problem, SolverOutput, ValueField};
use crate::hcm::{fhcm_solve, hcm_solve};
use crate::metrics::{evaluate, ground_truth};
use crate::problems::{ExitMode, NamedProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Fmm,
    Fsm,
    Lsm,
    Hcm,
    Fhcm,
    Fmsm,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Fmm, Method::Fsm, Method::Lsm, Method::Hcm, Method::Fhcm, Method::Fmsm];

    pub fn name(self) -> &'static str {
        match self {
            Method::Fmm => "fmm",
            Method::Fsm => "fsm",
            Method::Lsm => "lsm",
            Method::Hcm => "hcm",
            Method::Fhcm => "fhcm",
            Method::Fmsm => "fmsm",
        }
    }

    /// Methods that run on a cell decomposition.
    pub fn uses_cells(self) -> bool {
        matches!(self, Method::Hcm | Method::Fhcm | Method::Fmsm)
    }

    /// Methods that return the exact discrete solution.
    pub fn is_exact(self) -> bool {
        !matches!(self, Method::Fhcm | Method::Fmsm)
    }

    /// Solve with this method; `cells` is the per-axis cell count and is
    /// ignored by single-scale methods.
    pub fn solve(self, problem: &Problem, cells: usize) -> Result<SolverOutput> {
        if !self.uses_cells() {
            return Ok(match self {
                Method::Fmm => fmm_solve(problem),
                Method::Fsm => fsm_solve(problem),
                _ => lsm_solve(problem),
            });
        }
        let dec = build_cells(problem.grid(), cells, cells)?;
        match self {
            Method::Hcm => hcm_solve(problem, &dec),
            Method::Fhcm => fhcm_solve(problem, &dec),
            _ => fmsm_solve(problem, &dec),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = EikonalError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| EikonalError::config(format!("unknown method `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub problem: NamedProblem,
    pub grids: Vec<usize>,
    pub methods: Vec<Method>,
    /// Cell counts per axis for the cell-based methods.
    pub cells: Vec<usize>,
    pub exit: ExitMode,
    pub refine: usize,
    pub out: Option<PathBuf>,
    pub dump_dir: Option<PathBuf>,
    /// Accepted for compatibility; every method is deterministic.
    pub seed: Option<u64>,
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| EikonalError::config(format!("bad value `{t}` for `{key}`")))
        })
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| EikonalError::config(format!("bad value `{value}` for `{key}`")))
}

impl ExperimentSpec {
    /// Parse `key = value` lines. `#` starts a comment; lists are
    /// comma-separated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut problem = None;
        let mut grids = Vec::new();
        let mut methods = Vec::new();
        let mut cells = Vec::new();
        let mut exit = ExitMode::Point;
        let mut refine = 4;
        let mut out = None;
        let mut dump_dir = None;
        let mut seed = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| EikonalError::config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "problem" => problem = Some(value.parse::<NamedProblem>()?),
                "grids" | "grid" => grids = parse_list(key, value)?,
                "methods" => {
                    methods = value
                        .split(',')
                        .map(str::trim)
                        .filter(|t| !t.is_empty())
                        .map(str::parse)
                        .collect::<Result<Vec<Method>>>()?
                }
                "cells" => cells = parse_list(key, value)?,
                "exit" => exit = value.parse()?,
                "refine" => refine = parse_one(key, value)?,
                "out" => out = Some(PathBuf::from(value)),
                "dump_dir" => dump_dir = Some(PathBuf::from(value)),
                "seed" => seed = Some(parse_one(key, value)?),
                _ => return Err(EikonalError::config(format!("unknown key `{key}`"))),
            }
        }
        let spec = ExperimentSpec {
            problem: problem.ok_or_else(|| EikonalError::config("missing `problem`"))?,
            grids,
            methods,
            cells,
            exit,
            refine,
            out,
            dump_dir,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| EikonalError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grids.is_empty() {
            return Err(EikonalError::config("no grid sizes given"));
        }
        if self.methods.is_empty() {
            return Err(EikonalError::config("no methods given"));
        }
        if self.refine == 0 {
            return Err(EikonalError::config("refine must be at least 1"));
        }
        let hybrid = self.methods.iter().any(|m| m.uses_cells());
        if hybrid && self.cells.is_empty() {
            return Err(EikonalError::config("cell-based methods need at least one cell count"));
        }
        for &m in &self.grids {
            if m < 2 {
                return Err(EikonalError::config(format!("grid size {m} is too small")));
            }
            self.problem.validate_grid(m)?;
            if hybrid {
                for &c in &self.cells {
                    if c == 0 || c > m {
                        return Err(EikonalError::config(format!("{c} cells do not fit grid size {m}")));
                    }
                    if c < 2 && self.methods.contains(&Method::Fmsm) {
                        return Err(EikonalError::config("fmsm needs at least 2 cells per axis"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Rows of the experiment matrix in output order.
    pub fn tasks(&self) -> Vec<Task> {
        let mut out = Vec::new();
        for &grid in &self.grids {
            for &method in &self.methods {
                if method.uses_cells() {
                    out.extend(self.cells.iter().map(|&cells| Task { grid, method, cells }));
                } else {
                    out.push(Task { grid, method, cells: 0 });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Task {
    pub grid: usize,
    pub method: Method,
    /// Cells per axis, 0 for single-scale methods.
    pub cells: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub problem: String,
    pub method: String,
    pub grid_m: usize,
    pub cells_x: usize,
    pub elapsed_ms: f64,
    pub l_inf: f64,
    pub l_1: f64,
    #[serde(rename = "R_max_ratio")]
    pub r_max_ratio: f64,
    pub rho: f64,
    #[serde(rename = "R_ratio")]
    pub r_ratio: f64,
    pub avhr: f64,
    pub avs: f64,
    pub mon_pct: f64,
    pub sweeps: u64,
    pub node_updates: u64,
    pub heap_removals: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub repeat: usize,
    /// Worker threads; 0 lets the pool choose.
    pub jobs: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { repeat: 1, jobs: 0 }
    }
}

/// Per-grid data shared by every row of that grid.
struct Baseline {
    problem: Problem,
    exact: ValueField,
    truth: ValueField,
}

fn run_task(spec: &ExperimentSpec, base: &Baseline, task: Task, repeat: usize) -> Result<Row> {
    let mut best = f64::INFINITY;
    let mut output = None;
    for _ in 0..repeat.max(1) {
        let start = Instant::now();
        let out = task.method.solve(&base.problem, task.cells)?;
        best = best.min(start.elapsed().as_secs_f64() * 1e3);
        output = Some(out);
    }
    let out = output.expect("at least one run");
    let report = evaluate(&base.problem, &out.values, &base.exact, &base.truth)?;
    let (r_max, rho, r_ratio) = if task.method.is_exact() {
        (1.0, 1.0, 1.0)
    } else {
        (report.max_error_ratio, report.avg_error_ratio, report.ratio_of_max)
    };
    let stats = out.cells.clone().unwrap_or_default();
    if let Some(dir) = &spec.dump_dir {
        let name = if task.method.uses_cells() {
            format!("{}_{}_{}_{}.txt", spec.problem, task.grid, task.method, task.cells)
        } else {
            format!("{}_{}_{}.txt", spec.problem, task.grid, task.method)
        };
        dump_field(&out.values, base.problem.grid().h(), &dir.join(name), DumpFormat::Ascii)?;
    }
    Ok(Row {
        problem: spec.problem.name().to_string(),
        method: task.method.name().to_string(),
        grid_m: task.grid,
        cells_x: task.cells,
        elapsed_ms: best,
        l_inf: report.l_inf,
        l_1: report.l_1,
        r_max_ratio: r_max,
        rho,
        r_ratio,
        avhr: stats.avhr(),
        avs: stats.avs(),
        mon_pct: stats.mon_pct(),
        sweeps: out.sweeps,
        node_updates: out.node_updates,
        heap_removals: out.heap_removals,
    })
}

/// Run every row of the matrix. Results come back in matrix order no
/// matter how the work was scheduled.
pub fn run_experiment(spec: &ExperimentSpec, opts: RunOptions) -> Result<Vec<Row>> {
    spec.validate()?;
    if let Some(dir) = &spec.dump_dir {
        fs::create_dir_all(dir).map_err(|e| EikonalError::io(dir, e))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| EikonalError::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        let mut grids = spec.grids.clone();
        grids.sort_unstable();
        grids.dedup();
        let baselines: HashMap<usize, Baseline> = grids
            .par_iter()
            .map(|&m| {
                let problem = build_problem(&spec.problem.spec(m, spec.exit))?;
                let exact = fmm_solve(&problem).values;
                let truth = ground_truth(&problem, spec.refine)?;
                Ok((m, Baseline { problem, exact, truth }))
            })
            .collect::<Result<_>>()?;
        spec.tasks()
            .par_iter()
            .map(|&t| run_task(spec, &baselines[&t.grid], t, opts.repeat))
            .collect()
    })
}

pub fn write_csv<W: Write>(rows: &[Row], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r).map_err(|e| EikonalError::config(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| EikonalError::io("<csv>", e))?;
    Ok(())
}

pub fn write_csv_file(rows: &[Row], path: &Path) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| EikonalError::io(path, e))?;
    write_csv(rows, BufWriter::new(f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DumpFormat {
    Ascii,
    Raw,
}

impl FromStr for DumpFormat {
    type Err = EikonalError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(DumpFormat::Ascii),
            "raw" => Ok(DumpFormat::Raw),
            _ => Err(EikonalError::config(format!("unknown dump format `{s}`"))),
        }
    }
}

/// Write a field with rows of constant `j`, lowest `j` first.
///
/// Ascii: a `m n h` header line, then `n` lines of `m` values. Raw: `m` and
/// `n` as little-endian `u64`, then the values as little-endian `f64` in
/// the same order.
pub fn dump_field(values: &ValueField, h: f64, path: &Path, format: DumpFormat) -> Result<()> {
    let (m, n) = values.shape();
    let f = fs::File::create(path).map_err(|e| EikonalError::io(path, e))?;
    let mut w = BufWriter::new(f);
    let io = |e| EikonalError::io(path, e);
    match format {
        DumpFormat::Ascii => {
            writeln!(w, "{m} {n} {h}").map_err(io)?;
            for j in 0..n {
                let line: Vec<String> = (0..m).map(|i| format!("{:.16e}", values.at(i, j))).collect();
                writeln!(w, "{}", line.join(" ")).map_err(io)?;
            }
        }
        DumpFormat::Raw => {
            w.write_all(&(m as u64).to_le_bytes()).map_err(io)?;
            w.write_all(&(n as u64).to_le_bytes()).map_err(io)?;
            for j in 0..n {
                for i in 0..m {
                    w.write_all(&values.at(i, j).to_le_bytes()).map_err(io)?;
                }
            }
        }
    }
    w.flush().map_err(io)
}

/// Read back a file written by [`dump_field`].
pub fn read_field(path: &Path, format: DumpFormat) -> Result<ValueField> {
    let parse_err = |msg: String| EikonalError::Parse {
        path: path.to_path_buf(),
        msg,
    };
    let mut data = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut data))
        .map_err(|e| EikonalError::io(path, e))?;
    let (m, n, flat) = match format {
        DumpFormat::Ascii => {
            let text = String::from_utf8(data).map_err(|e| parse_err(e.to_string()))?;
            let mut lines = text.lines();
            let header: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
            if header.len() != 3 {
                return Err(parse_err("bad header".into()));
            }
            let m: usize = header[0].parse().map_err(|_| parse_err("bad m".into()))?;
            let n: usize = header[1].parse().map_err(|_| parse_err("bad n".into()))?;
            let flat = lines
                .flat_map(str::split_whitespace)
                .map(|t| t.parse::<f64>().map_err(|_| parse_err(format!("bad value `{t}`"))))
                .collect::<Result<Vec<f64>>>()?;
            (m, n, flat)
        }
        DumpFormat::Raw => {
            if data.len() < 16 || (data.len() - 16) % 8 != 0 {
                return Err(parse_err(format!("unexpected size {}", data.len())));
            }
            let word = |k: usize| u64::from_le_bytes(data[k..k + 8].try_into().expect("8 bytes"));
            let (m, n) = (word(0) as usize, word(8) as usize);
            let flat = data[16..]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect();
            (m, n, flat)
        }
    };
    if flat.len() != m * n {
        return Err(parse_err(format!("expected {} values, found {}", m * n, flat.len())));
    }
    let mut out = ValueField::filled(m, n, 0.0);
    for j in 0..n {
        for i in 0..m {
            out[i * n + j] = flat[j * m + i];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_full_config() {
        let spec = ExperimentSpec::parse(
            "# coarse grid study\nproblem = checker11\ngrids = 176\nmethods = fmm, fhcm,fmsm\ncells = 22,44\nrefine=2\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(spec.problem, NamedProblem::Checker11);
        assert_eq!(spec.methods, vec![Method::Fmm, Method::Fhcm, Method::Fmsm]);
        assert_eq!(spec.cells, vec![22, 44]);
        assert_eq!(spec.refine, 2);
        assert_eq!(spec.tasks().len(), 5);
    }

    #[test]
    fn unknown_tokens_are_named() {
        let err = ExperimentSpec::parse("problem = constant\ngrids = 17\nmethods = fmmx\n").unwrap_err();
        assert!(err.is_config());
        assert!(err.to_string().contains("fmmx"));
        let err = ExperimentSpec::parse("problem = checker12\n").unwrap_err();
        assert!(err.to_string().contains("checker12"));
    }

    #[test]
    fn validation_errors() {
        for text in [
            "problem = checker11\ngrids = 175\nmethods = fmm\n",
            "problem = constant\ngrids = 17\nmethods = hcm\n",
            "problem = constant\ngrids = 17\nmethods = fmsm\ncells = 1\n",
            "problem = constant\ngrids = 17\nmethods = fmm\nfoo = 1\n",
            "grids = 17\nmethods = fmm\n",
        ] {
            assert!(ExperimentSpec::parse(text).unwrap_err().is_config(), "{text}");
        }
    }

    #[test]
    fn row_count_formula() {
        let spec = ExperimentSpec::parse("problem = constant\ngrids = 17, 33\nmethods = fmm,fsm,hcm,fmsm\ncells = 2,4,8\n").unwrap();
        assert_eq!(spec.tasks().len(), (1 + 1 + 3 + 3) * 2);
    }
}
