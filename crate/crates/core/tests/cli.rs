use std::fs;
use std::path::Path;
use std::process::Command;

use eikonal_core::experiment::{dump_field, read_field, run_experiment, DumpFormat, ExperimentSpec, RunOptions};
use eikonal_core::ValueField;

fn eikbench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eikbench"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn read_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn constant_fsm_row() {
    let spec = ExperimentSpec::parse("problem = constant\ngrids = 176\nmethods = fsm\n").unwrap();
    let rows = run_experiment(&spec, RunOptions::default()).unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r.sweeps, 5);
    assert_eq!((r.r_max_ratio, r.rho, r.r_ratio), (1.0, 1.0, 1.0));
}

#[test]
fn run_writes_csv_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "exp.cfg",
        "problem = sinusoidB\ngrids = 45, 89\nmethods = fmm, lsm, fhcm, fmsm\ncells = 5\n",
    );
    let out = dir.path().join("rows.csv");
    let dumps = dir.path().join("dumps");
    let status = eikbench()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--dump-dir")
        .arg(&dumps)
        .args(["--jobs", "3", "--repeat", "2"])
        .status()
        .unwrap();
    assert!(status.success());

    let mut reader = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "problem",
            "method",
            "grid_m",
            "cells_x",
            "elapsed_ms",
            "l_inf",
            "l_1",
            "R_max_ratio",
            "rho",
            "R_ratio",
            "avhr",
            "avs",
            "mon_pct",
            "sweeps",
            "node_updates",
            "heap_removals"
        ]
    );
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 8);
    let order: Vec<(&str, &str)> = rows.iter().map(|r| (&r[2], &r[1])).collect();
    assert_eq!(order[0], ("45", "fmm"));
    assert_eq!(order[3], ("45", "fmsm"));
    assert_eq!(order[4], ("89", "fmm"));

    let field = read_field(&dumps.join("sinusoidB_89_fhcm_5.txt"), DumpFormat::Ascii).unwrap();
    assert_eq!(field.shape(), (89, 89));
}

#[test]
fn reruns_match_except_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "e.cfg",
        "problem = checker11\ngrids = 88\nmethods = fmm,hcm,fmsm\ncells = 4,11\n",
    );
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("{k}.csv"));
        let ok = eikbench()
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(ok.success());
        let rows: Vec<Vec<String>> = read_rows(&out)
            .iter()
            .map(|r| r.iter().enumerate().filter(|(i, _)| *i != 4).map(|(_, v)| v.to_string()).collect())
            .collect();
        runs.push(rows);
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0].len(), 1 + 2 + 2);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "problem = constant\ngrids = 17\nmethods = fmm, fmmx\n");
    let out = eikbench().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fmmx"));

    let cfg = write(dir.path(), "bad2.cfg", "problem = checker11\ngrids = 100\nmethods = fmm\n");
    let out = eikbench().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let missing = eikbench().args(["run", "--config", "/nonexistent/x.cfg"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn truth_subcommand_writes_raw_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.bin");
    let ok = eikbench()
        .args([
            "truth",
            "--problem",
            "constant",
            "--grid",
            "33",
            "--refine",
            "2",
            "--format",
            "raw",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(ok.success());
    assert_eq!(fs::metadata(&out).unwrap().len(), 16 + 8 * 33 * 33);
    let f = read_field(&out, DumpFormat::Raw).unwrap();
    assert_eq!(f.at(16, 16), 0.0);
    assert!((f.at(32, 16) - 0.5).abs() < 1e-12);
}

#[test]
fn dump_round_trips_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let vals: Vec<f64> = (0..35)
        .map(|k| (k as f64).sqrt() * std::f64::consts::PI + 1e-17 * k as f64)
        .collect();
    let mut field = ValueField::from_vec(5, 7, vals).unwrap();
    field[3] = f64::INFINITY;
    for fmt in [DumpFormat::Ascii, DumpFormat::Raw] {
        let p = dir.path().join(format!("{fmt:?}"));
        dump_field(&field, 0.25, &p, fmt).unwrap();
        let back = read_field(&p, fmt).unwrap();
        assert_eq!(back.shape(), (5, 7));
        for (a, b) in back.as_slice().iter().zip(field.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn ascii_dump_layout() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("z.txt");
    dump_field(&ValueField::filled(2, 2, 0.0), 1.0, &p, DumpFormat::Ascii).unwrap();
    let text = fs::read_to_string(&p).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "2 2 1");
    let raw = dir.path().join("z.bin");
    dump_field(&ValueField::filled(3, 4, 1.5), 1.0, &raw, DumpFormat::Raw).unwrap();
    assert_eq!(fs::metadata(&raw).unwrap().len(), 16 + 8 * 12);
}
