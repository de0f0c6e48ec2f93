//! r-sweep over a directory of MPS files.
//!
//! The table (`problem,r=...` with iteration counts, `**` at the iteration
//! cap, `err` otherwise) depends only on the corpus and flags. Wall times go
//! to a separate timing file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use galp_core::{to_standard_form, Status};
use rayon::prelude::*;

use crate::solve_cmd::{read_mps, EXIT_ERROR, EXIT_OPTIMAL};
use crate::{BenchArgs, SolverFlags};

pub const ITERATION_LIMIT_CELL: &str = "**";
pub const ERROR_CELL: &str = "err";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub problem: String,
    pub r: f64,
    /// `None` when the file could not be read or converted.
    pub status: Option<Status>,
    pub iterations: usize,
    pub objective: f64,
    pub rf: f64,
    pub rgap: f64,
    pub seconds: f64,
}

impl BenchRecord {
    fn cell(&self) -> String {
        match self.status {
            Some(Status::Optimal) => self.iterations.to_string(),
            Some(Status::IterationLimit) => ITERATION_LIMIT_CELL.to_string(),
            _ => ERROR_CELL.to_string(),
        }
    }
}

pub fn run(args: &BenchArgs) -> u8 {
    match sweep(args) {
        Ok(()) => EXIT_OPTIMAL,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn sweep(args: &BenchArgs) -> Result<()> {
    if args.r_grid.is_empty() {
        bail!("the r grid is empty");
    }
    let files = corpus(&args.dir)?;
    if files.is_empty() {
        log::warn!("no .mps files in {}", args.dir.display());
    }
    let threads = thread_count()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    let rows: Vec<Vec<BenchRecord>> = pool.install(|| {
        files
            .par_iter()
            .map(|f| solve_problem(f, &args.r_grid, &args.solver))
            .collect()
    });

    let table = render_table(&args.r_grid, &rows)?;
    let summary = render_summary(&args.r_grid, &rows)?;
    match &args.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            fs::write(dir.join("table.csv"), &table)?;
            fs::write(dir.join("summary.csv"), &summary)?;
            fs::write(dir.join("timing.csv"), render_timing(&rows)?)?;
        }
        None => {
            std::io::stdout().write_all(table.as_bytes())?;
            std::io::stderr().write_all(summary.as_bytes())?;
        }
    }
    Ok(())
}

/// `GALP_THREADS`, default 1.
fn thread_count() -> Result<usize> {
    match std::env::var("GALP_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => bail!("GALP_THREADS must be a positive integer, got {v:?}"),
        },
        Err(_) => Ok(1),
    }
}

/// `.mps` files in `dir`, sorted by name.
fn corpus(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries =
        fs::read_dir(dir).with_context(|| format!("cannot read directory {}", dir.display()))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry?.path();
        let is_mps = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("mps"));
        if is_mps && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn solve_problem(path: &Path, grid: &[f64], flags: &SolverFlags) -> Vec<BenchRecord> {
    let problem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let failed = |r: f64| BenchRecord {
        problem: problem.clone(),
        r,
        status: None,
        iterations: 0,
        objective: f64::NAN,
        rf: f64::NAN,
        rgap: f64::NAN,
        seconds: 0.0,
    };
    let converted = read_mps(path).and_then(|raw| Ok(to_standard_form(&raw)?));
    let (lp, map) = match converted {
        Ok(v) => v,
        Err(e) => {
            log::warn!("{problem}: {e:#}");
            return grid.iter().map(|&r| failed(r)).collect();
        }
    };
    grid.iter()
        .map(|&r| {
            let start = Instant::now();
            let report = galp_core::solve(&lp, &flags.config(r));
            let seconds = start.elapsed().as_secs_f64();
            if let Some(msg) = &report.message {
                log::info!("{problem} r={r}: {msg}");
            }
            BenchRecord {
                problem: problem.clone(),
                r,
                status: Some(report.status),
                iterations: report.iterations,
                objective: report.objective_with_offset(map.offset),
                rf: report.rf,
                rgap: report.rgap,
                seconds,
            }
        })
        .collect()
}

fn to_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn render_table(grid: &[f64], rows: &[Vec<BenchRecord>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = std::iter::once("problem".to_string())
        .chain(grid.iter().map(|r| format!("r={r}")))
        .collect();
    w.write_record(&header)?;
    for row in rows {
        let Some(first) = row.first() else { continue };
        let cells = std::iter::once(first.problem.clone()).chain(row.iter().map(BenchRecord::cell));
        w.write_record(cells.collect::<Vec<_>>())?;
    }
    to_string(w)
}

/// Share of problems solved to optimality at each r.
pub fn render_summary(grid: &[f64], rows: &[Vec<BenchRecord>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["r", "solved", "problems", "percent"])?;
    for (k, r) in grid.iter().enumerate() {
        let solved = rows
            .iter()
            .filter(|row| row[k].status == Some(Status::Optimal))
            .count();
        let percent = if rows.is_empty() {
            0.0
        } else {
            100.0 * solved as f64 / rows.len() as f64
        };
        w.write_record([
            r.to_string(),
            solved.to_string(),
            rows.len().to_string(),
            format!("{percent:.1}"),
        ])?;
    }
    to_string(w)
}

pub fn render_timing(rows: &[Vec<BenchRecord>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "problem",
        "r",
        "status",
        "iterations",
        "objective",
        "rf",
        "rgap",
        "seconds",
    ])?;
    for rec in rows.iter().flatten() {
        w.write_record([
            rec.problem.clone(),
            rec.r.to_string(),
            rec.status.map_or("error", Status::as_str).to_string(),
            rec.iterations.to_string(),
            rec.objective.to_string(),
            rec.rf.to_string(),
            rec.rgap.to_string(),
            format!("{:.6}", rec.seconds),
        ])?;
    }
    to_string(w)
}
