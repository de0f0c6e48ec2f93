use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{Context, Result};
use galp_core::{parse_mps, to_standard_form, RawMps, SolveReport, Status, TraceRecord};

use crate::SolveArgs;

pub const EXIT_OPTIMAL: u8 = 0;
pub const EXIT_ITERATION_LIMIT: u8 = 2;
pub const EXIT_UNBOUNDED: u8 = 3;
pub const EXIT_ERROR: u8 = 4;

pub fn read_mps(path: &Path) -> Result<RawMps> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_mps(BufReader::new(file)).with_context(|| format!("cannot parse {}", path.display()))
}

pub fn exit_code(status: Status) -> u8 {
    match status {
        Status::Optimal => EXIT_OPTIMAL,
        Status::IterationLimit => EXIT_ITERATION_LIMIT,
        Status::Unbounded => EXIT_UNBOUNDED,
        Status::NumericalFailure => EXIT_ERROR,
    }
}

pub fn run(args: &SolveArgs) -> u8 {
    match solve_file(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn solve_file(args: &SolveArgs) -> Result<u8> {
    let raw = read_mps(&args.path)?;
    let (lp, map) = to_standard_form(&raw).context("cannot convert to standard form")?;
    log::info!(
        "{}: {} rows, {} columns, {} nonzeros",
        raw.name,
        lp.a.nrows(),
        lp.a.ncols(),
        lp.a.nnz()
    );
    let report = galp_core::solve(&lp, &args.solver.config(args.r));
    if let Some(path) = &args.trace {
        write_trace(path, &report.trace, map.offset)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    if !args.quiet {
        print_report(&raw.name, &report, map.offset);
    }
    if let Some(msg) = &report.message {
        eprintln!("{}: {msg}", report.status.as_str());
    }
    Ok(exit_code(report.status))
}

fn print_report(name: &str, report: &SolveReport, offset: f64) {
    println!("problem     {name}");
    println!("status      {}", report.status.as_str());
    println!("objective   {:.12e}", report.objective_with_offset(offset));
    println!("iterations  {}", report.iterations);
    println!("rf          {:.3e}", report.rf);
    println!("rgap        {:.3e}", report.rgap);
}

pub const TRACE_HEADER: [&str; 9] = [
    "iter",
    "objective",
    "rf",
    "rgap",
    "step_feas",
    "step_desc",
    "min_x",
    "clamps",
    "regularization",
];

/// Objectives are written in the original space.
fn write_trace(path: &Path, trace: &[TraceRecord], offset: f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRACE_HEADER)?;
    for t in trace {
        w.write_record([
            t.iteration.to_string(),
            (t.objective + offset).to_string(),
            t.rf.to_string(),
            t.rgap.to_string(),
            t.step_feasibility.to_string(),
            t.step_descent.to_string(),
            t.min_x.to_string(),
            t.clamps.to_string(),
            t.regularization.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
