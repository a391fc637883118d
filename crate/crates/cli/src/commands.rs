//! Subcommand implementations. Each returns the process exit code after
//! writing its report; errors bubble up as messages and exit 1.

use std::io::Write;
use std::path::{Path, PathBuf};

use polylink::atlas::sample_atlas;
use polylink::config_space::{classify, default_tolerance, is_feasible, straight_line_sign_vectors};
use polylink::flow::{convexify, FlowParams, FlowStatus, FlowTrace};
use polylink::sweep::figure_eight_sweep;
use polylink::{PolygonChain, SideLengths};
use serde::Serialize;

use crate::input::{read_lengths, read_polygon};
use crate::output::{fmt_from_log, fmt_g17, to_csv, to_json};
use crate::svg::write_frame_set;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_LENGTHS: u8 = 2;
pub const EXIT_NOT_EMBEDDED: u8 = 3;
pub const EXIT_FLOW: u8 = 4;

pub type CmdResult = Result<u8, String>;

fn emit(out: &mut dyn Write, text: &str) -> Result<(), String> {
    out.write_all(text.as_bytes()).map_err(|e| format!("cannot write output: {e}"))
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    }
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn signs(v: &[i8]) -> Vec<&'static str> {
    v.iter().map(|&s| if s > 0 { "+" } else { "-" }).collect()
}

#[derive(Serialize)]
struct AnalyzeReport {
    n: usize,
    dimension: usize,
    feasible: bool,
    generic: bool,
    straight_line: Vec<Vec<&'static str>>,
    exact: bool,
}

fn analyze_report(lengths: &SideLengths) -> Result<AnalyzeReport, String> {
    let sl = straight_line_sign_vectors(lengths, default_tolerance(lengths)).map_err(|e| e.to_string())?;
    Ok(AnalyzeReport {
        n: lengths.len(),
        dimension: lengths.len() - 3,
        feasible: is_feasible(lengths),
        generic: sl.is_empty(),
        straight_line: sl.sign_vectors.iter().map(|v| signs(v)).collect(),
        exact: sl.exact,
    })
}

pub fn analyze(file: &Path, out: &mut dyn Write) -> CmdResult {
    let lengths = read_lengths(file)?;
    let report = analyze_report(&lengths)?;
    emit(out, &to_json(&report))?;
    Ok(if report.feasible { EXIT_OK } else { EXIT_LENGTHS })
}

#[derive(Serialize)]
struct CheckReport {
    n: usize,
    side_lengths: Vec<f64>,
    turn_angles: Vec<f64>,
    winding: f64,
    turning_number: Option<i64>,
    embedded: bool,
    convex_ccw: bool,
    min_turn: f64,
    closure_defect: f64,
}

fn check_report(chain: &PolygonChain, closure_defect: f64) -> Result<CheckReport, String> {
    let class = classify(chain).map_err(|e| e.to_string())?;
    Ok(CheckReport {
        n: chain.len(),
        side_lengths: chain.side_lengths(),
        turn_angles: class.turn_angles.0.clone(),
        winding: class.winding,
        turning_number: class.turning_number(),
        embedded: class.embedded,
        convex_ccw: class.convex_ccw,
        min_turn: class.min_turn,
        closure_defect,
    })
}

pub fn check(file: &Path, out: &mut dyn Write) -> CmdResult {
    let input = read_polygon(file)?;
    let report = check_report(&input.chain, input.closure_defect)?;
    emit(out, &to_json(&report))?;
    Ok(if report.embedded { EXIT_OK } else { EXIT_NOT_EMBEDDED })
}

pub struct ConvexifyArgs {
    pub params: FlowParams,
    pub trace: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Serialize)]
struct ConvexifySummary<'a> {
    status: FlowStatus,
    reflected: bool,
    generic: bool,
    accepted_steps: usize,
    initial_energy: f64,
    initial_log_energy: f64,
    final_log_energy: f64,
    final_min_turn: f64,
    frames: usize,
    vertices: Vec<[f64; 2]>,
    trace: Option<&'a Path>,
    svg: Option<&'a Path>,
}

#[derive(Serialize)]
struct TraceFile<'a> {
    params: &'a FlowParams,
    trace: &'a FlowTrace,
}

/// Per-iteration energy table. `energy` is printed from `ln E` so it stays
/// positive and strictly decreasing after `E` underflows.
pub fn energy_csv(trace: &FlowTrace) -> String {
    let header = ["iteration", "energy", "min_theta", "log_energy"].map(String::from);
    let rows: Vec<Vec<String>> = trace
        .records
        .iter()
        .map(|r| vec![r.iteration.to_string(), fmt_from_log(r.log_energy), fmt_g17(r.min_turn), fmt_g17(r.log_energy)])
        .collect();
    to_csv(&header, &rows)
}

pub fn convexify_cmd(file: &Path, args: &ConvexifyArgs, out: &mut dyn Write) -> CmdResult {
    args.params.validate().map_err(|e| e.to_string())?;
    let input = read_polygon(file)?;
    let report = check_report(&input.chain, input.closure_defect)?;
    if !report.embedded {
        emit(out, &to_json(&report))?;
        return Ok(EXIT_NOT_EMBEDDED);
    }
    let trace = match convexify(&input.chain, &args.params) {
        Ok(t) => t,
        Err(polylink::Error::NotEmbedded) => {
            emit(out, &to_json(&report))?;
            return Ok(EXIT_NOT_EMBEDDED);
        }
        Err(e) => {
            eprintln!("flow failed: {e}");
            return Ok(EXIT_FLOW);
        }
    };
    if let Some(path) = &args.trace {
        write_file(path, &to_json(&TraceFile { params: &args.params, trace: &trace }))?;
    }
    if let Some(dir) = &args.svg {
        let chains: Vec<PolygonChain> = trace.snapshots.iter().map(|s| s.chain.clone()).collect();
        let captions: Vec<String> = trace.snapshots.iter().map(|s| format!("iteration {}", s.iteration)).collect();
        write_frame_set(dir, &chains, &captions).map_err(|e| format!("cannot write {}: {e}", dir.display()))?;
        write_file(&dir.join("energy.csv"), &energy_csv(&trace))?;
    }
    let first = &trace.records[0];
    let last = trace.records.last().expect("trace has an initial record");
    let summary = ConvexifySummary {
        status: trace.status,
        reflected: trace.reflected,
        generic: trace.generic,
        accepted_steps: trace.accepted_steps,
        initial_energy: first.energy,
        initial_log_energy: first.log_energy,
        final_log_energy: last.log_energy,
        final_min_turn: last.min_turn,
        frames: trace.snapshots.len(),
        vertices: trace.final_chain().to_xy(),
        trace: args.trace.as_deref(),
        svg: args.svg.as_deref(),
    };
    emit(out, &to_json(&summary))?;
    Ok(if trace.status == FlowStatus::ConvergedConvex { EXIT_OK } else { EXIT_FLOW })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtlasFormat {
    Csv,
    Json,
}

pub struct AtlasArgs {
    pub k: usize,
    pub grid: usize,
    pub format: AtlasFormat,
    pub file: Option<PathBuf>,
}

pub fn atlas(file: &Path, args: &AtlasArgs, out: &mut dyn Write) -> CmdResult {
    let lengths = read_lengths(file)?;
    let n = lengths.len();
    if n < 4 || args.k == 0 || args.k > n - 3 {
        return Err(format!("--k {} is outside 1..=n-3 for n = {n}", args.k));
    }
    if args.grid < 2 {
        return Err("--grid must be at least 2".into());
    }
    let report = analyze_report(&lengths)?;
    if !report.feasible || !report.generic {
        emit(out, &to_json(&report))?;
        return Ok(EXIT_LENGTHS);
    }
    let sample = sample_atlas(&lengths, args.k, args.grid).map_err(|e| e.to_string())?;
    let text = match args.format {
        AtlasFormat::Json => to_json(&sample),
        AtlasFormat::Csv => {
            let mut header: Vec<String> = (0..args.k - 1).map(|i| format!("theta_{i}")).collect();
            header.extend(["nu", "mu", "witness_kind_min", "witness_kind_max", "witness_j"].map(String::from));
            let rows: Vec<Vec<String>> = sample
                .rows
                .iter()
                .map(|r| {
                    let mut row: Vec<String> = r.prefix.iter().map(|&t| fmt_g17(t)).collect();
                    row.push(fmt_g17(r.nu));
                    row.push(fmt_g17(r.mu));
                    row.push(r.min_witness.kind.as_str().into());
                    row.push(r.max_witness.kind.as_str().into());
                    row.push(r.max_witness.run_end.map(|j| j.to_string()).unwrap_or_default());
                    row
                })
                .collect();
            to_csv(&header, &rows)
        }
    };
    match &args.file {
        Some(path) => write_file(path, &text)?,
        None => emit(out, &text)?,
    }
    Ok(EXIT_OK)
}

pub const DEMO_FRAMES: usize = 12;

pub fn demo_figure_eight(samples: usize, svg: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let report = figure_eight_sweep(samples, DEMO_FRAMES).map_err(|e| e.to_string())?;
    if let Some(dir) = svg {
        let captions: Vec<String> =
            (0..report.representatives.len()).map(|i| format!("counterclockwise arc, sample {i}")).collect();
        write_frame_set(dir, &report.representatives, &captions)
            .map_err(|e| format!("cannot write {}: {e}", dir.display()))?;
    }
    emit(out, &to_json(&report))?;
    Ok(if report.nonembedded_count == 1 && report.ccw_arc_contiguous { EXIT_OK } else { EXIT_LENGTHS })
}
