//! Table and figure reproduction against the bundled reference values.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use gesq_core::exact::figure1_rows;
use gesq_core::noise::{Method, Target};
use gesq_core::sdp::SdpOptions;
use gesq_core::subspaces::Family;
use gesq_core::variational::SeesawConfig;

use crate::compute::{self, Detector, Measure, Spec, Value64};
use crate::error::CliError;
use crate::manifest::{write_records_csv, Record, RunManifest, SolverSettings, Status};
use crate::reference::{self, RefCell};

pub const TABLES: [&str; 6] = ["I", "II", "III", "IV", "V", "VI"];
pub const METHODS: [&str; 6] = ["exact", "seesaw", "sdp", "pptmix", "fidelity", "witness"];

/// Grid used for the figure: `theta = k pi / FIG1_STEPS`, `0 < k < FIG1_STEPS`.
pub const FIG1_STEPS: usize = 180;

#[derive(Clone, Debug)]
pub struct Settings {
    pub sdp: SdpOptions,
    pub seesaw: SeesawConfig,
    pub tol_p: f64,
    /// SDP-based cells on spaces larger than this are skipped.
    pub max_d: usize,
    /// No new cell starts after this instant.
    pub deadline: Option<Instant>,
    pub methods: Option<Vec<String>>,
}

/// The method that computes a reference quantity.
pub fn method_for(cell: &RefCell) -> &'static str {
    match cell.quantity.as_str() {
        "dim" | "GM-bound" | "GM-max" => "exact",
        "GGM" if cell.family == "S" => "exact",
        "GM" | "GGM" => "seesaw",
        "GM-SDP" | "GGM-SDP" => "sdp",
        "E-ppt" | "E-ppt-fully" | "p-ppt-gme" => "pptmix",
        "EF-GM" | "EF-GGM" | "p-F-gme" | "p-F-ent" => "fidelity",
        q if q.starts_with("p-witness") => "witness",
        _ => "unknown",
    }
}

fn uses_sdp(method: &str) -> bool {
    matches!(method, "sdp" | "pptmix" | "fidelity")
}

fn measure_of(q: &str) -> Measure {
    if q.contains("GGM") || q.ends_with("gme") {
        Measure::Ggm
    } else {
        Measure::Gm
    }
}

fn evaluate(cell: &RefCell, set: &Settings) -> Result<Value64, CliError> {
    let family: Family = cell.family.parse()?;
    let spec = Spec { family, n: cell.n, d: cell.d, theta: FRAC_PI_2 };
    let q = cell.quantity.as_str();
    if q == "GM-max" {
        let rows = figure1_rows(&[cell.d], FIG1_STEPS)?;
        let (theta, _, v) = rows.iter().copied().fold((0.0, 0, f64::NEG_INFINITY), |a, r| if r.2 > a.2 { r } else { a });
        return Ok(Value64::plain(v).with("theta", json!(theta)));
    }
    if q == "GM-bound" {
        return compute::gm_bound(&spec);
    }
    let s = spec.build()?;
    let k = s.dim() as f64;
    Ok(match q {
        "dim" => Value64::plain(k),
        "GM" | "GGM" => {
            let m = measure_of(q);
            match compute::closed_form(&spec, m)? {
                Some(v) => v,
                None => compute::seesaw(&s, m, &set.seesaw)?,
            }
        }
        "GM-SDP" | "GGM-SDP" => compute::sdp(&s, measure_of(q), &set.sdp)?,
        "E-ppt" | "E-ppt-fully" | "EF-GM" | "EF-GGM" => {
            let rho = s.projector().scale(&(1.0 / k));
            let det = match q {
                "E-ppt" => Detector::Pptmix { fully: false },
                "E-ppt-fully" => Detector::Pptmix { fully: true },
                _ => Detector::Fidelity(measure_of(q)),
            };
            compute::detector(&rho, det, &set.sdp)?
        }
        "p-witness-gme" | "p-witness-ent" => {
            let target = if q.ends_with("gme") { Target::Gme } else { Target::Ent };
            let eps = compute::witness_epsilon(&spec, &s, target, &set.seesaw)?;
            let mut v = compute::witness(&s, target, &eps)?;
            v.details.extend(eps.details);
            v
        }
        "p-ppt-gme" | "p-F-gme" | "p-F-ent" => {
            let method = match q {
                "p-ppt-gme" => Method::Pptmix,
                "p-F-gme" => Method::FidelityGgm,
                _ => Method::FidelityGm,
            };
            compute::bisect(&s, method, set.tol_p, &set.sdp)?.0
        }
        other => return Err(CliError::Other(format!("no method for quantity '{other}'"))),
    })
}

fn base_record(cell: &RefCell, method: &str) -> Record {
    Record {
        ref_table: cell.ref_table.clone(),
        family: cell.family.clone(),
        n: cell.n,
        d: cell.d,
        quantity: cell.quantity.clone(),
        method: method.into(),
        value: None,
        exact: None,
        reference: Some(cell.value),
        reference_text: Some(cell.text.clone()),
        delta: None,
        tolerance: Some(cell.tolerance),
        status: Status::Skipped,
        seconds: 0.0,
        details: BTreeMap::new(),
    }
}

fn skip(mut r: Record, reason: String) -> Record {
    r.details.insert("skip_reason".into(), Value::String(reason));
    r
}

pub fn run_cell(cell: &RefCell, set: &Settings) -> Record {
    let method = method_for(cell);
    let rec = base_record(cell, method);
    if set.deadline.is_some_and(|t| Instant::now() >= t) {
        return skip(rec, "time limit reached before the cell started".into());
    }
    if uses_sdp(method) {
        let total = match cell.family.parse::<Family>() {
            Ok(Family::S) => 2 * cell.d.pow(cell.n as u32 - 1),
            _ => cell.d.pow(cell.n as u32),
        };
        if total > set.max_d {
            return skip(rec, format!("D = {total} exceeds --max-D {}", set.max_d));
        }
    }
    let start = Instant::now();
    let out = evaluate(cell, set);
    let mut rec = rec;
    rec.seconds = start.elapsed().as_secs_f64();
    match out {
        Ok(v) => {
            let delta = (v.value - cell.value).abs();
            rec.value = Some(v.value);
            rec.exact = v.exact;
            rec.delta = Some(delta);
            rec.status = if delta <= cell.tolerance { Status::Ok } else { Status::Violation };
            rec.details.extend(v.details);
        }
        Err(CliError::Budget(m)) => rec = skip(rec, m),
        Err(CliError::Solver(m)) => {
            rec.status = Status::SolverFailure;
            rec.details.insert("error".into(), Value::String(m));
        }
        Err(e) => {
            rec.status = Status::Error;
            rec.details.insert("error".into(), Value::String(e.to_string()));
        }
    }
    eprintln!("  finished {} in {:.1}s", label(&rec), rec.seconds);
    rec
}

fn label(r: &Record) -> String {
    format!("{} {} N={} d={} {}", r.ref_table, r.family, r.n, r.d, r.quantity)
}

fn report_line(r: &Record) -> String {
    let status = serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    match (r.value, r.delta) {
        (Some(v), Some(dl)) => format!(
            "{:<32} {:<8} {:>14.8} ref {:<10} |delta| {:.2e} tol {:.1e} {}",
            label(r),
            r.method,
            v,
            r.reference_text.as_deref().unwrap_or(""),
            dl,
            r.tolerance.unwrap_or(0.0),
            status
        ),
        _ => {
            let why = r.details.get("skip_reason").or_else(|| r.details.get("error"));
            format!("{:<32} {:<8} {} {}", label(r), r.method, status, why.and_then(Value::as_str).unwrap_or(""))
        }
    }
}

/// Exit code for a finished set of records.
pub fn exit_code(records: &[Record]) -> i32 {
    let has = |s: Status| records.iter().any(|r| r.status == s);
    if has(Status::SolverFailure) {
        3
    } else if has(Status::Violation) {
        2
    } else if has(Status::Error) {
        1
    } else {
        0
    }
}

fn check_methods(set: &Settings) -> Result<(), CliError> {
    for m in set.methods.iter().flatten() {
        if !METHODS.contains(&m.as_str()) {
            return Err(CliError::Usage(format!("unknown method '{m}' (expected one of {})", METHODS.join(", "))));
        }
    }
    Ok(())
}

/// Runs every selected cell of a table; writes `<stem>.csv`, `<stem>.reference.csv`
/// and `<stem>.manifest.json` into `out`.
pub fn reproduce_cells(
    stem: &str,
    cells: Vec<RefCell>,
    set: &Settings,
    out: &Path,
    mut manifest: RunManifest,
) -> Result<Vec<Record>, CliError> {
    check_methods(set)?;
    let cells: Vec<RefCell> = cells
        .into_iter()
        .filter(|c| set.methods.as_ref().is_none_or(|ms| ms.iter().any(|m| m == method_for(c))))
        .collect();
    if cells.is_empty() {
        return Err(CliError::Usage("no cells match the requested methods".into()));
    }
    std::fs::create_dir_all(out)?;
    let start = Instant::now();
    let records: Vec<Record> = cells.par_iter().map(|c| run_cell(c, set)).collect();
    for r in &records {
        println!("{}", report_line(r));
    }
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    manifest.records = records.clone();
    write_records_csv(&records, &out.join(format!("{stem}.csv")))?;
    reference::write(&cells, &out.join(format!("{stem}.reference.csv")))?;
    manifest.write_json(&out.join(format!("{stem}.manifest.json")))?;
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    println!(
        "{} cells: {} ok, {} violation, {} skipped, {} solver-failure, {} error",
        records.len(),
        count(Status::Ok),
        count(Status::Violation),
        count(Status::Skipped),
        count(Status::SolverFailure),
        count(Status::Error)
    );
    Ok(records)
}

pub fn table_manifest(table: &str, set: &Settings, seed: u64) -> RunManifest {
    let mut m = RunManifest::new("reproduce", seed, SolverSettings { sdp: set.sdp, seesaw: set.seesaw });
    m.param("table", table);
    m.param("methods", &set.methods);
    m.param("max_D", set.max_d);
    m.param("tol_p", set.tol_p);
    m
}

/// Figure data: `(theta, d, E_GM)` rows for the two-qudit CES family.
pub fn write_figure1(ds: &[usize], steps: usize, path: Option<&Path>) -> Result<(), CliError> {
    let rows = figure1_rows(ds, steps)?;
    let sink: Box<dyn std::io::Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(sink);
    w.write_record(["theta", "d", "gm"])?;
    for (theta, d, v) in rows {
        w.write_record([theta.to_string(), d.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn reproduce_fig1(set: &Settings, out: &Path, seed: u64) -> Result<Vec<Record>, CliError> {
    std::fs::create_dir_all(out)?;
    let ds: Vec<usize> = (2..=7).collect();
    write_figure1(&ds, FIG1_STEPS, Some(&out.join("fig1.data.csv")))?;
    let mut m = RunManifest::new("reproduce", seed, SolverSettings { sdp: set.sdp, seesaw: set.seesaw });
    m.param("figure", "fig1");
    m.param("d", &ds);
    m.param("steps", FIG1_STEPS);
    reproduce_cells("fig1", reference::table("fig1")?, set, out, m)
}
