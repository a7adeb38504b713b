//! Machine-readable run records.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use gesq_core::sdp::SdpOptions;
use gesq_core::variational::SeesawConfig;

use crate::error::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct SolverSettings {
    pub sdp: SdpOptions,
    pub seesaw: SeesawConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Violation,
    Skipped,
    SolverFailure,
    Error,
}

/// One computed cell, with its reference value when there is one.
#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub ref_table: String,
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub quantity: String,
    pub method: String,
    pub value: Option<f64>,
    pub exact: Option<String>,
    pub reference: Option<f64>,
    pub reference_text: Option<String>,
    pub delta: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: Status,
    pub seconds: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub parameters: BTreeMap<String, Value>,
    pub rng_seed: u64,
    pub solver: SolverSettings,
    pub artifact_version: String,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub records: Vec<Record>,
}

impl RunManifest {
    pub fn new(command: &str, rng_seed: u64, solver: SolverSettings) -> Self {
        Self {
            command: command.into(),
            argv: std::env::args().collect(),
            parameters: BTreeMap::new(),
            rng_seed,
            solver,
            artifact_version: env!("CARGO_PKG_VERSION").into(),
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            wall_clock_seconds: 0.0,
            records: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) {
        self.parameters.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    pub fn write_json(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// Flat CSV view of the records, details left out.
pub fn write_records_csv(records: &[Record], path: &Path) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(path)?;
    w.write_record([
        "ref_table", "family", "N", "d", "quantity", "method", "value", "exact", "reference", "reference_text", "delta",
        "tolerance", "status", "seconds",
    ])?;
    let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        let status = serde_json::to_value(r.status)?.as_str().unwrap_or_default().to_string();
        w.write_record([
            r.ref_table.clone(),
            r.family.clone(),
            r.n.to_string(),
            r.d.to_string(),
            r.quantity.clone(),
            r.method.clone(),
            num(r.value),
            r.exact.clone().unwrap_or_default(),
            num(r.reference),
            r.reference_text.clone().unwrap_or_default(),
            num(r.delta),
            num(r.tolerance),
            status,
            format!("{:.3}", r.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}
