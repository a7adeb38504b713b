//! Reference values bundled with the binary.

use serde::{Deserialize, Serialize};

use crate::error::CliError;

const REFERENCE_CSV: &str = include_str!("../data/reference.csv");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefCell {
    pub ref_table: String,
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub quantity: String,
    /// The reference value as written, e.g. `0.41416`, `3/7` or `4.8023e-3`.
    pub text: String,
    pub value: f64,
    pub tolerance: f64,
    /// `exact`, `numeric`, `detector`, `threshold` or `count`.
    pub class: String,
}

pub fn all() -> Result<Vec<RefCell>, CliError> {
    let mut rdr = csv::Reader::from_reader(REFERENCE_CSV.as_bytes());
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

/// Rows of one table. `III` also covers the qudit `Q2` companion rows.
pub fn table(id: &str) -> Result<Vec<RefCell>, CliError> {
    let rows: Vec<RefCell> = all()?
        .into_iter()
        .filter(|r| r.ref_table == id || (id == "III" && r.ref_table == "III-Q2"))
        .collect();
    if rows.is_empty() {
        return Err(CliError::Usage(format!("no reference table '{id}'")));
    }
    Ok(rows)
}

pub fn write(rows: &[RefCell], path: &std::path::Path) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
