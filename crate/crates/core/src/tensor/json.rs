//! JSON exchange format for states, Hermitian matrices and subspaces.
//!
//! Every document carries `schema_version`, a `kind` tag and the `dims` array.
//! Complex numbers are `[re, im]` pairs; matrices are lists of rows and a
//! subspace basis is a list of orthonormal vectors.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::matrix::CMatrix;
use super::op::HermitianOp;
use super::space::HilbertSpace;
use super::state::PureState;
use super::subspace::Subspace;
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateDoc {
    pub schema_version: u32,
    pub kind: String,
    pub dims: Vec<usize>,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub schema_version: u32,
    pub kind: String,
    pub dims: Vec<usize>,
    pub entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceDoc {
    pub schema_version: u32,
    pub kind: String,
    pub label: String,
    pub dims: Vec<usize>,
    pub dimension: usize,
    pub basis: Vec<Vec<[f64; 2]>>,
}

fn pack<T: Scalar>(z: &Complex<T>) -> [f64; 2] {
    [z.re.as_f64(), z.im.as_f64()]
}

fn unpack<T: Scalar>(p: &[f64; 2]) -> Complex<T> {
    Complex::new(T::of_f64(p[0]), T::of_f64(p[1]))
}

fn check_header(version: u32, kind: &str, expected: &str) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(Error::InvalidParameter(format!("unsupported schema_version {version}")));
    }
    if kind != expected {
        return Err(Error::InvalidParameter(format!("expected kind '{expected}', found '{kind}'")));
    }
    Ok(())
}

pub fn state_to_doc<T: Scalar>(s: &PureState<T>) -> StateDoc {
    StateDoc {
        schema_version: SCHEMA_VERSION,
        kind: "state".into(),
        dims: s.space().dims().to_vec(),
        amplitudes: s.amplitudes().iter().map(pack).collect(),
    }
}

pub fn state_from_doc<T: Scalar>(doc: &StateDoc) -> Result<PureState<T>> {
    check_header(doc.schema_version, &doc.kind, "state")?;
    let space = HilbertSpace::new(doc.dims.clone())?;
    PureState::new(space, doc.amplitudes.iter().map(unpack).collect())
}

pub fn matrix_to_doc<T: Scalar>(op: &HermitianOp<T>) -> MatrixDoc {
    let m = op.matrix();
    MatrixDoc {
        schema_version: SCHEMA_VERSION,
        kind: "hermitian".into(),
        dims: op.space().dims().to_vec(),
        entries: (0..m.rows()).map(|i| m.row(i).iter().map(pack).collect()).collect(),
    }
}

pub fn matrix_from_doc<T: Scalar>(doc: &MatrixDoc) -> Result<HermitianOp<T>> {
    check_header(doc.schema_version, &doc.kind, "hermitian")?;
    let space = HilbertSpace::new(doc.dims.clone())?;
    let d = space.total();
    if doc.entries.len() != d || doc.entries.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: doc.entries.len() });
    }
    let m = CMatrix::from_fn(d, d, |i, j| unpack(&doc.entries[i][j]));
    HermitianOp::new(space, m)
}

pub fn subspace_to_doc<T: Real>(s: &Subspace<T>) -> SubspaceDoc {
    SubspaceDoc {
        schema_version: SCHEMA_VERSION,
        kind: "subspace".into(),
        label: s.label().to_string(),
        dims: s.space().dims().to_vec(),
        dimension: s.dim(),
        basis: (0..s.dim()).map(|j| s.vector(j).iter().map(pack).collect()).collect(),
    }
}

pub fn subspace_from_doc<T: Real>(doc: &SubspaceDoc) -> Result<Subspace<T>> {
    check_header(doc.schema_version, &doc.kind, "subspace")?;
    let space = HilbertSpace::new(doc.dims.clone())?;
    let cols: Vec<Vec<Complex<T>>> =
        doc.basis.iter().map(|v| v.iter().map(unpack).collect()).collect();
    if cols.len() != doc.dimension {
        return Err(Error::DimensionMismatch { expected: doc.dimension, found: cols.len() });
    }
    if let Some(bad) = cols.iter().find(|c| c.len() != space.total()) {
        return Err(Error::DimensionMismatch { expected: space.total(), found: bad.len() });
    }
    Subspace::from_orthonormal(space.clone(), CMatrix::from_columns(space.total(), &cols), doc.label.clone())
}
