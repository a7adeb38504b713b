//! Lowering of a [`ConicProgram`] to a real block SDP in dual form
//! `max b'y  s.t.  C_j - sum_i y_i A_ij >= 0`.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use super::program::{ConicProgram, LinearForm, MatExpr, Sense, VarKind, C64};
use crate::error::{Error, Result};
use crate::tensor::CMatrix;

pub type Triplet = (u32, u32, f64);

/// Real symmetric block SDP in dual form. Matrices are stored as full
/// (both triangles) sparse triplets.
#[derive(Clone, Debug)]
pub struct RealSdp {
    pub block_sizes: Vec<usize>,
    pub constant: Vec<Vec<Triplet>>,
    /// Per block: the variables that touch it and their coefficient matrices.
    pub coeffs: Vec<Vec<(usize, Vec<Triplet>)>>,
    pub b: Vec<f64>,
}

impl RealSdp {
    pub fn m(&self) -> usize {
        self.b.len()
    }
}

#[derive(Clone, Copy, Debug)]
enum Basis {
    Diag(usize),
    Re(usize, usize),
    Im(usize, usize),
}

#[derive(Clone, Debug)]
struct Param {
    var: usize,
    hermitian: bool,
    basis: Basis,
}

impl Param {
    /// Nonzero entries of the basis matrix.
    fn entries(&self) -> Vec<(usize, usize, C64)> {
        let one = Complex::new(1.0, 0.0);
        let i = Complex::new(0.0, 1.0);
        match (self.basis, self.hermitian) {
            (Basis::Diag(p), _) => vec![(p, p, one)],
            (Basis::Re(p, q), true) => vec![(p, q, one), (q, p, one)],
            (Basis::Im(p, q), true) => vec![(p, q, i), (q, p, -i)],
            (Basis::Re(p, q), false) => vec![(p, q, one)],
            (Basis::Im(p, q), false) => vec![(p, q, i)],
        }
    }
}

#[derive(Clone, Debug)]
struct Affine {
    c0: f64,
    terms: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
enum Recover {
    Free(usize),
    Fixed(Affine),
}

/// A lowered program together with the data needed to map solutions back.
#[derive(Clone, Debug)]
pub struct Lowered {
    pub sdp: RealSdp,
    /// True when variables were restricted to real matrices.
    pub real_mode: bool,
    pub sense: Sense,
    /// Original objective `= sign * b'z + offset`.
    pub sign: f64,
    pub offset: f64,
    shapes: Vec<VarKind>,
    params: Vec<Param>,
    recover: Vec<Recover>,
}

fn params_for(kind: VarKind, var: usize, real: bool) -> Vec<Param> {
    let mut out = Vec::new();
    match kind {
        VarKind::Hermitian(n) => {
            for p in 0..n {
                out.push(Param { var, hermitian: true, basis: Basis::Diag(p) });
                for q in p + 1..n {
                    out.push(Param { var, hermitian: true, basis: Basis::Re(p, q) });
                    if !real {
                        out.push(Param { var, hermitian: true, basis: Basis::Im(p, q) });
                    }
                }
            }
        }
        VarKind::General(r, c) => {
            for p in 0..r {
                for q in 0..c {
                    out.push(Param { var, hermitian: false, basis: Basis::Re(p, q) });
                    if !real {
                        out.push(Param { var, hermitian: false, basis: Basis::Im(p, q) });
                    }
                }
            }
        }
    }
    out
}

/// `Re tr(C E)` for a sparse `E`.
fn form_coeff(c: &CMatrix<f64>, e: &[(usize, usize, C64)]) -> f64 {
    e.iter().map(|&(p, q, v)| (c[(q, p)] * v).re).sum()
}

/// Complex contributions of every parameter to an expression.
fn expr_contrib(
    e: &MatExpr,
    params: &[Param],
    ranges: &[(usize, usize)],
    mut sink: impl FnMut(usize, usize, usize, C64),
) {
    let mut buf = Vec::new();
    for t in &e.terms {
        let (lo, hi) = ranges[t.var.0];
        for (pi, param) in params.iter().enumerate().take(hi).skip(lo) {
            for (r, c, v) in param.entries() {
                buf.clear();
                t.map.images(r, c, t.coeff, &mut buf);
                for (k, &(i, j, w)) in buf.iter().enumerate() {
                    let val = if k == 0 { w * v } else { w * v.conj() };
                    sink(pi, i, j, val);
                }
            }
        }
    }
}

fn embed(real: bool, n: usize, i: usize, j: usize, v: C64, out: &mut Vec<Triplet>) {
    let (i, j) = (i as u32, j as u32);
    if real {
        if v.re != 0.0 {
            out.push((i, j, v.re));
        }
        return;
    }
    let n = n as u32;
    if v.re != 0.0 {
        out.push((i, j, v.re));
        out.push((i + n, j + n, v.re));
    }
    if v.im != 0.0 {
        out.push((i + n, j, v.im));
        out.push((i, j + n, -v.im));
    }
}

fn merge(mut t: Vec<Triplet>) -> Vec<Triplet> {
    t.sort_by_key(|&(i, j, _)| (i, j));
    let mut out: Vec<Triplet> = Vec::with_capacity(t.len());
    for (i, j, v) in t {
        match out.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 += v,
            _ => out.push((i, j, v)),
        }
    }
    out.retain(|x| x.2.abs() > 1e-15);
    out
}

struct Eliminator {
    subst: Vec<Option<Affine>>,
    refs: Vec<Vec<usize>>,
}

impl Eliminator {
    fn new(m: usize) -> Self {
        Self { subst: vec![None; m], refs: vec![Vec::new(); m] }
    }

    fn add_row(&mut self, row: &[(usize, f64)], rhs: f64) -> Result<()> {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        let mut rhs = rhs;
        for &(p, a) in row {
            match &self.subst[p] {
                Some(aff) => {
                    rhs -= a * aff.c0;
                    for &(q, b) in &aff.terms {
                        *acc.entry(q).or_insert(0.0) += a * b;
                    }
                }
                None => *acc.entry(p).or_insert(0.0) += a,
            }
        }
        let max = acc.values().fold(0.0f64, |m, v| m.max(v.abs()));
        acc.retain(|_, v| v.abs() > 1e-12 * max.max(1.0));
        if acc.is_empty() {
            if rhs.abs() > 1e-9 {
                return Err(Error::Solver(format!("inconsistent equality constraints (residual {rhs:e})")));
            }
            return Ok(());
        }
        let (&pivot, &ap) = acc.iter().rev().find(|(_, v)| v.abs() >= 0.5 * max).expect("nonempty");
        let aff = Affine {
            c0: rhs / ap,
            terms: acc.iter().filter(|(&q, _)| q != pivot).map(|(&q, &v)| (q, -v / ap)).collect(),
        };
        for &e in &std::mem::take(&mut self.refs[pivot]) {
            let Some(old) = self.subst[e].take() else { continue };
            let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
            let mut c0 = old.c0;
            for (q, b) in old.terms {
                if q == pivot {
                    c0 += b * aff.c0;
                    for &(r, w) in &aff.terms {
                        *merged.entry(r).or_insert(0.0) += b * w;
                    }
                } else {
                    *merged.entry(q).or_insert(0.0) += b;
                }
            }
            let terms: Vec<(usize, f64)> = merged.into_iter().filter(|(_, v)| v.abs() > 1e-15).collect();
            for &(q, _) in &terms {
                if !self.refs[q].contains(&e) {
                    self.refs[q].push(e);
                }
            }
            self.subst[e] = Some(Affine { c0, terms });
        }
        for &(q, _) in &aff.terms {
            self.refs[q].push(pivot);
        }
        self.subst[pivot] = Some(aff);
        Ok(())
    }
}

impl Lowered {
    /// Lowers `prog`. With `allow_real`, programs with only real data are
    /// solved over real variables.
    pub fn new(prog: &ConicProgram, allow_real: bool) -> Result<Self> {
        prog.validate()?;
        let real = allow_real && prog.is_real();
        let mut params = Vec::new();
        let mut ranges = Vec::new();
        for (k, v) in prog.variables.iter().enumerate() {
            let lo = params.len();
            params.extend(params_for(v.kind, k, real));
            ranges.push((lo, params.len()));
        }
        let m0 = params.len();

        let form_row = |f: &LinearForm| -> Vec<(usize, f64)> {
            let mut row = Vec::new();
            for (v, c) in &f.terms {
                let (lo, hi) = ranges[v.0];
                for (pi, p) in params.iter().enumerate().take(hi).skip(lo) {
                    let a = form_coeff(c, &p.entries());
                    if a != 0.0 {
                        row.push((pi, a));
                    }
                }
            }
            row
        };

        let mut elim = Eliminator::new(m0);
        for (f, rhs) in &prog.equalities {
            elim.add_row(&form_row(f), rhs - f.constant)?;
        }
        for (_, e) in &prog.matrix_equalities {
            let mut entries: HashMap<(usize, usize), Vec<(usize, C64)>> = HashMap::new();
            expr_contrib(e, &params, &ranges, |pi, i, j, v| {
                if i <= j {
                    entries.entry((i, j)).or_default().push((pi, v));
                }
            });
            let mut keys: Vec<(usize, usize)> = entries.keys().copied().collect();
            if let Some(c) = &e.constant {
                for i in 0..e.size {
                    for j in i..e.size {
                        if !c[(i, j)].is_zero() && !entries.contains_key(&(i, j)) {
                            keys.push((i, j));
                        }
                    }
                }
            }
            keys.sort();
            for (i, j) in keys {
                let row = entries.get(&(i, j)).cloned().unwrap_or_default();
                let c = e.constant.as_ref().map_or(Complex::zero(), |c| c[(i, j)]);
                let re: Vec<(usize, f64)> = row.iter().filter(|x| x.1.re != 0.0).map(|&(p, v)| (p, v.re)).collect();
                elim.add_row(&re, -c.re)?;
                if i != j && !real {
                    let im: Vec<(usize, f64)> =
                        row.iter().filter(|x| x.1.im != 0.0).map(|&(p, v)| (p, v.im)).collect();
                    elim.add_row(&im, -c.im)?;
                }
            }
        }

        let mut recover = Vec::with_capacity(m0);
        let mut m = 0;
        for s in &elim.subst {
            match s {
                None => {
                    recover.push(Recover::Free(m));
                    m += 1;
                }
                Some(a) => recover.push(Recover::Fixed(a.clone())),
            }
        }
        let free_index = |q: usize| match recover[q] {
            Recover::Free(j) => j,
            Recover::Fixed(_) => unreachable!("substitutions are fully reduced"),
        };

        let obj_row = form_row(&prog.objective);
        let sign = match prog.sense {
            Sense::Minimize => -1.0,
            Sense::Maximize => 1.0,
        };
        let mut b = vec![0.0; m];
        let mut offset = prog.objective.constant;
        for &(pi, a) in &obj_row {
            match &recover[pi] {
                Recover::Free(j) => b[*j] += sign * a,
                Recover::Fixed(aff) => {
                    offset += a * aff.c0;
                    for &(q, w) in &aff.terms {
                        b[free_index(q)] += sign * a * w;
                    }
                }
            }
        }

        let block_sizes: Vec<usize> =
            prog.psd.iter().map(|(_, e)| if real { e.size } else { 2 * e.size }).collect();
        let mut constant = Vec::with_capacity(prog.psd.len());
        let mut coeffs = Vec::with_capacity(prog.psd.len());
        for (_, e) in &prog.psd {
            let n = e.size;
            let mut cst: Vec<Triplet> = Vec::new();
            if let Some(c) = &e.constant {
                for i in 0..n {
                    for j in 0..n {
                        embed(real, n, i, j, c[(i, j)], &mut cst);
                    }
                }
            }
            // A_i = -(contribution of parameter i)
            let mut per_param: BTreeMap<usize, Vec<Triplet>> = BTreeMap::new();
            expr_contrib(e, &params, &ranges, |pi, i, j, v| {
                embed(real, n, i, j, -v, per_param.entry(pi).or_default());
            });
            let mut free: BTreeMap<usize, Vec<Triplet>> = BTreeMap::new();
            for (pi, trip) in per_param {
                match &recover[pi] {
                    Recover::Free(j) => free.entry(*j).or_default().extend(trip),
                    Recover::Fixed(aff) => {
                        for &(r, c, v) in &trip {
                            cst.push((r, c, -aff.c0 * v));
                        }
                        for &(q, w) in &aff.terms {
                            free.entry(free_index(q))
                                .or_default()
                                .extend(trip.iter().map(|&(r, c, v)| (r, c, w * v)));
                        }
                    }
                }
            }
            constant.push(merge(cst));
            coeffs.push(
                free.into_iter().map(|(j, t)| (j, merge(t))).filter(|(_, t)| !t.is_empty()).collect(),
            );
        }

        Ok(Self {
            sdp: RealSdp { block_sizes, constant, coeffs, b },
            real_mode: real,
            sense: prog.sense,
            sign,
            offset,
            shapes: prog.variables.iter().map(|v| v.kind).collect(),
            params,
            recover,
        })
    }

    /// Original objective at the reduced point `z`.
    pub fn objective(&self, z: &[f64]) -> f64 {
        self.sign * self.sdp.b.iter().zip(z).map(|(b, z)| b * z).sum::<f64>() + self.offset
    }

    /// Variable values at the reduced point `z`.
    pub fn recover(&self, z: &[f64]) -> Vec<CMatrix<f64>> {
        let mut out: Vec<CMatrix<f64>> = self
            .shapes
            .iter()
            .map(|k| {
                let (r, c) = k.shape();
                CMatrix::zeros(r, c)
            })
            .collect();
        for (pi, p) in self.params.iter().enumerate() {
            let y = match &self.recover[pi] {
                Recover::Free(j) => z[*j],
                Recover::Fixed(a) => a.c0 + a.terms.iter().map(|&(q, w)| w * self.value_free(q, z)).sum::<f64>(),
            };
            if y == 0.0 {
                continue;
            }
            for (r, c, v) in p.entries() {
                out[p.var][(r, c)] += v * y;
            }
        }
        out
    }

    fn value_free(&self, q: usize, z: &[f64]) -> f64 {
        match self.recover[q] {
            Recover::Free(j) => z[j],
            Recover::Fixed(_) => unreachable!("substitutions are fully reduced"),
        }
    }

    pub fn to_dump(&self) -> ProgramDump {
        let blocks = self
            .sdp
            .block_sizes
            .iter()
            .enumerate()
            .map(|(k, &size)| BlockDump {
                size,
                constant: self.sdp.constant[k].iter().filter(|t| t.0 <= t.1).map(|&(r, c, v)| (r, c, v)).collect(),
                coefficients: self.sdp.coeffs[k]
                    .iter()
                    .flat_map(|(i, t)| t.iter().filter(|t| t.0 <= t.1).map(move |&(r, c, v)| (*i, r, c, v)))
                    .collect(),
            })
            .collect();
        ProgramDump {
            schema_version: crate::tensor::json::SCHEMA_VERSION,
            format: "real-dual-sparse".into(),
            sense: "maximize".into(),
            real_mode: self.real_mode,
            m: self.sdp.m(),
            b: self.sdp.b.clone(),
            objective_sign: self.sign,
            objective_offset: self.offset,
            blocks,
        }
    }
}

/// Serialized form of a lowered program: maximize `b'y` subject to
/// `C_j - sum_i y_i A_ij >= 0`. Only the upper triangle `r <= c` of each
/// symmetric matrix is listed; `coefficients` entries are `[i, r, c, v]`.
#[derive(Clone, Debug, Serialize)]
pub struct ProgramDump {
    pub schema_version: u32,
    pub format: String,
    pub sense: String,
    pub real_mode: bool,
    pub m: usize,
    pub b: Vec<f64>,
    /// The modelled objective equals `objective_sign * b'y + objective_offset`.
    pub objective_sign: f64,
    pub objective_offset: f64,
    pub blocks: Vec<BlockDump>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockDump {
    pub size: usize,
    pub constant: Vec<(u32, u32, f64)>,
    pub coefficients: Vec<(usize, u32, u32, f64)>,
}
