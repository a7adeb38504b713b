//! Conic programs over complex Hermitian and general matrix variables.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::tensor::{CMatrix, HilbertSpace};

pub type C64 = Complex<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Hermitian(usize),
    General(usize, usize),
}

impl VarKind {
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            VarKind::Hermitian(n) => (n, n),
            VarKind::General(r, c) => (r, c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Linear map applied to a variable inside a matrix expression.
#[derive(Clone, Debug)]
pub enum LinearMap {
    Identity,
    /// Partial transpose; `offsets[i]` is the contribution of the transposed
    /// parties to the flat index `i`.
    PartialTranspose(Arc<Vec<usize>>),
    /// Places `c V` at `(row, col)` and `conj(c) V^dagger` at `(col, row)`.
    /// With `row == col` only `c V` is placed.
    Place { row: usize, col: usize },
}

impl LinearMap {
    pub fn partial_transpose(space: &HilbertSpace, parties: &[usize]) -> Self {
        LinearMap::PartialTranspose(Arc::new(space.partial_offsets(parties)))
    }

    /// Images of the entry `(r, c)` of the variable, with their weights.
    pub(crate) fn images(&self, r: usize, c: usize, coeff: C64, out: &mut Vec<(usize, usize, C64)>) {
        match self {
            LinearMap::Identity => out.push((r, c, coeff)),
            LinearMap::PartialTranspose(off) => {
                out.push((r - off[r] + off[c], c - off[c] + off[r], coeff));
            }
            LinearMap::Place { row, col } => {
                out.push((row + r, col + c, coeff));
                if row != col {
                    out.push((col + c, row + r, coeff.conj()));
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub var: VarId,
    pub coeff: C64,
    pub map: LinearMap,
}

/// `constant + sum_t coeff_t map_t(V_t)`, a square Hermitian-valued expression.
#[derive(Clone, Debug)]
pub struct MatExpr {
    pub size: usize,
    pub constant: Option<CMatrix<f64>>,
    pub terms: Vec<Term>,
}

impl MatExpr {
    pub fn new(size: usize) -> Self {
        Self { size, constant: None, terms: Vec::new() }
    }

    pub fn var(v: VarId, size: usize) -> Self {
        Self::new(size).plus(v, 1.0, LinearMap::Identity)
    }

    pub fn with_constant(mut self, c: CMatrix<f64>) -> Self {
        self.constant = Some(c);
        self
    }

    pub fn plus(mut self, var: VarId, coeff: impl Into<C64>, map: LinearMap) -> Self {
        self.terms.push(Term { var, coeff: coeff.into(), map });
        self
    }

    pub fn evaluate(&self, values: &[CMatrix<f64>]) -> CMatrix<f64> {
        let mut out = self.constant.clone().unwrap_or_else(|| CMatrix::zeros(self.size, self.size));
        let mut buf = Vec::new();
        for t in &self.terms {
            let v = &values[t.var.0];
            for r in 0..v.rows() {
                for c in 0..v.cols() {
                    let x = v[(r, c)];
                    if x.is_zero() {
                        continue;
                    }
                    buf.clear();
                    t.map.images(r, c, t.coeff, &mut buf);
                    for (k, &(i, j, w)) in buf.iter().enumerate() {
                        let val = if k == 0 { w * x } else { w * x.conj() };
                        out[(i, j)] += val;
                    }
                }
            }
        }
        out
    }
}

/// `constant + sum_t Re tr(C_t V_t)`.
#[derive(Clone, Debug, Default)]
pub struct LinearForm {
    pub terms: Vec<(VarId, CMatrix<f64>)>,
    pub constant: f64,
}

impl LinearForm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn plus(mut self, var: VarId, c: CMatrix<f64>) -> Self {
        self.terms.push((var, c));
        self
    }

    pub fn evaluate(&self, values: &[CMatrix<f64>]) -> f64 {
        self.constant + self.terms.iter().map(|(v, c)| c.trace_product(&values[v.0]).re).sum::<f64>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Clone, Debug)]
pub struct ConicProgram {
    pub variables: Vec<Variable>,
    pub sense: Sense,
    pub objective: LinearForm,
    /// `expr >= 0`.
    pub psd: Vec<(String, MatExpr)>,
    /// `form = rhs`.
    pub equalities: Vec<(LinearForm, f64)>,
    /// `expr = 0` entrywise.
    pub matrix_equalities: Vec<(String, MatExpr)>,
}

impl ConicProgram {
    pub fn new(sense: Sense) -> Self {
        Self {
            variables: Vec::new(),
            sense,
            objective: LinearForm::new(),
            psd: Vec::new(),
            equalities: Vec::new(),
            matrix_equalities: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind) -> VarId {
        self.variables.push(Variable { name: name.into(), kind });
        VarId(self.variables.len() - 1)
    }

    pub fn kind(&self, v: VarId) -> VarKind {
        self.variables[v.0].kind
    }

    pub fn set_objective(&mut self, f: LinearForm) {
        self.objective = f;
    }

    pub fn add_psd(&mut self, name: impl Into<String>, e: MatExpr) {
        self.psd.push((name.into(), e));
    }

    pub fn add_equality(&mut self, f: LinearForm, rhs: f64) {
        self.equalities.push((f, rhs));
    }

    pub fn add_matrix_equality(&mut self, name: impl Into<String>, e: MatExpr) {
        self.matrix_equalities.push((name.into(), e));
    }

    /// `0 <= V <= I` for a Hermitian variable.
    pub fn add_box(&mut self, v: VarId) {
        let n = self.kind(v).shape().0;
        let name = self.variables[v.0].name.clone();
        self.add_psd(format!("{name} >= 0"), MatExpr::var(v, n));
        self.add_psd(
            format!("I - {name} >= 0"),
            MatExpr::new(n).with_constant(CMatrix::identity(n)).plus(v, -1.0, LinearMap::Identity),
        );
    }

    /// `tr V = t`.
    pub fn add_trace_equality(&mut self, vars: &[VarId], t: f64) {
        let mut f = LinearForm::new();
        for &v in vars {
            f = f.plus(v, CMatrix::identity(self.kind(v).shape().0));
        }
        self.add_equality(f, t);
    }

    /// Checks that every expression refers to existing variables with
    /// compatible shapes.
    pub fn validate(&self) -> Result<()> {
        let check_expr = |name: &str, e: &MatExpr| -> Result<()> {
            if let Some(c) = &e.constant {
                if c.rows() != e.size || c.cols() != e.size {
                    return Err(Error::DimensionMismatch { expected: e.size, found: c.rows() });
                }
            }
            for t in &e.terms {
                let kind = self
                    .variables
                    .get(t.var.0)
                    .ok_or_else(|| Error::InvalidParameter(format!("{name}: unknown variable {}", t.var.0)))?
                    .kind;
                let (r, c) = kind.shape();
                let fits = match &t.map {
                    LinearMap::Identity | LinearMap::PartialTranspose(_) => r == e.size && c == e.size,
                    LinearMap::Place { row, col } => {
                        row + r <= e.size && col + c <= e.size && (row != col || r == c)
                    }
                };
                if !fits {
                    return Err(Error::InvalidParameter(format!("{name}: variable of shape {r}x{c} does not fit")));
                }
            }
            Ok(())
        };
        for (name, e) in self.psd.iter().chain(&self.matrix_equalities) {
            check_expr(name, e)?;
        }
        for (v, c) in self.objective.terms.iter().chain(self.equalities.iter().flat_map(|(f, _)| f.terms.iter())) {
            let (r, cc) = self.kind(*v).shape();
            if c.rows() != cc || c.cols() != r {
                return Err(Error::DimensionMismatch { expected: cc, found: c.rows() });
            }
        }
        Ok(())
    }

    /// True when every constant and coefficient is real, so that the optimum
    /// is attained at real variables.
    pub fn is_real(&self) -> bool {
        let real_mat = |m: &CMatrix<f64>| m.data().iter().all(|z| z.im == 0.0);
        let real_expr = |e: &MatExpr| {
            e.constant.as_ref().is_none_or(real_mat) && e.terms.iter().all(|t| t.coeff.im == 0.0)
        };
        self.psd.iter().chain(&self.matrix_equalities).all(|(_, e)| real_expr(e))
            && self.objective.terms.iter().all(|(_, c)| real_mat(c))
            && self.equalities.iter().all(|(f, _)| f.terms.iter().all(|(_, c)| real_mat(c)))
    }
}
