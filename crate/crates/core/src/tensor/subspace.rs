use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::{inner, norm_sqr, CMatrix};
use super::op::HermitianOp;
use super::space::HilbertSpace;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default relative rank threshold for [`Subspace::from_span`].
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Subspace of a multipartite space held as an orthonormal basis.
///
/// The projector `B B^dagger` is built on first use.
#[derive(Clone, Debug)]
pub struct Subspace<T> {
    space: HilbertSpace,
    basis: CMatrix<T>,
    label: String,
    raw: Vec<Vec<Complex<T>>>,
    projector: OnceLock<HermitianOp<T>>,
}

impl<T: Real> Subspace<T> {
    /// Wraps columns that are already orthonormal (checked to 1e-10).
    pub fn from_orthonormal(space: HilbertSpace, basis: CMatrix<T>, label: impl Into<String>) -> Result<Self> {
        if basis.rows() != space.total() {
            return Err(Error::DimensionMismatch { expected: space.total(), found: basis.rows() });
        }
        let gram = basis.adjoint().matmul(&basis);
        let err = (&gram - &CMatrix::identity(basis.cols())).max_abs();
        if err > 1e-10 {
            return Err(Error::NotOrthonormal(err));
        }
        Ok(Self { space, basis, label: label.into(), raw: Vec::new(), projector: OnceLock::new() })
    }

    /// Orthonormal basis for the span of arbitrary vectors.
    ///
    /// Modified Gram-Schmidt with column pivoting and one reorthogonalization
    /// pass. Pivots whose residual norm falls below `tol` times the first pivot
    /// norm are treated as dependent, so `dim()` is the numerical rank.
    pub fn from_span(
        space: HilbertSpace,
        vectors: &[Vec<Complex<T>>],
        tol: T,
        label: impl Into<String>,
    ) -> Result<Self> {
        let d = space.total();
        if vectors.is_empty() {
            return Err(Error::InvalidParameter("empty spanning set".into()));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: v.len() });
            }
            if norm_sqr(v) == T::zero() {
                return Err(Error::ZeroVector(i));
            }
        }
        let mut work: Vec<Vec<Complex<T>>> = vectors.to_vec();
        let mut alive: Vec<usize> = (0..work.len()).collect();
        let mut q: Vec<Vec<Complex<T>>> = Vec::new();
        let mut first = None;
        while !alive.is_empty() {
            let (pos, norm) = alive
                .iter()
                .enumerate()
                .map(|(pos, &j)| (pos, norm_sqr(&work[j]).sqrt()))
                .fold((0, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            let r00 = *first.get_or_insert(norm);
            if norm <= tol * r00 {
                break;
            }
            let j = alive.remove(pos);
            let mut v = std::mem::take(&mut work[j]);
            for qi in &q {
                let c = inner(qi, &v);
                for (x, y) in v.iter_mut().zip(qi) {
                    *x = *x - *y * c;
                }
            }
            let n = norm_sqr(&v).sqrt();
            for x in v.iter_mut() {
                *x = x.unscale(n);
            }
            for &k in &alive {
                let c = inner(&v, &work[k]);
                for (x, y) in work[k].iter_mut().zip(&v) {
                    *x = *x - *y * c;
                }
            }
            q.push(v);
        }
        let basis = CMatrix::from_columns(d, &q);
        Ok(Self {
            space,
            basis,
            label: label.into(),
            raw: vectors.to_vec(),
            projector: OnceLock::new(),
        })
    }

    pub fn with_raw(mut self, raw: Vec<Vec<Complex<T>>>) -> Self {
        self.raw = raw;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Spanning vectors as given before orthonormalization (may be empty).
    pub fn raw(&self) -> &[Vec<Complex<T>>] {
        &self.raw
    }

    /// Basis vector `j`.
    pub fn vector(&self, j: usize) -> Vec<Complex<T>> {
        self.basis.column(j)
    }

    pub fn projector(&self) -> &HermitianOp<T> {
        self.projector.get_or_init(|| {
            let p = self.basis.matmul(&self.basis.adjoint()).hermitian_part();
            HermitianOp::new(self.space.clone(), p).expect("B B^dagger is Hermitian")
        })
    }

    /// `I - P`.
    pub fn complement_projector(&self) -> HermitianOp<T> {
        self.projector().complement()
    }

    /// Squared norm of the component of `v` inside the subspace, `||B^dagger v||^2`.
    pub fn overlap(&self, v: &[Complex<T>]) -> T {
        let m = self.dim();
        let d = self.space.total();
        let mut total = T::zero();
        for j in 0..m {
            let mut c = Complex::<T>::zero();
            for i in 0..d {
                c = c + self.basis[(i, j)].conj() * v[i];
            }
            total = total + c.norm_sqr();
        }
        total
    }

    /// `||P v - v||`.
    pub fn residual(&self, v: &[Complex<T>]) -> T {
        let coeffs: Vec<Complex<T>> = (0..self.dim())
            .map(|j| (0..v.len()).fold(Complex::zero(), |acc, i| acc + self.basis[(i, j)].conj() * v[i]))
            .collect();
        let pv = self.basis.matvec(&coeffs);
        pv.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + (*a - *b).norm_sqr()).sqrt()
    }

    /// Largest entry of `|P - Q|` against another subspace on the same space.
    pub fn projector_distance(&self, other: &Self) -> f64 {
        (self.projector().matrix() - other.projector().matrix()).max_abs()
    }
}
