use num_complex::Complex;
use num_traits::Zero;

use super::linalg::{eigvalsh, is_psd_exact, top_eigenpair};
use super::matrix::CMatrix;
use super::space::{Bipartition, HilbertSpace};
use super::state::PureState;
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Relative Hermiticity residual accepted (and then symmetrized away) for floats.
const HERMITIAN_TOL: f64 = 1e-9;

/// Hermitian operator on a multipartite space.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOp<T> {
    space: HilbertSpace,
    matrix: CMatrix<T>,
}

impl<T: Scalar> HermitianOp<T> {
    /// Validates shape and Hermiticity. Floating inputs are symmetrized; exact
    /// inputs must be Hermitian exactly.
    pub fn new(space: HilbertSpace, matrix: CMatrix<T>) -> Result<Self> {
        let d = space.total();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: matrix.rows() });
        }
        let residual = matrix.hermitian_residual();
        let tol = if T::EXACT { 0.0 } else { HERMITIAN_TOL * matrix.max_abs().max(1.0) };
        if residual > tol {
            return Err(Error::NotHermitian { residual });
        }
        let matrix = if T::EXACT || residual == 0.0 { matrix } else { matrix.hermitian_part() };
        Ok(Self { space, matrix })
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.total();
        Self { space, matrix: CMatrix::identity(d) }
    }

    /// `|v><v|`.
    pub fn outer(v: &PureState<T>) -> Self {
        let a = v.amplitudes();
        Self {
            space: v.space().clone(),
            matrix: super::matrix::outer(a, a),
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// `tr(self * other)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &Self) -> T {
        self.matrix.trace_product(&other.matrix).re
    }

    pub fn expectation(&self, v: &[Complex<T>]) -> T {
        let av = self.matrix.matvec(v);
        super::matrix::inner(v, &av).re
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { space: self.space.tensor(&other.space), matrix: self.matrix.kron(&other.matrix) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix - &other.matrix })
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.scale_real(s) }
    }

    /// `I - self`.
    pub fn complement(&self) -> Self {
        Self { space: self.space.clone(), matrix: &CMatrix::identity(self.dim()) - &self.matrix }
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    /// Transpose on the parties of `K`.
    pub fn partial_transpose(&self, cut: &Bipartition) -> Result<Self> {
        cut.check_space(&self.space)?;
        Ok(self.partial_transpose_parties(&cut.k_parties()))
    }

    /// Transpose on an arbitrary list of parties.
    pub fn partial_transpose_parties(&self, parties: &[usize]) -> Self {
        let d = self.dim();
        let off = self.space.partial_offsets(parties);
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let r = i - off[i] + off[j];
                let c = j - off[j] + off[i];
                out[(r, c)] = self.matrix[(i, j)].clone();
            }
        }
        Self { space: self.space.clone(), matrix: out }
    }

    pub fn transpose(&self) -> Self {
        Self { space: self.space.clone(), matrix: self.matrix.transpose() }
    }

    /// `<x| self |x>` with `x` living on `K-bar`: the `dim(K) x dim(K)` matrix
    /// obtained by contracting the `K-bar` factor.
    pub fn project_onto_subsystem(&self, cut: &Bipartition, x: &PureState<T>) -> Result<Self> {
        cut.check_space(&self.space)?;
        let keep = cut.k_parties();
        let rest = cut.kbar_parties();
        let rest_space = self.space.subspace_of(&rest);
        if x.space() != &rest_space {
            return Err(Error::DimensionMismatch {
                expected: rest_space.total(),
                found: x.space().total(),
            });
        }
        let matrix = contract(&self.matrix, &self.space, &keep, x.amplitudes());
        Ok(Self { space: self.space.subspace_of(&keep), matrix })
    }

    /// Exact positivity test (exact for rational entries).
    pub fn is_psd_exact(&self) -> bool {
        is_psd_exact(&self.matrix)
    }
}

impl<T: Real> HermitianOp<T> {
    pub fn eigenvalues(&self) -> Vec<T> {
        eigvalsh(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    /// Largest eigenvalue with a canonical eigenvector.
    pub fn top_eigenpair(&self) -> (T, PureState<T>) {
        let (l, v) = top_eigenpair(&self.matrix);
        (l, PureState::new(self.space.clone(), v).expect("length matches"))
    }
}

/// Contracts `m` (on `space`) with the vector `x` on the complement of `keep`,
/// leaving a matrix on the `keep` parties (ascending order):
/// `M[a, b] = sum_{r,s} conj(x_r) m[(a,r),(b,s)] x_s`.
pub fn contract<T: Scalar>(
    m: &CMatrix<T>,
    space: &HilbertSpace,
    keep: &[usize],
    x: &[Complex<T>],
) -> CMatrix<T> {
    let rest: Vec<usize> = (0..space.n_parties()).filter(|p| !keep.contains(p)).collect();
    let kdim = space.subspace_of(keep).total();
    let ki = space.projected_indices(keep);
    let ri = space.projected_indices(&rest);
    assert_eq!(x.len(), space.subspace_of(&rest).total(), "contraction vector length");
    let d = space.total();
    let xc: Vec<Complex<T>> = x.iter().map(|z| z.conj()).collect();
    let mut out = CMatrix::zeros(kdim, kdim);
    for i in 0..d {
        let left = &xc[ri[i]];
        if left.is_zero() {
            continue;
        }
        let row = m.row(i);
        for j in 0..d {
            let v = &row[j];
            if v.is_zero() {
                continue;
            }
            let w = left.clone() * v.clone() * x[ri[j]].clone();
            out[(ki[i], ki[j])] = out[(ki[i], ki[j])].clone() + w;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::eigvalsh;

    fn ghz3() -> PureState<f64> {
        let h = HilbertSpace::uniform(3, 2).unwrap();
        PureState::basis(h.clone(), &[0, 0, 0])
            .add_scaled(&Complex::new(1.0, 0.0), &PureState::basis(h, &[1, 1, 1]))
            .unwrap()
            .normalized()
            .unwrap()
    }

    #[test]
    fn ghz_partial_transpose_has_negative_half() {
        let rho = HermitianOp::outer(&ghz3());
        let cut = Bipartition::new(3, &[0]).unwrap();
        let ev = eigvalsh(rho.partial_transpose(&cut).unwrap().matrix());
        assert!((ev[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn product_state_stays_ppt() {
        let a = HilbertSpace::new(vec![2]).unwrap();
        let b = HilbertSpace::new(vec![3]).unwrap();
        let ra = HermitianOp::new(
            a,
            CMatrix::from_vec(2, 2, vec![
                Complex::new(0.6, 0.0),
                Complex::new(0.1, 0.2),
                Complex::new(0.1, -0.2),
                Complex::new(0.4, 0.0),
            ]),
        )
        .unwrap();
        let rb = HermitianOp::<f64>::identity(b).scale(&(1.0 / 3.0));
        let rho = ra.kron(&rb);
        let cut = Bipartition::new(2, &[0]).unwrap();
        let pt = rho.partial_transpose(&cut).unwrap();
        assert_eq!(pt, ra.transpose().kron(&rb));
        assert!(pt.min_eigenvalue() > 0.0);
    }

    #[test]
    fn identity_contracts_to_identity() {
        let h = HilbertSpace::new(vec![2, 3]).unwrap();
        let id = HermitianOp::<f64>::identity(h);
        let cut = Bipartition::new(2, &[0]).unwrap();
        let x = PureState::new(
            HilbertSpace::new(vec![3]).unwrap(),
            vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8), Complex::new(0.0, 0.0)],
        )
        .unwrap();
        let m = id.project_onto_subsystem(&cut, &x).unwrap();
        assert!((m.matrix() - &CMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn direct_readout_contraction() {
        let h = HilbertSpace::new(vec![2, 2]).unwrap();
        let mut p = CMatrix::<f64>::zeros(4, 4);
        p[(0, 0)] = Complex::new(1.0, 0.0);
        p[(3, 3)] = Complex::new(1.0, 0.0);
        let p = HermitianOp::new(h, p).unwrap();
        let cut = Bipartition::new(2, &[0]).unwrap();
        let x = PureState::basis(HilbertSpace::new(vec![2]).unwrap(), &[0]);
        let m = p.project_onto_subsystem(&cut, &x).unwrap();
        assert_eq!(m.matrix()[(0, 0)], Complex::new(1.0, 0.0));
        assert_eq!(m.matrix()[(1, 1)], Complex::new(0.0, 0.0));
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = HilbertSpace::new(vec![2]).unwrap();
        let m = CMatrix::from_vec(2, 2, vec![
            Complex::new(1.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        ]);
        assert!(matches!(HermitianOp::new(h, m), Err(Error::NotHermitian { .. })));
    }
}
