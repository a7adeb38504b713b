//! Closed-form entanglement values and analytic bounds.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::tensor::CMatrix;

/// Tridiagonal matrix with diagonal `(alpha, alpha+beta, ..., alpha+beta, beta)`
/// and superdiagonal `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalSpec<T> {
    pub alpha: T,
    pub beta: T,
    pub g: Complex<T>,
    pub d: usize,
}

impl<T: Real> TridiagonalSpec<T> {
    /// Matrix left on the qudit when the CES projector with coefficients
    /// `(a, b)` is contracted with `x = (x0, x1)` on the qubit.
    pub fn from_ces(a: Complex<T>, b: Complex<T>, x0: Complex<T>, x1: Complex<T>, d: usize) -> Self {
        Self { alpha: (a * x0).norm_sqr(), beta: (b * x1).norm_sqr(), g: a * x1 * (b * x0).conj(), d }
    }

    pub fn matrix(&self) -> CMatrix<T> {
        let d = self.d;
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            let mut v = T::zero();
            if i + 1 < d || d == 1 {
                v = v + self.alpha;
            }
            if i > 0 || d == 1 {
                v = v + self.beta;
            }
            m[(i, i)] = Complex::new(v, T::zero());
            if i + 1 < d {
                m[(i, i + 1)] = self.g;
                m[(i + 1, i)] = self.g.conj();
            }
        }
        m
    }

    /// Whether `alpha * beta = |g|^2` within 1e-10, the condition for the closed form.
    pub fn closed_form_applies(&self) -> bool {
        (self.alpha * self.beta - self.g.norm_sqr()).abs().as_f64() <= 1e-10
    }
}

/// `alpha + beta + 2|g| cos(k pi / d)` for `k = 1..d-1`, then `0`, descending.
pub fn tridiagonal_spectrum<T: Real>(spec: &TridiagonalSpec<T>) -> Result<Vec<T>> {
    if spec.d < 2 {
        return Err(Error::InvalidParameter(format!("size {} < 2", spec.d)));
    }
    if !spec.closed_form_applies() {
        return Err(Error::NotApplicable(format!(
            "alpha*beta - |g|^2 = {:e}",
            (spec.alpha * spec.beta - spec.g.norm_sqr()).as_f64()
        )));
    }
    let d = T::from_usize(spec.d);
    let two = T::one() + T::one();
    let mut out: Vec<T> = (1..spec.d)
        .map(|k| spec.alpha + spec.beta + two * spec.g.norm() * (T::from_usize(k) * T::PI() / d).cos())
        .collect();
    out.push(T::zero());
    out.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(out)
}

/// Value of a closed form together with a flag for the degenerate one-vector case.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GmValue<T> {
    pub value: T,
    /// Set for `d = 2`, where the subspace is a single vector.
    pub single_vector: bool,
}

/// GM of the two-qudit CES: `(1 - sqrt(1 - sin^2 theta sin^2(pi/d))) / 2` for
/// `d >= 3`; `min(sin^2(theta/2), cos^2(theta/2))` for `d = 2`.
pub fn gm_ces_exact<T: Real>(d: usize, theta: T) -> Result<GmValue<T>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d = {d} < 2")));
    }
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(Error::InvalidParameter(format!("theta = {} outside (0, pi)", theta)));
    }
    let two = T::one() + T::one();
    if d == 2 {
        let h = theta / two;
        let v = h.sin().powi(2).min(h.cos().powi(2));
        return Ok(GmValue { value: v, single_vector: true });
    }
    let s = theta.sin() * (T::PI() / T::from_usize(d)).sin();
    let value = (T::one() - (T::one() - s * s).sqrt()) / two;
    Ok(GmValue { value, single_vector: false })
}

/// GGM of `S^theta_{2 x d^(N-1)}`: the CES value, independent of `N`.
pub fn ggm_ges_exact<T: Real>(n_parties: usize, d: usize, theta: T) -> Result<GmValue<T>> {
    if n_parties < 2 {
        return Err(Error::InvalidParameter(format!("N = {n_parties} < 2")));
    }
    gm_ces_exact(d, theta)
}

/// Largest overlap of the CES with product vectors, `(1 + sqrt(1 - sin^2 theta sin^2(pi/d))) / 2`.
pub fn lambda_max_ces<T: Real>(d: usize, theta: T) -> T {
    let s = theta.sin() * (T::PI() / T::from_usize(d)).sin();
    (T::one() + (T::one() - s * s).sqrt()) / (T::one() + T::one())
}

/// Squared optimal coordinates entering the GM bound for `S^{pi/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GmBoundTerms<T> {
    pub w1: T,
    pub w2: T,
    pub w3: T,
}

impl<T: Scalar> GmBoundTerms<T> {
    /// `w1 = w2 = (d-1+cos(pi/d))/d`, `w3 = ((d-1)cos(pi/d)+1)/d`.
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("d = {d} < 2")));
        }
        let c = T::cos_pi_over(d as u32).ok_or_else(|| Error::Inexact(format!("cos(pi/{d})")))?;
        let df = T::from_usize(d);
        let dm1 = T::from_usize(d - 1);
        let w1 = (dm1.clone() + c.clone()) / df.clone();
        let w3 = (dm1 * c + T::one()) / df;
        Ok(Self { w1: w1.clone(), w2: w1, w3 })
    }

    /// Overlap lower bound `(w1^{N-1} + w2^{N-1} + 2 w3^{N-1}) / 4`.
    pub fn overlap(&self, n_parties: usize) -> T {
        let p = |x: &T| num_traits::pow(x.clone(), n_parties - 1);
        let four = T::from_ratio(4, 1);
        let two = T::from_ratio(2, 1);
        (p(&self.w1) + p(&self.w2) + two * p(&self.w3)) / four
    }
}

/// Upper bound on the GM of `S^{pi/2}_{2 x d^(N-1)}`:
/// `1 - [(d-1+cos(pi/d))^{N-1} + ((d-1)cos(pi/d)+1)^{N-1}] / (2 d^{N-1})`.
///
/// Exact for rationals when `d <= 3`.
#[allow(non_snake_case)]
pub fn gm_upper_bound_S<T: Scalar>(n_parties: usize, d: usize) -> Result<T> {
    if n_parties < 2 {
        return Err(Error::InvalidParameter(format!("N = {n_parties} < 2")));
    }
    Ok(T::one() - GmBoundTerms::<T>::new(d)?.overlap(n_parties))
}

/// `1 - 1/N!`.
pub fn antisym_gm<T: Scalar>(n_parties: usize) -> Result<T> {
    if n_parties < 2 {
        return Err(Error::InvalidParameter(format!("N = {n_parties} < 2")));
    }
    let fact = (1..=n_parties).fold(T::one(), |acc, k| acc * T::from_usize(k));
    Ok(T::one() - T::one() / fact)
}

/// `1 - 1/N`.
pub fn antisym_ggm<T: Scalar>(n_parties: usize) -> Result<T> {
    if n_parties < 2 {
        return Err(Error::InvalidParameter(format!("N = {n_parties} < 2")));
    }
    Ok(T::one() - T::one() / T::from_usize(n_parties))
}

/// White-noise tolerance of the subspace witness: `D eps / (D - d_G)`.
pub fn witness_threshold<T: Scalar>(total_dim: usize, dim_g: usize, epsilon: T) -> Result<T> {
    if dim_g >= total_dim {
        return Err(Error::InvalidParameter(format!("subspace dimension {dim_g} >= D = {total_dim}")));
    }
    if epsilon < T::zero() || epsilon >= T::one() {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside [0, 1)")));
    }
    Ok(T::from_usize(total_dim) * epsilon / T::from_usize(total_dim - dim_g))
}

/// Closed form of the GME threshold for `S^{pi/2}_{2 x d^2}`:
/// `2 d^2 sin^2(pi/2d) / (d^2 + 2d - 1)`.
pub fn s_witness_threshold_closed<T: Real>(d: usize) -> T {
    let df = T::from_usize(d);
    let s = (T::PI() / (T::from_usize(2) * df)).sin();
    T::from_usize(2) * df * df * s * s / (df * df + T::from_usize(2) * df - T::one())
}

/// One row of the GM-versus-theta data: `(theta, d, E_GM)`.
pub fn figure1_rows(ds: &[usize], steps: usize) -> Result<Vec<(f64, usize, f64)>> {
    if steps < 2 {
        return Err(Error::InvalidParameter("need at least two grid points".into()));
    }
    let mut out = Vec::new();
    for &d in ds {
        for k in 1..steps {
            let theta = std::f64::consts::PI * k as f64 / steps as f64;
            out.push((theta, d, gm_ces_exact(d, theta)?.value));
        }
    }
    Ok(out)
}
