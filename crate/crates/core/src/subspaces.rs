//! Constructors for the subspace families studied here.
//!
//! Every builder returns a [`Subspace`] whose basis is orthonormal. Families
//! whose natural spanning set is not orthogonal (Q1, Q2) keep that raw set too.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{One, Zero};
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::tensor::{outer, Bipartition, CMatrix, HermitianOp, HilbertSpace, Subspace};

/// Parameters of the two-level family `S^theta_{2 x d^(N-1)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GesParams {
    pub n_parties: usize,
    pub d: usize,
    pub theta: f64,
    pub xi: f64,
}

impl GesParams {
    pub fn new(n_parties: usize, d: usize, theta: f64) -> Self {
        Self { n_parties, d, theta, xi: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_parties < 2 {
            return Err(Error::InvalidParameter(format!("N = {} < 2", self.n_parties)));
        }
        if self.d < 2 {
            return Err(Error::InvalidParameter(format!("d = {} < 2", self.d)));
        }
        if !(self.theta > 0.0 && self.theta < std::f64::consts::PI) {
            return Err(Error::InvalidParameter(format!("theta = {} outside (0, pi)", self.theta)));
        }
        if !(0.0..2.0 * std::f64::consts::PI).contains(&self.xi) {
            return Err(Error::InvalidParameter(format!("xi = {} outside [0, 2pi)", self.xi)));
        }
        Ok(())
    }

    /// `(a, b) = (cos(theta/2), e^{i xi} sin(theta/2))`.
    pub fn coefficients<T: Real>(&self) -> (Complex<T>, Complex<T>) {
        let h = self.theta / 2.0;
        let a = Complex::new(T::of_f64(h.cos()), T::zero());
        let b = Complex::from_polar(T::of_f64(h.sin()), T::of_f64(self.xi));
        (a, b)
    }
}

/// `p_1 = sum_{m=0}^{N-2} d^m`; the exponent offsets of the Q1 product family
/// are `p_i = i p_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Q1IndexScheme {
    pub n_parties: usize,
    pub d: usize,
    pub p1: usize,
}

impl Q1IndexScheme {
    pub fn new(n_parties: usize, d: usize) -> Self {
        let p1 = (0..n_parties - 1).map(|m| d.pow(m as u32)).sum();
        Self { n_parties, d, p1 }
    }

    pub fn p(&self, i: usize) -> usize {
        i * self.p1
    }

    /// Dimension of the `A_2 ... A_N` block, `d^(N-1)`.
    pub fn rest_dim(&self) -> usize {
        self.d.pow(self.n_parties as u32 - 1)
    }
}

fn basis_vec<T: Scalar>(dim: usize, entries: &[(usize, Complex<T>)]) -> Vec<Complex<T>> {
    let mut v = vec![Complex::zero(); dim];
    for (i, c) in entries {
        v[*i] = v[*i].clone() + c.clone();
    }
    v
}

fn real<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Completely entangled subspace of `C^2 x C^d`: span of `a|0,i> + b|1,i+1>`.
pub fn ces_2xd<T: Real>(d: usize, theta: f64, xi: f64) -> Result<Subspace<T>> {
    let p = GesParams { n_parties: 2, d, theta, xi };
    p.validate()?;
    ges_2xd_pow(&p).map(|s| s.with_label("CES"))
}

/// `S^theta_{2 x d^(N-1)}`: span of `a|0>|i_2..i_N> + b|1>|i_2+1..i_N+1>` with
/// every `i_m` in `0..d-1`.
pub fn ges_2xd_pow<T: Real>(params: &GesParams) -> Result<Subspace<T>> {
    params.validate()?;
    let (n, d) = (params.n_parties, params.d);
    let mut dims = vec![2];
    dims.extend(std::iter::repeat_n(d, n - 1));
    let space = HilbertSpace::new(dims)?;
    let (a, b) = params.coefficients::<T>();
    let rest = HilbertSpace::uniform(n - 1, d)?;
    let small = HilbertSpace::uniform(n - 1, d - 1)?;
    let cols: Vec<Vec<Complex<T>>> = (0..small.total())
        .map(|j| {
            let digits = small.digits(j);
            let shifted: Vec<usize> = digits.iter().map(|i| i + 1).collect();
            let lo = rest.index(&digits);
            let hi = rest.total() + rest.index(&shifted);
            basis_vec(space.total(), &[(lo, a), (hi, b)])
        })
        .collect();
    let basis = CMatrix::from_columns(space.total(), &cols);
    Subspace::from_orthonormal(space, basis, "S")
}

/// Projector onto `S^{pi/2}` in exact arithmetic, from the unnormalized
/// orthogonal vectors `|0>|i..> + |1>|i+1..>`.
pub fn ges_projector_exact<T: Scalar>(n_parties: usize, d: usize) -> Result<HermitianOp<T>> {
    if n_parties < 2 || d < 2 {
        return Err(Error::InvalidParameter(format!("N = {n_parties}, d = {d}")));
    }
    let mut dims = vec![2];
    dims.extend(std::iter::repeat_n(d, n_parties - 1));
    let space = HilbertSpace::new(dims)?;
    let rest = HilbertSpace::uniform(n_parties - 1, d)?;
    let small = HilbertSpace::uniform(n_parties - 1, d - 1)?;
    let vectors: Vec<Vec<Complex<T>>> = (0..small.total())
        .map(|j| {
            let digits = small.digits(j);
            let shifted: Vec<usize> = digits.iter().map(|i| i + 1).collect();
            basis_vec(
                space.total(),
                &[
                    (rest.index(&digits), Complex::one()),
                    (rest.total() + rest.index(&shifted), Complex::one()),
                ],
            )
        })
        .collect();
    projector_from_orthogonal(space, &vectors)
}

/// `sum_k v_k v_k^dagger / <v_k|v_k>` for mutually orthogonal vectors; exact for
/// exact scalars.
pub fn projector_from_orthogonal<T: Scalar>(
    space: HilbertSpace,
    vectors: &[Vec<Complex<T>>],
) -> Result<HermitianOp<T>> {
    let d = space.total();
    let mut p = CMatrix::zeros(d, d);
    for (i, v) in vectors.iter().enumerate() {
        let nrm = crate::tensor::norm_sqr(v);
        if crate::scalar::is_negligible(&nrm) {
            return Err(Error::ZeroVector(i));
        }
        for w in &vectors[..i] {
            let ip = crate::tensor::inner(w, v);
            if !crate::scalar::is_negligible(&ip.re) || !crate::scalar::is_negligible(&ip.im) {
                return Err(Error::NotOrthonormal(ip.norm_sqr().as_f64().sqrt()));
            }
        }
        p = &p + &outer(v, v).scale_real(&(T::one() / nrm));
    }
    HermitianOp::new(space, p)
}

/// Orthonormal basis of the differences `gamma_{k-1} - gamma_k` of orthonormal
/// vectors: `phi_m = (sum_{i<m} gamma_i - m gamma_m) / sqrt(m(m+1))`, `m = 1..S`.
pub fn q1_cyclic_orthonormalize<T: Real>(gammas: &[Vec<Complex<T>>]) -> Result<Vec<Vec<Complex<T>>>> {
    for (i, g) in gammas.iter().enumerate() {
        for (j, h) in gammas.iter().enumerate().take(i + 1) {
            let ip = crate::tensor::inner(h, g);
            let want = if i == j { T::one() } else { T::zero() };
            let err = (ip - real(want)).norm().as_f64();
            if err > 1e-12 {
                return Err(Error::NotOrthonormal(err));
            }
        }
    }
    let dim = gammas.first().map_or(0, |g| g.len());
    let mut out = Vec::with_capacity(gammas.len().saturating_sub(1));
    let mut prefix = vec![Complex::<T>::zero(); dim];
    for (m, g) in gammas.iter().enumerate() {
        if m > 0 {
            let mf = T::from_usize(m);
            let scale = (mf * (mf + T::one())).sqrt();
            let phi: Vec<Complex<T>> =
                prefix.iter().zip(g).map(|(p, x)| (*p - x.scale(mf)).unscale(scale)).collect();
            out.push(phi);
        }
        for (p, x) in prefix.iter_mut().zip(g) {
            *p = *p + *x;
        }
    }
    Ok(out)
}

/// Chains of the Q1 basis: each chain lists the flat indices `|i>|e - p_i>` that
/// share the monomial exponent `e`. Consecutive differences span the subspace.
pub fn q1_chains(scheme: &Q1IndexScheme) -> Vec<Vec<usize>> {
    let rest = scheme.rest_dim();
    let max_e = scheme.p(scheme.d - 1) + rest - 1;
    (0..=max_e)
        .map(|e| {
            (0..scheme.d)
                .filter(|&i| e >= scheme.p(i) && e - scheme.p(i) < rest)
                .map(|i| i * rest + e - scheme.p(i))
                .collect::<Vec<_>>()
        })
        .filter(|c| c.len() >= 2)
        .collect()
}

/// The unnormalized spanning vectors of Q1 in their listed order: three
/// families of `|i>|u> - |i+1>|w>` differences.
pub fn q1_raw_vectors<T: Scalar>(scheme: &Q1IndexScheme) -> Vec<Vec<Complex<T>>> {
    let d = scheme.d;
    let rest = scheme.rest_dim();
    let dim = d * rest;
    let pair = |i: usize, u: usize, w: usize| {
        basis_vec(dim, &[(i * rest + u, Complex::one()), ((i + 1) * rest + w, -Complex::<T>::one())])
    };
    let mut out = Vec::new();
    for k in 0..scheme.p1 {
        for m in 1..d.saturating_sub(1) {
            for i in 0..m {
                out.push(pair(i, scheme.p(m - i) + k, scheme.p(m - i - 1) + k));
            }
        }
    }
    for i in 0..d - 1 {
        out.push(pair(i, scheme.p(d - i - 1), scheme.p(d - i - 2)));
    }
    if d >= 3 {
        for k in 0..scheme.p1 {
            for m in d - 1..=2 * (d - 2) {
                for i in m - (d - 2)..=d - 2 {
                    out.push(pair(i, scheme.p(m - i) + k + 1, scheme.p(m - i - 1) + k + 1));
                }
            }
        }
    }
    out
}

/// Q1 of `(C^d)^{x N}`: orthogonal complement of the product family
/// `(1, a^{p_1}, ..., a^{(d-1)p_1}) x (1, a, ..., a^{d^{N-1}-1})`.
pub fn q1_subspace<T: Real>(n_parties: usize, d: usize) -> Result<Subspace<T>> {
    if n_parties < 2 || d < 2 {
        return Err(Error::InvalidParameter(format!("Q1 needs N >= 2, d >= 2 (got {n_parties}, {d})")));
    }
    let scheme = Q1IndexScheme::new(n_parties, d);
    let space = HilbertSpace::uniform(n_parties, d)?;
    let dim = space.total();
    let mut cols = Vec::new();
    for chain in q1_chains(&scheme) {
        let gammas: Vec<Vec<Complex<T>>> =
            chain.iter().map(|&j| basis_vec(dim, &[(j, Complex::one())])).collect();
        cols.extend(q1_cyclic_orthonormalize(&gammas)?);
    }
    let basis = CMatrix::from_columns(dim, &cols);
    Ok(Subspace::from_orthonormal(space, basis, "Q1")?.with_raw(q1_raw_vectors(&scheme)))
}

/// A product family `(poly_0(a), ..., poly_{d-1}(a)) x (1, a, ..., a^{R-1})` whose
/// first-factor entries are sums of monomials `a^e`, `e` in `exponents[k]`.
#[derive(Clone, Debug)]
pub struct MonomialFamily {
    pub exponents: Vec<Vec<usize>>,
    pub rest_dim: usize,
}

impl MonomialFamily {
    /// The Q1 family: `poly_i = a^{i p_1}`.
    pub fn q1(n_parties: usize, d: usize) -> Self {
        let s = Q1IndexScheme::new(n_parties, d);
        Self { exponents: (0..d).map(|i| vec![s.p(i)]).collect(), rest_dim: s.rest_dim() }
    }

    /// The Q2 family: `poly_0 = 1`, `poly_k = sum_{f=2}^N a^{k d^{N-f}}`.
    pub fn q2(n_parties: usize, d: usize) -> Self {
        let rest_dim = d.pow(n_parties as u32 - 1);
        let exponents = (0..d)
            .map(|k| {
                if k == 0 {
                    vec![0]
                } else {
                    (2..=n_parties).map(|f| k * d.pow((n_parties - f) as u32)).collect()
                }
            })
            .collect();
        Self { exponents, rest_dim }
    }

    /// The family behind the `C^d x C^2 x C^d` subspace of the equivalence check: `poly_i = a^{i (d^{N-1} - d + 1)}`.
    pub fn upb(n_parties: usize, d: usize) -> Self {
        let rest_dim = d.pow(n_parties as u32 - 1);
        let dt = rest_dim - d + 1;
        Self { exponents: (0..d).map(|i| vec![i * dt]).collect(), rest_dim }
    }

    pub fn total_dim(&self) -> usize {
        self.exponents.len() * self.rest_dim
    }

    /// Member of the family at `alpha`.
    pub fn vector<T: Real>(&self, alpha: Complex<T>) -> Vec<Complex<T>> {
        let mut out = Vec::with_capacity(self.total_dim());
        for exps in &self.exponents {
            let poly = exps.iter().fold(Complex::<T>::zero(), |acc, &e| acc + alpha.powu(e as u32));
            for m in 0..self.rest_dim {
                out.push(poly * alpha.powu(m as u32));
            }
        }
        out
    }

    /// Exact null space of the monomial coefficient matrix.
    ///
    /// Pivots are taken greedily left to right in flat-index order; each free
    /// column `f` yields the vector with `-1` at `f` and the pivot solution on
    /// the pivot columns.
    pub fn complement_vectors(&self) -> Vec<Vec<BigRational>> {
        let cols = self.total_dim();
        let max_e = self.exponents.iter().flatten().max().copied().unwrap_or(0) + self.rest_dim;
        let mut rows = vec![vec![BigRational::zero(); cols]; max_e];
        for (k, exps) in self.exponents.iter().enumerate() {
            for &e in exps {
                for m in 0..self.rest_dim {
                    rows[e + m][k * self.rest_dim + m] += BigRational::one();
                }
            }
        }
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
            rows.swap(r, p);
            let inv = BigRational::one() / rows[r][c].clone();
            for x in rows[r].iter_mut() {
                *x = &*x * &inv;
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && !row[c].is_zero() {
                    let f = row[c].clone();
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); cols];
                v[f] = -BigRational::one();
                for (ri, &pc) in pivots.iter().enumerate() {
                    v[pc] = rows[ri][f].clone();
                }
                v
            })
            .collect()
    }
}

fn rational_to_complex<T: Scalar>(v: &[BigRational]) -> Vec<Complex<T>> {
    v.iter().map(|q| real(T::of_f64(q.as_f64()))).collect()
}

/// The closed-formula Q2 spanning vector for `(k, m)`, or `None` when one of its kets
/// falls outside `A_2 ... A_N` (which happens for `d >= 3` at large `m`).
pub fn q2_formula_vector(n_parties: usize, d: usize, k: usize, m: usize) -> Option<Vec<i64>> {
    let rest = d.pow(n_parties as u32 - 1);
    let mut v = vec![0i64; d * rest];
    for f in 2..=n_parties {
        let j = k * d.pow((n_parties - f) as u32) + m;
        if j >= rest {
            return None;
        }
        v[j] += 1;
    }
    v[k * rest + m] -= 1;
    Some(v)
}

/// Q2 of `(C^d)^{x N}`: orthogonal complement of the family
/// `(1, P_1(a), ..., P_{d-1}(a)) x (1, a, ..., a^{d^{N-1}-1})`,
/// `P_k(a) = sum_{f=2}^N a^{k d^{N-f}}`.
///
/// The raw spanning set is the exact null space of the monomial coefficient
/// matrix. Wherever the spanning formula `|0>(sum_f |k d^{N-f} + m>) - |k>|m>`
/// stays inside the space, it coincides with the raw vector for `(k, m)`.
pub fn q2_subspace<T: Real>(n_parties: usize, d: usize) -> Result<Subspace<T>> {
    if n_parties < 3 || d < 2 {
        return Err(Error::InvalidParameter(format!("Q2 needs N >= 3, d >= 2 (got {n_parties}, {d})")));
    }
    let space = HilbertSpace::uniform(n_parties, d)?;
    let raw: Vec<Vec<Complex<T>>> = MonomialFamily::q2(n_parties, d)
        .complement_vectors()
        .iter()
        .map(|v| rational_to_complex(v))
        .collect();
    Ok(Subspace::from_span(space, &raw, T::of_f64(crate::tensor::DEFAULT_RANK_TOL), "Q2")?.with_raw(raw))
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    // (permutation, is_odd)
    if n == 0 {
        return vec![(vec![], false)];
    }
    let mut out = Vec::new();
    for (p, odd) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // Inserting at `pos` passes over `len - pos` elements.
            out.push((q, odd ^ ((p.len() - pos) % 2 == 1)));
        }
    }
    out
}

fn combinations(d: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    if d < n {
        return vec![];
    }
    let mut out = combinations(d - 1, n);
    for mut c in combinations(d - 1, n - 1) {
        c.push(d - 1);
        out.push(c);
    }
    out.sort();
    out
}

/// Antisymmetric subspace of `(C^d)^{x N}`, dimension `binomial(d, N)`.
pub fn antisymmetric_subspace<T: Real>(d: usize, n_parties: usize) -> Result<Subspace<T>> {
    if n_parties < 2 || d < n_parties {
        return Err(Error::InvalidParameter(format!("antisymmetric subspace needs d >= N >= 2 (d = {d}, N = {n_parties})")));
    }
    let space = HilbertSpace::uniform(n_parties, d)?;
    let perms = permutations(n_parties);
    let norm = T::from_usize(perms.len()).sqrt();
    let cols: Vec<Vec<Complex<T>>> = combinations(d, n_parties)
        .iter()
        .map(|c| {
            let entries: Vec<(usize, Complex<T>)> = perms
                .iter()
                .map(|(p, odd)| {
                    let digits: Vec<usize> = p.iter().map(|&i| c[i]).collect();
                    let s = if *odd { -T::one() } else { T::one() };
                    (space.index(&digits), real(s / norm))
                })
                .collect();
            basis_vec(space.total(), &entries)
        })
        .collect();
    let basis = CMatrix::from_columns(space.total(), &cols);
    Subspace::from_orthonormal(space, basis, "ASYM")
}

/// `span{|W>, sigma_x^{x N}|W>}` on `N` qubits.
pub fn w_span_subspace<T: Real>(n_parties: usize) -> Result<Subspace<T>> {
    if n_parties < 3 {
        return Err(Error::InvalidParameter(format!("W span needs N >= 3 (got {n_parties})")));
    }
    let space = HilbertSpace::uniform(n_parties, 2)?;
    let c = real(T::one() / T::from_usize(n_parties).sqrt());
    let full = space.total() - 1;
    let w: Vec<(usize, Complex<T>)> = (0..n_parties).map(|k| (1usize << k, c)).collect();
    let wbar: Vec<(usize, Complex<T>)> = w.iter().map(|&(i, z)| (full ^ i, z)).collect();
    let basis = CMatrix::from_columns(
        space.total(),
        &[basis_vec(space.total(), &w), basis_vec(space.total(), &wbar)],
    );
    Subspace::from_orthonormal(space, basis, "WSPAN")
}

/// Outcome of the unitary equivalence check.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub d: usize,
    pub dimension: usize,
    pub projector_distance: f64,
    pub equivalent: bool,
}

/// Builds `(|i>_A|1>_B|k+1>_C - |i+1>_A|0>_B|k>_C)/sqrt 2` on `C^d x C^2 x C^d`,
/// applies `U_c = sum_i |d-1-i><i|` on C and `i sigma_y` on B, swaps A and B, and
/// compares with `S^{pi/2}_{2 x d^2}`.
pub fn verify_appendix_b_equivalence(d: usize) -> Result<EquivalenceReport> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d = {d} < 2")));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let before = HilbertSpace::new(vec![d, 2, d])?;
    let after = HilbertSpace::new(vec![2, d, d])?;
    let mut cols = Vec::new();
    for i in 0..d - 1 {
        for k in 0..d - 1 {
            let terms = [((i, 1, k + 1), h), ((i + 1, 0, k), -h)];
            let mut v = vec![Complex::<f64>::zero(); after.total()];
            for ((a, b, c), amp) in terms {
                debug_assert!(before.index(&[a, b, c]) < before.total());
                // i sigma_y = [[0, 1], [-1, 0]] on B.
                let (b2, sign) = if b == 0 { (1, -1.0) } else { (0, 1.0) };
                let c2 = d - 1 - c;
                v[after.index(&[b2, a, c2])] += Complex::new(amp * sign, 0.0);
            }
            cols.push(v);
        }
    }
    let mapped = Subspace::from_orthonormal(after.clone(), CMatrix::from_columns(after.total(), &cols), "B")?;
    let target = ges_2xd_pow::<f64>(&GesParams::new(3, d, std::f64::consts::FRAC_PI_2))?;
    let dist = mapped.projector_distance(&target);
    Ok(EquivalenceReport { d, dimension: mapped.dim(), projector_distance: dist, equivalent: dist <= 1e-9 })
}

/// Parameters of the PPT certificate state.
pub const CERTIFICATE_PARAMS: [(&str, i64, i64); 7] = [
    ("a", 9, 10),
    ("b", 14, 25),
    ("c", 7, 25),
    ("x", 1, 30),
    ("y", 1, 14),
    ("z", 1, 7),
    ("alpha", 7, 25),
];

/// The certificate state and the quantities checked on it.
#[derive(Clone, Debug)]
pub struct CertificateReport<T> {
    pub state: HermitianOp<T>,
    /// `tr(P_S^perp rho)`, the objective of the GM relaxation at this state.
    pub complement_value: T,
    /// `tr(P_S rho)`.
    pub subspace_value: T,
    /// The closed-form expression quoted for this state.
    pub closed_form: T,
    /// Exact positivity of the partial transposes on `{1}`, `{2}`, `{3}`.
    pub ppt: [bool; 3],
}

/// The normalized 18x18 state on `C^2 x C^3 x C^3`, in the scalar type `T`
/// (exact for rationals since `sqrt(1 - alpha^2) = 24/25`).
pub fn appendix_c_state<T: Scalar>() -> Result<CertificateReport<T>> {
    let q = |i: usize| T::from_ratio(CERTIFICATE_PARAMS[i].1, CERTIFICATE_PARAMS[i].2);
    let (a, b, c, x, y, z, al) = (q(0), q(1), q(2), q(3), q(4), q(5), q(6));
    let one = T::one();
    let two = T::from_ratio(2, 1);
    let be = (one.clone() - al.clone() * al.clone())
        .sqrt_exact()
        .ok_or_else(|| Error::Inexact("sqrt(1 - alpha^2)".into()))?;
    let norm = two.clone()
        * (a.clone() + b.clone() + c.clone() + two.clone() * x.clone() + y.clone() + two.clone() * z.clone());
    let half = T::from_ratio(1, 2);
    let bpc = (b.clone() + c.clone()) * half.clone();
    let bmc = (b.clone() - c.clone()) * half;
    let aa2 = a.clone() * al.clone() * al.clone();
    let ab2 = a.clone() * be.clone() * be.clone();
    let aab = a.clone() * al.clone() * be.clone();
    let mut entries: Vec<(usize, usize, T)> = vec![
        (0, 0, aa2.clone()),
        (4, 4, ab2.clone()),
        (13, 13, ab2),
        (17, 17, aa2),
        (0, 13, aab.clone()),
        (4, 17, aab),
        (1, 1, bpc.clone()),
        (3, 3, bpc.clone()),
        (14, 14, bpc.clone()),
        (16, 16, bpc),
        (1, 14, bmc.clone()),
        (3, 16, bmc),
        (8, 8, y.clone()),
        (9, 9, y.clone()),
    ];
    for i in [2, 6, 11, 15] {
        entries.push((i, i, x.clone()));
    }
    for i in [5, 7, 10, 12] {
        entries.push((i, i, z.clone()));
    }
    let mut m = CMatrix::<T>::zeros(18, 18);
    for (i, j, v) in entries {
        let v = v / norm.clone();
        m[(i, j)] = real(v.clone());
        m[(j, i)] = real(v);
    }
    let space = HilbertSpace::new(vec![2, 3, 3])?;
    let state = HermitianOp::new(space, m)?;
    let p = ges_projector_exact::<T>(3, 3)?;
    let subspace_value = p.trace_product(&state);
    let complement_value = one.clone() - subspace_value.clone();
    let four = T::from_ratio(4, 1);
    let closed_form = (a.clone() - two.clone() * a * al * be
        + two.clone() * c
        + four.clone() * x
        + two * y
        + four * z)
        / norm;
    let mut ppt = [false; 3];
    for (k, slot) in ppt.iter_mut().enumerate() {
        *slot = state.partial_transpose(&Bipartition::new(3, &[k])?)?.is_psd_exact();
    }
    Ok(CertificateReport { state, complement_value, subspace_value, closed_form, ppt })
}

/// Subspace families reachable by label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    S,
    Ces,
    Q1,
    Q2,
    Asym,
    WSpan,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S" => Ok(Family::S),
            "CES" => Ok(Family::Ces),
            "Q1" => Ok(Family::Q1),
            "Q2" => Ok(Family::Q2),
            "ASYM" => Ok(Family::Asym),
            "WSPAN" => Ok(Family::WSpan),
            other => Err(Error::InvalidParameter(format!(
                "unknown subspace label '{other}' (expected S, CES, Q1, Q2, ASYM or WSPAN)"
            ))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::S => "S",
            Family::Ces => "CES",
            Family::Q1 => "Q1",
            Family::Q2 => "Q2",
            Family::Asym => "ASYM",
            Family::WSpan => "WSPAN",
        };
        f.write_str(s)
    }
}

/// Builds a family member. `theta` only matters for `S` and `CES`; `d` is ignored
/// for `WSPAN`, and `N` for `CES`.
pub fn build<T: Real>(family: Family, n_parties: usize, d: usize, theta: f64) -> Result<Subspace<T>> {
    match family {
        Family::S => ges_2xd_pow(&GesParams::new(n_parties, d, theta)),
        Family::Ces => ces_2xd(d, theta, 0.0),
        Family::Q1 => q1_subspace(n_parties, d),
        Family::Q2 => q2_subspace(n_parties, d),
        Family::Asym => antisymmetric_subspace(d, n_parties),
        Family::WSpan => w_span_subspace(n_parties),
    }
}
