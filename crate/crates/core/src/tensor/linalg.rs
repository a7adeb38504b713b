//! Hermitian eigendecomposition and exact positivity tests.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::CMatrix;
use crate::scalar::{Real, Scalar};

/// Spectrum in ascending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigh<T> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

/// Full eigendecomposition of a Hermitian matrix (only the lower triangle is trusted
/// after symmetrization).
pub fn eigh<T: Real>(a: &CMatrix<T>) -> Eigh<T> {
    let n = a.rows();
    assert!(a.is_square(), "eigh needs a square matrix");
    if n == 0 {
        return Eigh { values: vec![], vectors: CMatrix::zeros(0, 0) };
    }
    let (mut d, mut e, q) = tridiagonalize(a, true);
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }
    tql(&mut d, &mut e, Some(&mut z));
    let q = q.expect("requested");
    // vectors = q * z
    let mut v = CMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let qik = q[(i, k)];
            if qik.is_zero() {
                continue;
            }
            for j in 0..n {
                v[(i, j)] = v[(i, j)] + qik.scale(z[k * n + j]);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Eigh { values, vectors }
}

/// Eigenvalues in ascending order.
pub fn eigvalsh<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    assert!(a.is_square(), "eigvalsh needs a square matrix");
    if a.rows() == 0 {
        return vec![];
    }
    let (mut d, mut e, _) = tridiagonalize(a, false);
    tql(&mut d, &mut e, None);
    d.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    d
}

pub fn min_eigenvalue<T: Real>(a: &CMatrix<T>) -> T {
    eigvalsh(a)[0]
}

/// Householder reduction to real symmetric tridiagonal form.
///
/// Returns the diagonal, the off-diagonal (with a trailing zero) and, on request,
/// the unitary `U` with `A = U T U^dagger`.
fn tridiagonalize<T: Real>(a: &CMatrix<T>, want_u: bool) -> (Vec<T>, Vec<T>, Option<CMatrix<T>>) {
    let n = a.rows();
    let mut w = a.hermitian_part();
    let mut u = if want_u { Some(CMatrix::identity(n)) } else { None };
    let two = T::one() + T::one();
    let mut v = vec![Complex::<T>::zero(); n];
    let mut p = vec![Complex::<T>::zero(); n];

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let sigma = (k + 1..n).fold(T::zero(), |acc, i| acc + w[(i, k)].norm_sqr()).sqrt();
        let x0 = w[(k + 1, k)];
        let tail = (k + 2..n).fold(T::zero(), |acc, i| acc + w[(i, k)].norm_sqr());
        if tail == T::zero() {
            continue;
        }
        let x0abs = x0.norm();
        let phase = if x0abs > T::zero() { x0 / x0abs } else { Complex::one() };
        let alpha = -phase.scale(sigma);
        let vnorm = (two * sigma * (sigma + x0abs)).sqrt();
        for j in 0..len {
            v[j] = w[(k + 1 + j, k)];
        }
        v[0] = v[0] - alpha;
        for vj in v.iter_mut().take(len) {
            *vj = vj.unscale(vnorm);
        }
        // Trailing block B <- H B H with H = I - 2 v v^dagger.
        let mut gamma = T::zero();
        for i in 0..len {
            let mut acc = Complex::zero();
            for j in 0..len {
                acc = acc + w[(k + 1 + i, k + 1 + j)] * v[j];
            }
            p[i] = acc;
            gamma = gamma + (v[i].conj() * acc).re;
        }
        for i in 0..len {
            p[i] = p[i] - v[i].scale(gamma);
        }
        for i in 0..len {
            for j in 0..len {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                w[(k + 1 + i, k + 1 + j)] = w[(k + 1 + i, k + 1 + j)] - upd.scale(two);
            }
        }
        w[(k + 1, k)] = alpha;
        w[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            w[(i, k)] = Complex::zero();
            w[(k, i)] = Complex::zero();
        }
        if let Some(u) = u.as_mut() {
            for r in 0..n {
                let mut t = Complex::zero();
                for j in 0..len {
                    t = t + u[(r, k + 1 + j)] * v[j];
                }
                let t2 = t.scale(two);
                for j in 0..len {
                    u[(r, k + 1 + j)] = u[(r, k + 1 + j)] - t2 * v[j].conj();
                }
            }
        }
    }

    let d: Vec<T> = (0..n).map(|i| w[(i, i)].re).collect();
    let mut e = vec![T::zero(); n];
    let mut phase = Complex::<T>::one();
    for k in 0..n.saturating_sub(1) {
        let sub = w[(k + 1, k)];
        let mag = sub.norm();
        e[k] = mag;
        if mag > T::zero() {
            phase = phase * (sub / mag);
        }
        if let Some(u) = u.as_mut() {
            for r in 0..n {
                u[(r, k + 1)] = u[(r, k + 1)] * phase;
            }
        }
    }
    (d, e, u)
}

/// Implicit QL iteration with Wilkinson-style shifts on a symmetric tridiagonal
/// matrix. `e[i]` couples `i` and `i + 1`. `z`, when given, is an `n x n` row-major
/// matrix whose columns get rotated along.
fn tql<T: Real>(d: &mut [T], e: &mut [T], mut z: Option<&mut Vec<T>>) {
    let n = d.len();
    let eps = T::epsilon();
    let two = T::one() + T::one();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 200, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
}

/// Largest eigenvalue and a canonical eigenvector.
///
/// Within a (numerically) degenerate top eigenspace the returned vector is the
/// normalized projection of the first basis vector `e_i` that has a nonzero
/// component there, which maximizes `|v_i|`. The phase makes that component
/// real and positive. The result does not depend on the solver's basis choice.
pub fn top_eigenpair<T: Real>(a: &CMatrix<T>) -> (T, Vec<Complex<T>>) {
    let n = a.rows();
    let eig = eigh(a);
    let top = eig.values[n - 1];
    let scale = eig.values.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let gap_tol = T::of_f64(1e-10) * scale;
    let first = eig.values.iter().position(|&v| top - v <= gap_tol).expect("top exists");
    let cols: Vec<usize> = (first..n).collect();
    let comp_tol = T::of_f64(1e-8);
    let mut v: Vec<Complex<T>> = if cols.len() == 1 {
        eig.vectors.column(n - 1)
    } else {
        let pivot = (0..n)
            .find(|&i| {
                cols.iter().fold(T::zero(), |acc, &c| acc + eig.vectors[(i, c)].norm_sqr())
                    > comp_tol * comp_tol
            })
            .unwrap_or(0);
        let mut v = vec![Complex::zero(); n];
        for &c in &cols {
            let coef = eig.vectors[(pivot, c)].conj();
            for (i, vi) in v.iter_mut().enumerate() {
                *vi = *vi + eig.vectors[(i, c)] * coef;
            }
        }
        let norm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        v.iter().map(|z| z.unscale(norm)).collect()
    };
    fix_phase(&mut v, comp_tol);
    (top, v)
}

/// Rotates the global phase so the first component above `tol` is real positive.
pub fn fix_phase<T: Real>(v: &mut [Complex<T>], tol: T) {
    let max = v.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    if let Some(z) = v.iter().find(|z| z.norm() > tol * max).copied() {
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x = *x * ph;
        }
    }
}

/// Sylvester-type inertia test: true when the Hermitian matrix is positive
/// semidefinite. Uses symmetric pivoting on the diagonal, so with exact scalars the
/// answer is exact.
pub fn is_psd_exact<T: Scalar>(a: &CMatrix<T>) -> bool {
    assert!(a.is_square());
    let mut m = a.clone();
    let mut alive: Vec<usize> = (0..a.rows()).collect();
    while !alive.is_empty() {
        let mut pivot = None;
        for &i in &alive {
            let dii = m[(i, i)].re.clone();
            if dii < T::zero() && !crate::scalar::is_negligible(&dii) {
                return false;
            }
            if dii > T::zero() && !crate::scalar::is_negligible(&dii) {
                let better = match pivot {
                    None => true,
                    Some(p) => dii > m[(p, p)].re,
                };
                if better {
                    pivot = Some(i);
                }
            }
        }
        let Some(p) = pivot else {
            // Zero diagonal: PSD only if the remaining block vanishes.
            return alive.iter().all(|&i| {
                alive.iter().all(|&j| {
                    let z = &m[(i, j)];
                    crate::scalar::is_negligible(&z.re) && crate::scalar::is_negligible(&z.im)
                })
            });
        };
        alive.retain(|&i| i != p);
        let dpp = m[(p, p)].re.clone();
        for &i in &alive {
            let lip = m[(i, p)].clone();
            if lip.is_zero() {
                continue;
            }
            for &j in &alive {
                let upd = lip.clone() * m[(p, j)].clone();
                m[(i, j)] = m[(i, j)].clone() - upd.unscale(dpp.clone());
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = CMatrix::from_fn(n, n, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        a.hermitian_part()
    }

    /// Cyclic complex Jacobi: slow but independent.
    fn jacobi_eigenvalues(a: &CMatrix<f64>) -> Vec<f64> {
        let n = a.rows();
        let mut m = a.clone();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)].norm_sqr())
                .sum();
            if off < 1e-26 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = m[(p, q)];
                    if apq.norm() < 1e-300 {
                        continue;
                    }
                    let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
                    let phase = apq / apq.norm();
                    let theta = 0.5 * (2.0 * apq.norm()).atan2(aqq - app);
                    let (c, s) = (theta.cos(), theta.sin());
                    // Rotation G with columns p,q: [[c, s*phase], [-s*conj(phase), c]]
                    let mut g = CMatrix::<f64>::identity(n);
                    g[(p, p)] = Complex::new(c, 0.0);
                    g[(q, q)] = Complex::new(c, 0.0);
                    g[(p, q)] = phase * s;
                    g[(q, p)] = -phase.conj() * s;
                    m = g.adjoint().matmul(&m).matmul(&g);
                }
            }
        }
        let mut v: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (17, 4), (50, 5)] {
            let a = random_hermitian(n, seed);
            let e = eigh(&a);
            for j in 0..n {
                let v = e.vectors.column(j);
                let av = a.matvec(&v);
                for i in 0..n {
                    assert!((av[i] - v[i] * e.values[j]).norm() < 1e-10);
                }
            }
            let gram = e.vectors.adjoint().matmul(&e.vectors);
            assert!((&gram - &CMatrix::identity(n)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn eigh_agrees_with_jacobi() {
        let a = random_hermitian(12, 9);
        let ours = eigvalsh(&a);
        let reference = jacobi_eigenvalues(&a);
        for (x, y) in ours.iter().zip(&reference) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn top_pair_of_diagonal() {
        let a = CMatrix::<f64>::from_real_fn(3, 3, |i, j| if i == j { [0.2, 0.7, 0.1][i] } else { 0.0 });
        let (l, v) = top_eigenpair(&a);
        assert!((l - 0.7).abs() < 1e-14);
        assert!((v[1] - Complex::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn degenerate_top_is_canonical() {
        let (l, v) = top_eigenpair(&CMatrix::<f64>::identity(3));
        assert!((l - 1.0).abs() < 1e-14);
        assert!((v[0] - Complex::new(1.0, 0.0)).norm() < 1e-12);
        // Same eigenspace presented in a rotated basis gives the same vector.
        let a = random_hermitian(4, 11);
        let u = eigh(&a).vectors;
        let diag = CMatrix::from_real_fn(4, 4, |i, j| if i == j { [1.0, 2.0, 2.0, 0.5][i] } else { 0.0 });
        let m = u.matmul(&diag).matmul(&u.adjoint());
        let (_, v1) = top_eigenpair(&m);
        let w = CMatrix::from_real_fn(4, 4, |i, j| if i == j { [1.0, 0.5, 0.5, 0.5][i] } else { 0.0 });
        let m2 = &(&m + &w) - &w;
        let (_, v2) = top_eigenpair(&m2);
        for i in 0..4 {
            assert!((v1[i] - v2[i]).norm() < 1e-8);
        }
    }

    #[test]
    fn exact_psd_test() {
        let q = |n: i64| Complex::new(BigRational::from_ratio(n, 1), BigRational::zero());
        let psd = CMatrix::from_vec(2, 2, vec![q(1), q(1), q(1), q(1)]);
        let not = CMatrix::from_vec(2, 2, vec![q(1), q(2), q(2), q(1)]);
        let zero_diag = CMatrix::from_vec(2, 2, vec![q(0), q(1), q(1), q(0)]);
        assert!(is_psd_exact(&psd));
        assert!(!is_psd_exact(&not));
        assert!(!is_psd_exact(&zero_diag));
    }
}
