//! Seesaw maximization of the overlap between a subspace and product vectors.

use num_complex::Complex;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::{top_eigenpair, Bipartition, CMatrix, HilbertSpace, PureState, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeesawConfig {
    /// Stop once a full sweep raises the overlap by less than this.
    pub epsilon: f64,
    pub max_sweeps: usize,
    pub restarts: usize,
    pub rng_seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self { epsilon: 1e-10, max_sweeps: 10_000, restarts: 200, rng_seed: 0 }
    }
}

impl SeesawConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartRecord {
    pub restart: usize,
    pub overlap: f64,
    pub sweeps: usize,
    pub converged: bool,
    pub monotone: bool,
}

#[derive(Clone, Debug)]
pub struct SeesawResult<T: Real> {
    pub overlap: T,
    pub entanglement: T,
    /// Party groups the factors live on, in the order of `optimizer`.
    pub groups: Vec<Vec<usize>>,
    pub optimizer: Vec<PureState<T>>,
    pub sweeps_used: usize,
    pub converged: bool,
    /// False if any step in any restart lowered the overlap.
    pub monotone: bool,
    /// Index of the restart that produced the optimizer.
    pub best_restart: usize,
    pub history: Vec<RestartRecord>,
}

impl<T: Real> SeesawResult<T> {
    /// The product vector built from the optimizer factors.
    pub fn product_vector(&self, space: &HilbertSpace) -> Vec<Complex<T>> {
        let layout = Layout::new(space, &self.groups);
        let factors: Vec<Vec<Complex<T>>> = self.optimizer.iter().map(|f| f.amplitudes().to_vec()).collect();
        layout.product(&factors)
    }
}

/// Flat-index bookkeeping for a partition of the parties into groups.
struct Layout {
    dims: Vec<usize>,
    /// `index[g][t]`: index of flat basis element `t` inside group `g`.
    index: Vec<Vec<usize>>,
    spaces: Vec<HilbertSpace>,
}

impl Layout {
    fn new(space: &HilbertSpace, groups: &[Vec<usize>]) -> Self {
        let spaces: Vec<HilbertSpace> = groups.iter().map(|g| space.subspace_of(g)).collect();
        Self {
            dims: spaces.iter().map(|s| s.total()).collect(),
            index: groups.iter().map(|g| space.projected_indices(g)).collect(),
            spaces,
        }
    }

    fn product<T: Real>(&self, factors: &[Vec<Complex<T>>]) -> Vec<Complex<T>> {
        let n = self.index[0].len();
        (0..n)
            .map(|t| {
                factors
                    .iter()
                    .zip(&self.index)
                    .fold(Complex::new(T::one(), T::zero()), |acc, (f, idx)| acc * f[idx[t]])
            })
            .collect()
    }

    /// `C[a, j] = sum_t conj(x_rest(t)) B[t, j]` over `t` with group index `a`;
    /// returns `C C^dagger`.
    fn contraction<T: Real>(&self, basis: &CMatrix<T>, factors: &[Vec<Complex<T>>], g: usize) -> CMatrix<T> {
        let r = basis.cols();
        let dg = self.dims[g];
        let mut c = vec![Complex::<T>::zero(); dg * r];
        for t in 0..basis.rows() {
            let mut w = Complex::new(T::one(), T::zero());
            for (h, f) in factors.iter().enumerate() {
                if h != g {
                    w = w * f[self.index[h][t]].conj();
                }
            }
            if w.is_zero() {
                continue;
            }
            let a = self.index[g][t];
            let row = basis.row(t);
            let dst = &mut c[a * r..(a + 1) * r];
            for (x, b) in dst.iter_mut().zip(row) {
                *x = *x + w * *b;
            }
        }
        CMatrix::from_fn(dg, dg, |i, k| {
            (0..r).fold(Complex::zero(), |acc, j| acc + c[i * r + j] * c[k * r + j].conj())
        })
    }
}

fn quadratic<T: Real>(m: &CMatrix<T>, x: &[Complex<T>]) -> T {
    let mx = m.matvec(x);
    x.iter().zip(&mx).fold(T::zero(), |acc, (a, b)| acc + (a.conj() * b).re)
}

fn haar<T: Real>(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex<T>> {
    loop {
        let v: Vec<Complex<T>> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(T::of_f64(re), T::of_f64(im))
            })
            .collect();
        let n = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
        if n > T::zero() {
            return v.into_iter().map(|z| z.unscale(n)).collect();
        }
    }
}

struct Run<T> {
    factors: Vec<Vec<Complex<T>>>,
    record: RestartRecord,
}

fn run_restart<T: Real>(
    subspace: &Subspace<T>,
    layout: &Layout,
    cfg: &SeesawConfig,
    restart: usize,
) -> Run<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(restart as u64);
    let mut factors: Vec<Vec<Complex<T>>> = layout.dims.iter().map(|&d| haar(d, &mut rng)).collect();
    let basis = subspace.basis();
    let mut current = subspace.overlap(&layout.product(&factors));
    let slack = T::of_f64(1e-12);
    let eps = T::of_f64(cfg.epsilon);
    let mut monotone = true;
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < cfg.max_sweeps {
        let start = current;
        for g in 0..factors.len() {
            let m = layout.contraction(basis, &factors, g);
            let (lambda, v) = top_eigenpair(&m);
            if lambda < current - slack {
                monotone = false;
            }
            factors[g] = v;
            current = lambda;
        }
        sweeps += 1;
        if current - start < eps {
            converged = true;
            break;
        }
    }
    let overlap = subspace.overlap(&layout.product(&factors));
    Run {
        factors,
        record: RestartRecord { restart, overlap: overlap.as_f64(), sweeps, converged, monotone },
    }
}

/// Seesaw over an arbitrary partition of the parties into groups; each group
/// carries one local factor.
pub fn seesaw_groups<T: Real>(
    subspace: &Subspace<T>,
    groups: &[Vec<usize>],
    cfg: &SeesawConfig,
) -> Result<SeesawResult<T>> {
    cfg.validate()?;
    if subspace.dim() == 0 {
        return Err(Error::InvalidParameter("empty subspace".into()));
    }
    let n = subspace.space().n_parties();
    let mut seen = vec![false; n];
    for &p in groups.iter().flatten() {
        if p >= n || seen[p] {
            return Err(Error::InvalidParameter(format!("groups {groups:?} do not partition {n} parties")));
        }
        seen[p] = true;
    }
    if seen.iter().any(|s| !s) || groups.iter().any(|g| g.is_empty()) {
        return Err(Error::InvalidParameter(format!("groups {groups:?} do not partition {n} parties")));
    }
    let layout = Layout::new(subspace.space(), groups);
    let runs: Vec<Run<T>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| run_restart(subspace, &layout, cfg, k))
        .collect();
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.record.overlap > runs[best].record.overlap {
            best = k;
        }
    }
    let history: Vec<RestartRecord> = runs.iter().map(|r| r.record.clone()).collect();
    let win = &runs[best];
    let overlap = subspace.overlap(&layout.product(&win.factors));
    let optimizer = win
        .factors
        .iter()
        .zip(&layout.spaces)
        .map(|(f, s)| PureState::new(s.clone(), f.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeesawResult {
        overlap,
        entanglement: T::one() - overlap,
        groups: groups.to_vec(),
        optimizer,
        sweeps_used: win.record.sweeps,
        converged: win.record.converged,
        monotone: history.iter().all(|h| h.monotone),
        best_restart: best,
        history,
    })
}

/// GM of a subspace: one factor per party, parties swept in order.
pub fn seesaw_gm<T: Real>(subspace: &Subspace<T>, cfg: &SeesawConfig) -> Result<SeesawResult<T>> {
    let groups: Vec<Vec<usize>> = (0..subspace.space().n_parties()).map(|p| vec![p]).collect();
    seesaw_groups(subspace, &groups, cfg)
}

/// Bipartite GM across `cut`: alternates between the `K` and `K-bar` factors.
pub fn seesaw_gm_bipartition<T: Real>(
    subspace: &Subspace<T>,
    cut: &Bipartition,
    cfg: &SeesawConfig,
) -> Result<SeesawResult<T>> {
    cut.check_space(subspace.space())?;
    seesaw_groups(subspace, &[cut.k_parties(), cut.kbar_parties()], cfg)
}

/// GGM as the minimum over canonical cuts of the bipartite GM; returns the
/// value, the achieving cut and every per-cut result.
pub fn ggm_via_cuts<T: Real>(
    subspace: &Subspace<T>,
    cfg: &SeesawConfig,
) -> Result<(T, Bipartition, Vec<(Bipartition, SeesawResult<T>)>)> {
    let n = subspace.space().n_parties();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N = {n} < 2")));
    }
    let mut per_cut = Vec::new();
    for cut in Bipartition::all(n)? {
        let r = seesaw_gm_bipartition(subspace, &cut, cfg)?;
        per_cut.push((cut, r));
    }
    let mut best = 0;
    for (k, (_, r)) in per_cut.iter().enumerate() {
        if r.entanglement < per_cut[best].1.entanglement {
            best = k;
        }
    }
    Ok((per_cut[best].1.entanglement, per_cut[best].0, per_cut))
}

/// Largest gap `lambda_max(M_g) - <x_g|M_g|x_g>` over the factors, where `M_g`
/// is the contraction of the projector with every other factor. Zero at an
/// exact fixed point of the iteration.
pub fn fixed_point_residual<T: Real>(subspace: &Subspace<T>, result: &SeesawResult<T>) -> f64 {
    let layout = Layout::new(subspace.space(), &result.groups);
    let factors: Vec<Vec<Complex<T>>> = result.optimizer.iter().map(|f| f.amplitudes().to_vec()).collect();
    (0..factors.len())
        .map(|g| {
            let m = layout.contraction(subspace.basis(), &factors, g);
            let (lambda, _) = top_eigenpair(&m);
            (lambda - quadratic(&m, &factors[g])).as_f64()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspaces::{antisymmetric_subspace, ges_2xd_pow, w_span_subspace, GesParams};
    use std::f64::consts::FRAC_PI_2;

    fn cfg(restarts: usize) -> SeesawConfig {
        SeesawConfig { restarts, rng_seed: 7, ..Default::default() }
    }

    fn ghz() -> Subspace<f64> {
        let space = HilbertSpace::uniform(3, 2).unwrap();
        let s = 0.5f64.sqrt();
        let mut v = vec![Complex::zero(); 8];
        v[0] = Complex::new(s, 0.0);
        v[7] = Complex::new(s, 0.0);
        Subspace::from_span(space, &[v], 1e-9, "GHZ").unwrap()
    }

    #[test]
    fn ghz_half() {
        let r = seesaw_gm(&ghz(), &cfg(10)).unwrap();
        assert!((r.entanglement - 0.5).abs() < 1e-8);
        assert!(r.monotone && r.converged);
        let v = r.product_vector(ghz().space());
        assert!((ghz().overlap(&v) - r.overlap).abs() < 1e-12);
    }

    #[test]
    fn ges_cuts_are_uniform() {
        let s = ges_2xd_pow::<f64>(&GesParams::new(3, 3, FRAC_PI_2)).unwrap();
        for parties in [vec![0], vec![0, 1]] {
            let cut = Bipartition::new(3, &parties).unwrap();
            let r = seesaw_gm_bipartition(&s, &cut, &cfg(20)).unwrap();
            assert!((r.entanglement - 0.25).abs() < 1e-6, "{parties:?}: {}", r.entanglement);
        }
        let (v, _, per) = ggm_via_cuts(&s, &cfg(20)).unwrap();
        assert_eq!(per.len(), 3);
        assert!((v - 0.25).abs() < 1e-6);
    }

    #[test]
    fn full_space_has_zero_entanglement() {
        let space = HilbertSpace::new(vec![2, 3]).unwrap();
        let cols: Vec<Vec<Complex<f64>>> = (0..6)
            .map(|i| (0..6).map(|j| Complex::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        let s = Subspace::from_span(space, &cols, 1e-9, "ALL").unwrap();
        let r = seesaw_gm(&s, &cfg(3)).unwrap();
        assert!(r.entanglement.abs() < 1e-12);
    }

    #[test]
    fn antisymmetric_ggm() {
        let s = antisymmetric_subspace::<f64>(3, 3).unwrap();
        let (v, _, _) = ggm_via_cuts(&s, &cfg(20)).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn deterministic_and_fixed_point() {
        let s = w_span_subspace::<f64>(3).unwrap();
        let a = seesaw_gm(&s, &cfg(8)).unwrap();
        let b = seesaw_gm(&s, &cfg(8)).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.overlap, b.overlap);
        assert!(fixed_point_residual(&s, &a) < 1e-8);
    }

    #[test]
    fn rejects_bad_config() {
        let bad = SeesawConfig { restarts: 0, ..Default::default() };
        assert!(seesaw_gm(&ghz(), &bad).is_err());
        let bad = SeesawConfig { epsilon: 0.0, ..Default::default() };
        assert!(seesaw_gm(&ghz(), &bad).is_err());
        assert!(seesaw_groups(&ghz(), &[vec![0], vec![0, 1]], &cfg(1)).is_err());
    }
}
