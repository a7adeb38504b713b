//! Entanglement bounds expressed as conic programs.

use num_complex::Complex;
use rayon::prelude::*;

use super::program::{ConicProgram, LinearForm, LinearMap, MatExpr, Sense, VarKind};
use super::{solve_checked, SdpOptions, SdpSolution};
use crate::error::{Error, Result};
use crate::tensor::{eigh, Bipartition, CMatrix, HermitianOp, HilbertSpace, Subspace};

/// Outer approximation of the separable (or biseparable) set used by the
/// subspace bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relaxation {
    Ppt,
    /// Symmetric extensions with `k` copies. Not implemented.
    SymmetricExtension(usize),
    /// Positivity under the Breuer-Hall map. Not implemented.
    BreuerHall,
}

impl Relaxation {
    fn check(self) -> Result<()> {
        match self {
            Relaxation::Ppt => Ok(()),
            other => Err(Error::NotApplicable(format!("relaxation {other:?} is not implemented"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundResult {
    pub value: f64,
    pub solution: SdpSolution,
}

fn cuts(space: &HilbertSpace) -> Result<Vec<Bipartition>> {
    Bipartition::all(space.n_parties())
}

fn pt(space: &HilbertSpace, cut: &Bipartition) -> LinearMap {
    LinearMap::partial_transpose(space, &cut.k_parties())
}

/// `min tr(P_perp rho)` over unit-trace `rho >= 0` that are PPT across every cut in `cuts`.
pub fn subspace_program(subspace: &Subspace<f64>, cuts: &[Bipartition]) -> ConicProgram {
    let space = subspace.space();
    let d = space.total();
    let mut p = ConicProgram::new(Sense::Minimize);
    let rho = p.add_var("rho", VarKind::Hermitian(d));
    p.set_objective(LinearForm::new().plus(rho, subspace.complement_projector().into_matrix()));
    p.add_psd("rho >= 0", MatExpr::var(rho, d));
    for cut in cuts {
        p.add_psd(format!("rho^T[{cut}] >= 0"), MatExpr::new(d).plus(rho, 1.0, pt(space, cut)));
    }
    p.add_trace_equality(&[rho], 1.0);
    p
}

/// Lower bound on the GM of a subspace: PPT across all cuts simultaneously.
pub fn gm_lower_bound(subspace: &Subspace<f64>, opts: &SdpOptions) -> Result<BoundResult> {
    gm_lower_bound_with(subspace, Relaxation::Ppt, opts)
}

pub fn gm_lower_bound_with(subspace: &Subspace<f64>, relax: Relaxation, opts: &SdpOptions) -> Result<BoundResult> {
    relax.check()?;
    let prog = subspace_program(subspace, &cuts(subspace.space())?);
    let solution = solve_checked(&prog, opts)?;
    Ok(BoundResult { value: solution.objective.max(0.0), solution })
}

/// Lower bound on the GGM of a subspace: the minimum over cuts of the
/// single-cut PPT bound. Returns the minimum and every per-cut result.
pub fn ggm_lower_bound(
    subspace: &Subspace<f64>,
    opts: &SdpOptions,
) -> Result<(f64, Vec<(Bipartition, BoundResult)>)> {
    let per_cut: Vec<(Bipartition, BoundResult)> = cuts(subspace.space())?
        .into_par_iter()
        .map(|cut| {
            let prog = subspace_program(subspace, std::slice::from_ref(&cut));
            let solution = solve_checked(&prog, opts)?;
            Ok((cut, BoundResult { value: solution.objective.max(0.0), solution }))
        })
        .collect::<Result<_>>()?;
    let min = per_cut.iter().map(|(_, r)| r.value).fold(f64::INFINITY, f64::min);
    Ok((min, per_cut))
}

/// `min tr(W rho)` over `W = P_K + Q_K^{T_K}` with `0 <= P_K, Q_K <= I` for
/// every cut; with `fully`, `P_K = 0`.
pub fn ppt_mixture_program(rho: &HermitianOp<f64>, fully: bool) -> Result<ConicProgram> {
    let space = rho.space();
    let d = space.total();
    let mut p = ConicProgram::new(Sense::Minimize);
    let w = p.add_var("W", VarKind::Hermitian(d));
    p.set_objective(LinearForm::new().plus(w, rho.matrix().clone()));
    for cut in cuts(space)? {
        let q = p.add_var(format!("Q[{cut}]"), VarKind::Hermitian(d));
        p.add_box(q);
        let mut e = MatExpr::var(w, d).plus(q, -1.0, pt(space, &cut));
        if !fully {
            let pk = p.add_var(format!("P[{cut}]"), VarKind::Hermitian(d));
            p.add_box(pk);
            e = e.plus(pk, -1.0, LinearMap::Identity);
        }
        p.add_matrix_equality(format!("W = decomposition[{cut}]"), e);
    }
    Ok(p)
}

/// PPT-mixture monotone `max(0, -min tr(W rho))`.
pub fn ppt_mixture_monotone(rho: &HermitianOp<f64>, fully: bool, opts: &SdpOptions) -> Result<BoundResult> {
    let prog = ppt_mixture_program(rho, fully)?;
    let solution = solve_checked(&prog, opts)?;
    Ok(BoundResult { value: (-solution.objective).max(0.0), solution })
}

/// Support of a density matrix: `rho = V diag(lambda) V^dagger` restricted to
/// eigenvalues above `1e-12 max(lambda)`.
fn support(rho: &HermitianOp<f64>) -> (CMatrix<f64>, Vec<f64>) {
    let m = rho.matrix();
    let n = m.rows();
    let (values, vectors) = if m.data().iter().all(|z| z.im == 0.0) {
        let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
        let e = a.self_adjoint_eigen(faer::Side::Lower).expect("symmetric eigendecomposition");
        let vals: Vec<f64> = (0..n).map(|i| e.S()[i]).collect();
        let u = e.U();
        (vals, CMatrix::from_fn(n, n, |i, j| Complex::new(u[(i, j)], 0.0)))
    } else {
        let e = eigh(m);
        (e.values, e.vectors)
    };
    let top = values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..n).filter(|&k| values[k] > 1e-12 * top.max(1e-300)).collect();
    let cols: Vec<Vec<Complex<f64>>> = keep.iter().map(|&k| vectors.column(k)).collect();
    (CMatrix::from_columns(n, &cols), keep.iter().map(|&k| values[k]).collect())
}

/// Shared skeleton: maximize `Re tr X` with `[[rho, X], [X^dagger, sigma]] >= 0`,
/// where `X = V Y` runs over matrices supported on the range of `rho`.
struct FidelityModel {
    prog: ConicProgram,
    block: MatExpr,
    r: usize,
}

fn fidelity_model(rho: &HermitianOp<f64>) -> FidelityModel {
    let d = rho.dim();
    let (v, lambda) = support(rho);
    let r = lambda.len();
    let mut prog = ConicProgram::new(Sense::Maximize);
    let y = prog.add_var("Y", VarKind::General(r, d));
    prog.set_objective(LinearForm::new().plus(y, v));
    let mut c = CMatrix::zeros(r + d, r + d);
    for (k, l) in lambda.iter().enumerate() {
        c[(k, k)] = Complex::new(*l, 0.0);
    }
    let block = MatExpr::new(r + d).with_constant(c).plus(y, 1.0, LinearMap::Place { row: 0, col: r });
    FidelityModel { prog, block, r }
}

/// `F(rho, sigma) = max Re tr X` subject to `[[rho, X], [X^dagger, sigma]] >= 0`,
/// solved on the supports: `X = V_rho Y V_sigma^dagger`.
pub fn fidelity_sdp(rho: &HermitianOp<f64>, sigma: &HermitianOp<f64>, opts: &SdpOptions) -> Result<BoundResult> {
    if rho.space() != sigma.space() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let (va, la) = support(rho);
    let (vb, lb) = support(sigma);
    let (ra, rb) = (la.len(), lb.len());
    let mut prog = ConicProgram::new(Sense::Maximize);
    let y = prog.add_var("Y", VarKind::General(ra, rb));
    prog.set_objective(LinearForm::new().plus(y, vb.adjoint().matmul(&va)));
    let mut c = CMatrix::zeros(ra + rb, ra + rb);
    for (k, l) in la.iter().chain(&lb).enumerate() {
        c[(k, k)] = Complex::new(*l, 0.0);
    }
    prog.add_psd(
        "fidelity block >= 0",
        MatExpr::new(ra + rb).with_constant(c).plus(y, 1.0, LinearMap::Place { row: 0, col: ra }),
    );
    let solution = solve_checked(&prog, opts)?;
    Ok(BoundResult { value: solution.objective.max(0.0), solution })
}

/// `1 - max F^2(rho, sigma)` over unit-trace `sigma` PPT across every cut:
/// a lower bound on the GM of `rho`.
pub fn fidelity_gm_program(rho: &HermitianOp<f64>) -> Result<ConicProgram> {
    let space = rho.space();
    let d = space.total();
    let FidelityModel { mut prog, block, r } = fidelity_model(rho);
    let sigma = prog.add_var("sigma", VarKind::Hermitian(d));
    prog.add_psd("fidelity block >= 0", block.plus(sigma, 1.0, LinearMap::Place { row: r, col: r }));
    for cut in cuts(space)? {
        prog.add_psd(format!("sigma^T[{cut}] >= 0"), MatExpr::new(d).plus(sigma, 1.0, pt(space, &cut)));
    }
    prog.add_trace_equality(&[sigma], 1.0);
    Ok(prog)
}

pub fn fidelity_gm_bound(rho: &HermitianOp<f64>, opts: &SdpOptions) -> Result<BoundResult> {
    let solution = solve_checked(&fidelity_gm_program(rho)?, opts)?;
    let f = solution.objective;
    Ok(BoundResult { value: (1.0 - f * f).max(0.0), solution })
}

/// `1 - max F^2(rho, sigma)` over PPT mixtures `sigma = sum_K sigma_K` with
/// `sigma_K` PPT across cut `K`: a lower bound on the GGM of `rho`.
pub fn fidelity_ggm_program(rho: &HermitianOp<f64>) -> Result<ConicProgram> {
    let space = rho.space();
    let d = space.total();
    let FidelityModel { mut prog, mut block, r } = fidelity_model(rho);
    let mut parts = Vec::new();
    for cut in cuts(space)? {
        let s = prog.add_var(format!("sigma[{cut}]"), VarKind::Hermitian(d));
        prog.add_psd(format!("sigma[{cut}] >= 0"), MatExpr::var(s, d));
        prog.add_psd(format!("sigma[{cut}]^T >= 0"), MatExpr::new(d).plus(s, 1.0, pt(space, &cut)));
        block = block.plus(s, 1.0, LinearMap::Place { row: r, col: r });
        parts.push(s);
    }
    prog.add_psd("fidelity block >= 0", block);
    prog.add_trace_equality(&parts, 1.0);
    Ok(prog)
}

pub fn fidelity_ggm_bound(rho: &HermitianOp<f64>, opts: &SdpOptions) -> Result<BoundResult> {
    let solution = solve_checked(&fidelity_ggm_program(rho)?, opts)?;
    let f = solution.objective;
    Ok(BoundResult { value: (1.0 - f * f).max(0.0), solution })
}
