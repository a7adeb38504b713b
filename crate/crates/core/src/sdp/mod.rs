//! Semidefinite programs: a conic-program model, its lowering to a real block
//! SDP, a dense interior-point solver and the entanglement bounds built on it.

pub mod ipm;
pub mod lower;
pub mod problems;
pub mod program;

pub use ipm::{IpmOptions, SolveStatus};
pub use lower::{Lowered, ProgramDump, RealSdp};
pub use problems::{
    fidelity_ggm_bound, fidelity_gm_bound, fidelity_sdp, ggm_lower_bound, gm_lower_bound, ppt_mixture_monotone,
    BoundResult, Relaxation,
};
pub use program::{ConicProgram, LinearForm, LinearMap, MatExpr, Sense, VarId, VarKind};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{min_eigenvalue, CMatrix};

/// Absolute slack allowed by the feasibility audit, relative to `max(1, |entries|)`.
pub const AUDIT_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SdpOptions {
    pub ipm: IpmOptions,
    /// Solve over real matrices when every datum is real.
    pub allow_real: bool,
    /// Largest number of free scalars after lowering; the dense Schur
    /// complement needs `8 max_vars^2` bytes.
    pub max_vars: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { ipm: IpmOptions::default(), allow_real: true, max_vars: 16_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Audit {
    /// Largest `-lambda_min` over the PSD constraints (0 when all hold).
    pub psd_violation: f64,
    /// Largest residual over scalar and matrix equalities.
    pub equality_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// Objective of the program at the returned point.
    pub objective: f64,
    /// Objective of the solver's conic dual, mapped to the original sense.
    pub dual_bound: f64,
    pub values: Vec<CMatrix<f64>>,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    pub real_mode: bool,
    pub audit: Audit,
}

impl SdpSolution {
    pub fn is_usable(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::NearOptimal)
    }
}

/// Checks every constraint of `prog` at `values` without the solver.
pub fn audit(prog: &ConicProgram, values: &[CMatrix<f64>]) -> Audit {
    let mut psd = 0.0f64;
    for (_, e) in &prog.psd {
        let m = e.evaluate(values).hermitian_part();
        let scale = m.max_abs().max(1.0);
        psd = psd.max(-min_eigenvalue(&m) / scale);
    }
    let mut eq = 0.0f64;
    for (f, rhs) in &prog.equalities {
        eq = eq.max((f.evaluate(values) - rhs).abs());
    }
    for (_, e) in &prog.matrix_equalities {
        eq = eq.max(e.evaluate(values).max_abs());
    }
    let psd = psd.max(0.0);
    Audit { psd_violation: psd, equality_residual: eq, passed: psd <= AUDIT_TOL && eq <= AUDIT_TOL }
}

/// Lowers, solves and audits `prog`.
pub fn solve(prog: &ConicProgram, opts: &SdpOptions) -> Result<SdpSolution> {
    let lowered = Lowered::new(prog, opts.allow_real)?;
    let m = lowered.sdp.m();
    if m > opts.max_vars {
        return Err(Error::Budget(format!("{m} scalar variables exceed the limit of {}", opts.max_vars)));
    }
    let r = ipm::solve(&lowered.sdp, &opts.ipm);
    let values = lowered.recover(&r.y);
    let audit = audit(prog, &values);
    let mut status = r.status;
    if status == SolveStatus::Optimal && !audit.passed {
        status = SolveStatus::NearOptimal;
    }
    if status == SolveStatus::NearOptimal && audit.psd_violation.max(audit.equality_residual) > 1e-5 {
        status = SolveStatus::NumericalFailure;
    }
    Ok(SdpSolution {
        status,
        objective: prog.objective.evaluate(&values),
        dual_bound: lowered.sign * r.primal_objective + lowered.offset,
        values,
        relative_gap: r.relative_gap,
        primal_infeasibility: r.primal_infeasibility,
        dual_infeasibility: r.dual_infeasibility,
        iterations: r.iterations,
        real_mode: lowered.real_mode,
        audit,
    })
}

/// Like [`solve`], but turns unusable statuses into errors.
pub fn solve_checked(prog: &ConicProgram, opts: &SdpOptions) -> Result<SdpSolution> {
    let s = solve(prog, opts)?;
    if !s.is_usable() {
        return Err(Error::Solver(format!(
            "{} after {} iterations (gap {:.2e}, infeasibility {:.2e}/{:.2e})",
            s.status, s.iterations, s.relative_gap, s.primal_infeasibility, s.dual_infeasibility
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspaces::{ges_2xd_pow, GesParams};
    use crate::tensor::{eigh, HermitianOp, HilbertSpace, PureState};
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix<f64> {
        let a = CMatrix::from_fn(n, n, |_, _| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&a + &a.adjoint()).scale_real(&0.5)
    }

    fn random_state(space: &HilbertSpace, rank: usize, rng: &mut ChaCha8Rng) -> HermitianOp<f64> {
        let n = space.total();
        let g = CMatrix::from_fn(n, rank, |_, _| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let m = g.matmul(&g.adjoint());
        let t = m.trace().re;
        HermitianOp::new(space.clone(), m.scale_real(&(1.0 / t))).unwrap()
    }

    fn sqrt_psd(m: &CMatrix<f64>) -> CMatrix<f64> {
        let e = eigh(m);
        let n = m.rows();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::new(0.0, 0.0), |acc, k| {
                acc + e.vectors[(i, k)] * e.vectors[(j, k)].conj() * e.values[k].max(0.0).sqrt()
            })
        })
    }

    fn fidelity_oracle(rho: &CMatrix<f64>, sigma: &CMatrix<f64>) -> f64 {
        let r = sqrt_psd(rho);
        let inner = r.matmul(sigma).matmul(&r).hermitian_part();
        eigh(&inner).values.iter().map(|v| v.max(0.0).sqrt()).sum()
    }

    #[test]
    fn embedding_matches_complex_eigenvalue() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 4, 8] {
            let h = random_hermitian(n, &mut rng);
            let mut p = ConicProgram::new(Sense::Minimize);
            let rho = p.add_var("rho", VarKind::Hermitian(n));
            p.set_objective(LinearForm::new().plus(rho, h.clone()));
            p.add_psd("rho", MatExpr::var(rho, n));
            p.add_trace_equality(&[rho], 1.0);
            let s = solve_checked(&p, &SdpOptions::default()).unwrap();
            assert!(!s.real_mode);
            assert!((s.objective - min_eigenvalue(&h)).abs() < 1e-7, "n={n}");
            assert!(s.audit.passed);
        }
    }

    #[test]
    fn fidelity_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let o = SdpOptions::default();
        for (dims, r1, r2) in [(vec![2], 2, 1), (vec![2, 2], 4, 2), (vec![2, 3], 2, 6), (vec![2, 2, 2], 3, 8)] {
            let space = HilbertSpace::new(dims).unwrap();
            let a = random_state(&space, r1, &mut rng);
            let b = random_state(&space, r2, &mut rng);
            let f = fidelity_sdp(&a, &b, &o).unwrap().value;
            let g = fidelity_sdp(&b, &a, &o).unwrap().value;
            let oracle = fidelity_oracle(a.matrix(), b.matrix());
            assert!((f - oracle).abs() < 1e-6, "{f} vs {oracle}");
            assert!((f - g).abs() < 1e-7);
        }
    }

    #[test]
    fn fidelity_trivial_cases() {
        let o = SdpOptions::default();
        let q = HilbertSpace::new(vec![2]).unwrap();
        let zero = HermitianOp::outer(&PureState::basis(q.clone(), &[0]));
        let one = HermitianOp::outer(&PureState::basis(q.clone(), &[1]));
        let mixed = HermitianOp::identity(q).scale(&0.5);
        assert!((fidelity_sdp(&zero, &zero, &o).unwrap().value - 1.0).abs() < 1e-7);
        assert!(fidelity_sdp(&zero, &one, &o).unwrap().value < 1e-6);
        assert!((fidelity_sdp(&zero, &mixed, &o).unwrap().value - 0.5f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn real_reduction_agrees_with_embedding() {
        let s = ges_2xd_pow::<f64>(&GesParams::new(3, 3, std::f64::consts::FRAC_PI_2)).unwrap();
        let real = gm_lower_bound(&s, &SdpOptions::default()).unwrap();
        let cplx = gm_lower_bound(&s, &SdpOptions { allow_real: false, ..Default::default() }).unwrap();
        assert!(real.solution.real_mode && !cplx.solution.real_mode);
        assert!((real.value - cplx.value).abs() < 1e-7);
        assert!(real.value < 3.0 / 7.0 - 5e-3);
    }

    #[test]
    fn oversized_programs_are_refused() {
        let s = ges_2xd_pow::<f64>(&GesParams::new(3, 3, std::f64::consts::FRAC_PI_2)).unwrap();
        let r = gm_lower_bound(&s, &SdpOptions { max_vars: 100, ..Default::default() });
        assert!(matches!(r, Err(Error::Budget(_))));
    }

    #[test]
    fn ppt_states_are_not_detected() {
        let o = SdpOptions::default();
        let space = HilbertSpace::uniform(3, 2).unwrap();
        let product = HermitianOp::outer(&PureState::basis(space.clone(), &[0, 1, 0]));
        assert!(ppt_mixture_monotone(&product, false, &o).unwrap().value < 1e-7);
        let mixed = HermitianOp::identity(space.clone()).scale(&(1.0 / 8.0));
        assert!(fidelity_gm_bound(&mixed, &o).unwrap().value < 1e-7);
    }

    #[test]
    fn inconsistent_program_is_reported() {
        let mut p = ConicProgram::new(Sense::Minimize);
        let x = p.add_var("x", VarKind::Hermitian(2));
        p.set_objective(LinearForm::new().plus(x, CMatrix::identity(2)));
        p.add_psd("x", MatExpr::var(x, 2));
        p.add_trace_equality(&[x], -1.0);
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert!(!s.is_usable() || !s.audit.passed);
        assert!(solve_checked(&p, &SdpOptions::default()).is_err());
    }

    #[test]
    fn dump_lists_upper_triangles() {
        let s = ges_2xd_pow::<f64>(&GesParams::new(2, 3, std::f64::consts::FRAC_PI_2)).unwrap();
        let prog = problems::subspace_program(&s, &crate::tensor::Bipartition::all(2).unwrap());
        let low = Lowered::new(&prog, true).unwrap();
        let dump = low.to_dump();
        assert_eq!(dump.m, 6 * 7 / 2 - 1);
        assert_eq!(dump.blocks.len(), 2);
        assert!(dump.blocks.iter().all(|b| b.coefficients.iter().all(|c| c.1 <= c.2)));
        let json = serde_json::to_value(&dump).unwrap();
        assert_eq!(json["format"], "real-dual-sparse");
    }
}
