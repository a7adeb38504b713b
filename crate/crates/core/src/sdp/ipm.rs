//! Primal-dual interior-point method for [`RealSdp`]: infeasible start, HKM
//! search direction, Mehrotra predictor-corrector.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::linalg::triangular_solve::solve_lower_triangular_in_place;
use faer::{Mat, Par, Side};
use serde::{Deserialize, Serialize};

use super::lower::{RealSdp, Triplet};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IpmOptions {
    /// Target for the relative gap and both relative infeasibilities.
    pub tol: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Print one line per iteration to stderr.
    pub trace: bool,
}

impl Default for IpmOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 120, step_fraction: 0.95, trace: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    NumericalFailure,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::NearOptimal => "near-optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NumericalFailure => "numerical-failure",
        })
    }
}

/// Thresholds separating the status classes.
pub const OPTIMAL_GAP: f64 = 1e-7;
const NEAR_GAP: f64 = 1e-4;
const NEAR_INFEAS: f64 = 1e-5;

#[derive(Clone, Debug)]
pub struct IpmResult {
    pub status: SolveStatus,
    pub y: Vec<f64>,
    pub x: Vec<Mat<f64>>,
    /// `sum_j tr(C_j X_j)`.
    pub primal_objective: f64,
    /// `b'y`.
    pub dual_objective: f64,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

fn dense(n: usize, t: &[Triplet]) -> Mat<f64> {
    let mut m = Mat::zeros(n, n);
    for &(r, c, v) in t {
        m[(r as usize, c as usize)] += v;
    }
    m
}

fn add_sparse(m: &mut Mat<f64>, t: &[Triplet], alpha: f64) {
    for &(r, c, v) in t {
        m[(r as usize, c as usize)] += alpha * v;
    }
}

/// `tr(A M)` for symmetric sparse `A`.
fn trace_sparse(t: &[Triplet], m: &Mat<f64>) -> f64 {
    t.iter().map(|&(r, c, v)| v * m[(c as usize, r as usize)]).sum()
}

fn sym(m: &Mat<f64>) -> Mat<f64> {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

fn frob(m: &Mat<f64>) -> f64 {
    m.norm_l2()
}

fn inner(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        let (ca, cb) = (a.col_as_slice(j), b.col_as_slice(j));
        s += ca.iter().zip(cb).map(|(x, y)| x * y).sum::<f64>();
    }
    s
}

fn inverse_spd(s: &Mat<f64>) -> Option<Mat<f64>> {
    s.llt(Side::Lower).ok().map(|l| sym(&l.inverse()))
}

/// Largest `alpha` with `X + alpha dX >= 0` (infinite when `dX >= 0`).
fn max_step(x: &Mat<f64>, dx: &Mat<f64>) -> f64 {
    let Ok(llt) = x.llt(Side::Lower) else { return 0.0 };
    let l = llt.L();
    let mut w = dx.clone();
    solve_lower_triangular_in_place(l, w.as_mut(), Par::Seq);
    let mut w = w.transpose().to_owned();
    solve_lower_triangular_in_place(l, w.as_mut(), Par::Seq);
    let w = sym(&w);
    let Ok(ev) = w.self_adjoint_eigenvalues(Side::Lower) else { return 0.0 };
    let lmin = ev.iter().copied().fold(f64::INFINITY, f64::min);
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

struct Snapshot {
    pobj: f64,
    dobj: f64,
    gap: f64,
    pinf: f64,
    dinf: f64,
    y: Vec<f64>,
    x: Vec<Mat<f64>>,
}

impl Snapshot {
    fn score(&self) -> f64 {
        self.gap.max(self.pinf).max(self.dinf)
    }
}

struct Direction {
    dy: Vec<f64>,
    ds: Vec<Mat<f64>>,
    dx: Vec<Mat<f64>>,
}

struct Iterate<'a> {
    p: &'a RealSdp,
    x: Vec<Mat<f64>>,
    s: Vec<Mat<f64>>,
    y: Vec<f64>,
    c: Vec<Mat<f64>>,
}

impl Iterate<'_> {
    fn residuals(&self) -> (Vec<f64>, Vec<Mat<f64>>) {
        let p = self.p;
        let mut rp = p.b.clone();
        for (blk, list) in p.coeffs.iter().enumerate() {
            for (i, a) in list {
                rp[*i] -= trace_sparse(a, &self.x[blk]);
            }
        }
        let rd = (0..p.block_sizes.len())
            .map(|blk| {
                let mut r = &self.c[blk] - &self.s[blk];
                for (i, a) in &p.coeffs[blk] {
                    add_sparse(&mut r, a, -self.y[*i]);
                }
                r
            })
            .collect();
        (rp, rd)
    }

    /// Schur complement `M_ik = sum_j tr(A_ij X_j A_kj S_j^{-1})`.
    fn schur(&self, sinv: &[Mat<f64>]) -> Mat<f64> {
        let m = self.p.m();
        let mut out = Mat::<f64>::zeros(m, m);
        for (blk, list) in self.p.coeffs.iter().enumerate() {
            let n = self.p.block_sizes[blk];
            let x: Vec<f64> = (0..n * n).map(|k| self.x[blk][(k / n, k % n)]).collect();
            let si: Vec<f64> = (0..n * n).map(|k| sinv[blk][(k / n, k % n)]).collect();
            for (a, (i, ai)) in list.iter().enumerate() {
                for (k, ak) in &list[a..] {
                    let mut acc = 0.0;
                    for &(p, q, v) in ai {
                        let (p, q) = (p as usize, q as usize);
                        for &(r, s, w) in ak {
                            acc += v * w * x[q * n + r as usize] * si[s as usize * n + p];
                        }
                    }
                    out[(*i, *k)] += acc;
                }
            }
        }
        for i in 0..m {
            for k in i + 1..m {
                let v = out[(i, k)] + out[(k, i)];
                out[(i, k)] = v;
                out[(k, i)] = v;
            }
        }
        out
    }

    fn direction(
        &self,
        factor: &faer::linalg::solvers::Llt<f64>,
        sinv: &[Mat<f64>],
        rp: &[f64],
        rd: &[Mat<f64>],
        xrs: &[Mat<f64>],
        g: &[Mat<f64>],
    ) -> Direction {
        let p = self.p;
        let mut rhs = Mat::<f64>::from_fn(p.m(), 1, |i, _| rp[i]);
        for (blk, list) in p.coeffs.iter().enumerate() {
            let h = &g[blk] - &xrs[blk];
            for (i, a) in list {
                rhs[(*i, 0)] -= trace_sparse(a, &h);
            }
        }
        let sol = factor.solve(&rhs);
        let dy: Vec<f64> = (0..p.m()).map(|i| sol[(i, 0)]).collect();
        let mut ds = Vec::with_capacity(rd.len());
        let mut dx = Vec::with_capacity(rd.len());
        for blk in 0..rd.len() {
            let mut d = rd[blk].clone();
            for (i, a) in &p.coeffs[blk] {
                add_sparse(&mut d, a, -dy[*i]);
            }
            let t = &self.x[blk] * &d * &sinv[blk];
            dx.push(sym(&(&g[blk] - &t)));
            ds.push(d);
        }
        Direction { dy, ds, dx }
    }
}

fn factor_schur(m: &Mat<f64>) -> Option<faer::linalg::solvers::Llt<f64>> {
    if let Ok(l) = m.llt(Side::Lower) {
        return Some(l);
    }
    let n = m.nrows();
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(1e-300, f64::max);
    let mut reg = 1e-14;
    while reg <= 1e-6 {
        let mut r = m.clone();
        for i in 0..n {
            r[(i, i)] += reg * scale;
        }
        if let Ok(l) = r.llt(Side::Lower) {
            return Some(l);
        }
        reg *= 100.0;
    }
    None
}

pub fn solve(p: &RealSdp, opts: &IpmOptions) -> IpmResult {
    let nb = p.block_sizes.len();
    let m = p.m();
    let c: Vec<Mat<f64>> = (0..nb).map(|j| dense(p.block_sizes[j], &p.constant[j])).collect();
    let n_total: usize = p.block_sizes.iter().sum();
    let bnorm = p.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cnorm = c.iter().map(frob).fold(0.0, f64::max);

    let mut a_norm = vec![0.0f64; nb];
    let mut ratio = vec![0.0f64; nb];
    for (blk, list) in p.coeffs.iter().enumerate() {
        for (i, a) in list {
            let f = a.iter().map(|t| t.2 * t.2).sum::<f64>().sqrt();
            a_norm[blk] = a_norm[blk].max(f);
            ratio[blk] = ratio[blk].max((1.0 + p.b[*i].abs()) / (1.0 + f));
        }
    }
    let mut x = Vec::with_capacity(nb);
    let mut s = Vec::with_capacity(nb);
    for j in 0..nb {
        let n = p.block_sizes[j] as f64;
        let xi = 10f64.max(n.sqrt()).max(n.sqrt() * ratio[j]);
        let eta = 10f64.max(n.sqrt()).max(a_norm[j].max(frob(&c[j])));
        x.push(Mat::<f64>::identity(p.block_sizes[j], p.block_sizes[j]) * faer::Scale(xi));
        s.push(Mat::<f64>::identity(p.block_sizes[j], p.block_sizes[j]) * faer::Scale(eta));
    }
    let mut it = Iterate { p, x, s, y: vec![0.0; m], c };

    let mut status = SolveStatus::NumericalFailure;
    let mut iterations = 0;
    let mut stalls = 0;
    let mut since_best = 0;
    let mut best: Option<Snapshot> = None;
    loop {
        let (rp, rd) = it.residuals();
        let pobj = (0..nb).map(|j| inner(&it.c[j], &it.x[j])).sum::<f64>();
        let dobj = p.b.iter().zip(&it.y).map(|(b, y)| b * y).sum::<f64>();
        let snap = Snapshot {
            pobj,
            dobj,
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
            pinf: rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + bnorm),
            dinf: rd.iter().map(frob).fold(0.0, f64::max) / (1.0 + cnorm),
            y: Vec::new(),
            x: Vec::new(),
        };
        let mu = (0..nb).map(|j| inner(&it.x[j], &it.s[j])).sum::<f64>() / n_total.max(1) as f64;
        let done = snap.score() <= opts.tol;
        if best.as_ref().is_none_or(|b| snap.score() < b.score()) {
            best = Some(Snapshot { y: it.y.clone(), x: it.x.clone(), ..snap });
            since_best = 0;
        } else {
            since_best += 1;
        }
        if done {
            status = SolveStatus::Optimal;
            break;
        }
        let huge = it.y.iter().chain(it.x.iter().flat_map(|x| (0..x.ncols()).map(move |k| &x[(k, k)])));
        if huge.fold(0.0f64, |a, v| a.max(v.abs())) > 1e12 {
            status = SolveStatus::Infeasible;
            break;
        }
        let stagnant = since_best >= 6 && best.as_ref().is_some_and(|b| b.score() < 1e-6);
        if iterations >= opts.max_iter || stalls >= 5 || stagnant {
            break;
        }
        iterations += 1;

        let Some(sinv) = it.s.iter().map(inverse_spd).collect::<Option<Vec<_>>>() else { break };
        let schur = it.schur(&sinv);
        let Some(factor) = factor_schur(&schur) else { break };
        let xrs: Vec<Mat<f64>> = (0..nb).map(|j| &it.x[j] * &rd[j] * &sinv[j]).collect();

        let g_aff: Vec<Mat<f64>> = it.x.iter().map(|x| -x).collect();
        let aff = it.direction(&factor, &sinv, &rp, &rd, &xrs, &g_aff);
        let ap = (0..nb).map(|j| max_step(&it.x[j], &aff.dx[j])).fold(f64::INFINITY, f64::min);
        let ad = (0..nb).map(|j| max_step(&it.s[j], &aff.ds[j])).fold(f64::INFINITY, f64::min);
        let (ap, ad) = ((opts.step_fraction * ap).min(1.0), (opts.step_fraction * ad).min(1.0));
        let mu_aff = (0..nb)
            .map(|j| {
                let xa = &it.x[j] + &aff.dx[j] * faer::Scale(ap);
                let sa = &it.s[j] + &aff.ds[j] * faer::Scale(ad);
                inner(&xa, &sa)
            })
            .sum::<f64>()
            / n_total.max(1) as f64;
        let sigma = (mu_aff.max(0.0) / mu).powi(3).min(1.0);

        let g: Vec<Mat<f64>> = (0..nb)
            .map(|j| {
                &sinv[j] * faer::Scale(sigma * mu) - &it.x[j] - &aff.dx[j] * &aff.ds[j] * &sinv[j]
            })
            .collect();
        let dir = it.direction(&factor, &sinv, &rp, &rd, &xrs, &g);
        let ap = (0..nb).map(|j| max_step(&it.x[j], &dir.dx[j])).fold(f64::INFINITY, f64::min);
        let ad = (0..nb).map(|j| max_step(&it.s[j], &dir.ds[j])).fold(f64::INFINITY, f64::min);
        let (ap, ad) = ((opts.step_fraction * ap).min(1.0), (opts.step_fraction * ad).min(1.0));
        if opts.trace {
            eprintln!(
                "{iterations:3} pobj {:+.10e} dobj {:+.10e} gap {:.1e} pinf {:.1e} dinf {:.1e} mu {mu:.1e} sigma {sigma:.2e} step {ap:.2e}/{ad:.2e}",
                snap.pobj, snap.dobj, snap.gap, snap.pinf, snap.dinf
            );
        }
        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
        } else {
            stalls = 0;
        }
        for j in 0..nb {
            it.x[j] = sym(&(&it.x[j] + &dir.dx[j] * faer::Scale(ap)));
            it.s[j] = sym(&(&it.s[j] + &dir.ds[j] * faer::Scale(ad)));
        }
        for (y, d) in it.y.iter_mut().zip(&dir.dy) {
            *y += ad * d;
        }
    }
    let best = best.expect("at least one iterate");
    if status == SolveStatus::NumericalFailure {
        if best.score() <= OPTIMAL_GAP {
            status = SolveStatus::Optimal;
        } else if best.gap <= NEAR_GAP && best.pinf.max(best.dinf) <= NEAR_INFEAS {
            status = SolveStatus::NearOptimal;
        }
    }
    IpmResult {
        status,
        y: best.y,
        x: best.x,
        primal_objective: best.pobj,
        dual_objective: best.dobj,
        relative_gap: best.gap,
        primal_infeasibility: best.pinf,
        dual_infeasibility: best.dinf,
        iterations,
    }
}
