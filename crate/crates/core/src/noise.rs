//! Noisy GES states `(1-p) P/d_G + p I/D` and their white-noise thresholds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::witness_threshold;
use crate::scalar::{Real, Scalar};
use crate::sdp::{fidelity_ggm_bound, fidelity_gm_bound, ppt_mixture_monotone, SdpOptions};
use crate::tensor::{HermitianOp, Subspace};

/// Detector values at or below this count as "not detected".
pub const DETECTION_THRESHOLD: f64 = 1e-7;
/// Default bracket width for bisection.
pub const DEFAULT_TOL_P: f64 = 2e-3;
const PRESCAN: usize = 8;

/// `(1-p) P/d_G + p I/D` from the projector onto the subspace.
pub fn noisy_state_from_projector<T: Scalar>(projector: &HermitianOp<T>, dim_g: usize, p: T) -> Result<HermitianOp<T>> {
    if p < T::zero() || p > T::one() {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    if dim_g == 0 {
        return Err(Error::InvalidParameter("empty subspace".into()));
    }
    let total = projector.dim();
    let signal = projector.scale(&((T::one() - p.clone()) / T::from_usize(dim_g)));
    let noise = HermitianOp::identity(projector.space().clone()).scale(&(p / T::from_usize(total)));
    signal.add(&noise)
}

pub fn make_noisy_state<T: Real>(subspace: &Subspace<T>, p: T) -> Result<HermitianOp<T>> {
    noisy_state_from_projector(subspace.projector(), subspace.dim(), p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Genuine multipartite entanglement; the witness uses the GGM of the subspace.
    Gme,
    /// Entanglement; the witness uses the GM of the subspace.
    Ent,
}

impl std::str::FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gme" => Ok(Target::Gme),
            "ent" => Ok(Target::Ent),
            _ => Err(Error::InvalidParameter(format!("unknown target '{s}' (expected gme or ent)"))),
        }
    }
}

fn witness_denominator<T: Scalar>(total: usize, dim_g: usize, epsilon: &T) -> Result<T> {
    let bound = T::one() - T::from_usize(dim_g) / T::from_usize(total);
    if *epsilon < T::zero() || *epsilon >= bound {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside [0, 1 - d_G/D)")));
    }
    Ok((T::one() - epsilon.clone()) * T::from_usize(total) - T::from_usize(dim_g))
}

/// `tr(W state)` with `W = [(1-eps) I - P] / [(1-eps) D - d_G]`.
pub fn witness_value<T: Scalar>(
    projector: &HermitianOp<T>,
    dim_g: usize,
    state: &HermitianOp<T>,
    epsilon: T,
) -> Result<T> {
    let total = projector.dim();
    let den = witness_denominator(total, dim_g, &epsilon)?;
    let num = (T::one() - epsilon) * state.trace() - projector.trace_product(state);
    Ok(num / den)
}

/// Witness value on the noisy state: `[p (D-d_G)/D - eps] / [(1-eps) D - d_G]`.
pub fn witness_value_closed<T: Scalar>(total: usize, dim_g: usize, epsilon: T, p: T) -> Result<T> {
    let den = witness_denominator(total, dim_g, &epsilon)?;
    let frac = T::from_usize(total - dim_g) / T::from_usize(total);
    Ok((p * frac - epsilon) / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Witness,
    Pptmix,
    FidelityGm,
    FidelityGgm,
}

impl Method {
    /// What a positive value of the detector certifies.
    pub fn target(self) -> Option<Target> {
        match self {
            Method::Witness => None,
            Method::Pptmix | Method::FidelityGgm => Some(Target::Gme),
            Method::FidelityGm => Some(Target::Ent),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Witness => "witness",
            Method::Pptmix => "pptmix",
            Method::FidelityGm => "fidelity-GM",
            Method::FidelityGgm => "fidelity-GGM",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub p_star: f64,
    pub method: Method,
    pub target: Target,
    /// `[lo, hi]` with the detector positive at `lo` and not at `hi`.
    pub bracket: (f64, f64),
    pub value_lo: f64,
    pub value_hi: f64,
    /// Set when the detector is not positive even at `p = 0`.
    pub never_detected: bool,
    /// Set when the sampled values were not monotone in `p`.
    pub non_monotone: bool,
    /// Every `(p, value)` evaluated, in order.
    pub samples: Vec<(f64, f64)>,
}

/// Witness threshold `D eps / (D - d_G)`, with `eps` the GGM (GME) or GM (ENT)
/// of the subspace.
pub fn threshold_witness<T: Scalar>(total: usize, dim_g: usize, target: Target, epsilon: T) -> Result<(T, ThresholdResult)> {
    witness_denominator(total, dim_g, &epsilon)?;
    let p = witness_threshold(total, dim_g, epsilon)?;
    let pf = p.as_f64();
    Ok((
        p,
        ThresholdResult {
            p_star: pf,
            method: Method::Witness,
            target,
            bracket: (pf, pf),
            value_lo: 0.0,
            value_hi: 0.0,
            never_detected: false,
            non_monotone: false,
            samples: Vec::new(),
        },
    ))
}

/// Detector value on the noisy state at mixing weight `p`.
pub fn detector_value(subspace: &Subspace<f64>, method: Method, p: f64, opts: &SdpOptions) -> Result<f64> {
    let rho = make_noisy_state(subspace, p)?;
    Ok(match method {
        Method::Pptmix => ppt_mixture_monotone(&rho, false, opts)?.value,
        Method::FidelityGm => fidelity_gm_bound(&rho, opts)?.value,
        Method::FidelityGgm => fidelity_ggm_bound(&rho, opts)?.value,
        Method::Witness => return Err(Error::InvalidParameter("witness thresholds are closed-form".into())),
    })
}

/// Largest `p` at which `detect` still reports a positive value, located by
/// an 8-point scan of `[0, 1]` followed by bisection down to `tol_p`.
pub fn bisect_threshold(
    method: Method,
    target: Target,
    tol_p: f64,
    mut detect: impl FnMut(f64) -> Result<f64>,
) -> Result<ThresholdResult> {
    if !(tol_p > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol_p} must be positive")));
    }
    let mut samples = Vec::new();
    let mut eval = |p: f64, samples: &mut Vec<(f64, f64)>| -> Result<f64> {
        let v = detect(p)?;
        samples.push((p, v));
        Ok(v)
    };
    let grid: Vec<f64> = (0..PRESCAN).map(|k| k as f64 / (PRESCAN - 1) as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&p| eval(p, &mut samples)).collect::<Result<_>>()?;
    let positive = |v: f64| v > DETECTION_THRESHOLD;
    if !positive(values[0]) {
        return Ok(ThresholdResult {
            p_star: 0.0,
            method,
            target,
            bracket: (0.0, 0.0),
            value_lo: values[0],
            value_hi: values[0],
            never_detected: true,
            non_monotone: values.iter().any(|&v| positive(v)),
            samples,
        });
    }
    let Some(k) = (0..PRESCAN - 1).find(|&k| positive(values[k]) && !positive(values[k + 1])) else {
        // Detected everywhere, including the maximally mixed state.
        return Ok(ThresholdResult {
            p_star: 1.0,
            method,
            target,
            bracket: (1.0, 1.0),
            value_lo: values[PRESCAN - 1],
            value_hi: values[PRESCAN - 1],
            never_detected: false,
            non_monotone: true,
            samples,
        });
    };
    let mut non_monotone = values[k + 1..].iter().any(|&v| positive(v))
        || values[..=k].windows(2).any(|w| w[1] > w[0] + DETECTION_THRESHOLD);
    let (mut lo, mut hi) = (grid[k], grid[k + 1]);
    let (mut vlo, mut vhi) = (values[k], values[k + 1]);
    while hi - lo > tol_p {
        let mid = 0.5 * (lo + hi);
        let v = eval(mid, &mut samples)?;
        if positive(v) {
            non_monotone |= v > vlo + DETECTION_THRESHOLD;
            lo = mid;
            vlo = v;
        } else {
            hi = mid;
            vhi = v;
        }
    }
    Ok(ThresholdResult {
        p_star: 0.5 * (lo + hi),
        method,
        target,
        bracket: (lo, hi),
        value_lo: vlo,
        value_hi: vhi,
        never_detected: false,
        non_monotone,
        samples,
    })
}

/// White-noise threshold of an SDP detector on the noisy state family.
pub fn threshold_bisect(
    subspace: &Subspace<f64>,
    method: Method,
    tol_p: f64,
    opts: &SdpOptions,
) -> Result<ThresholdResult> {
    let target = method
        .target()
        .ok_or_else(|| Error::InvalidParameter("witness thresholds are closed-form".into()))?;
    bisect_threshold(method, target, tol_p, |p| detector_value(subspace, method, p, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspaces::{ges_2xd_pow, ges_projector_exact, GesParams};
    use num_rational::BigRational;
    use std::f64::consts::FRAC_PI_2;

    fn s33() -> Subspace<f64> {
        ges_2xd_pow::<f64>(&GesParams::new(3, 3, FRAC_PI_2)).unwrap()
    }

    #[test]
    fn noisy_state_spectrum() {
        let s = s33();
        let d = 18.0;
        for p in [0.0, 0.3, 0.5, 1.0] {
            let rho = make_noisy_state(&s, p).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            let ev = rho.eigenvalues();
            assert!((ev[0] - p / d).abs() < 1e-12);
            assert!((ev[17] - ((1.0 - p) / 4.0 + p / d)).abs() < 1e-12);
        }
        let mixed = make_noisy_state(&s, 1.0).unwrap();
        assert!((mixed.matrix()[(3, 3)].re - 1.0 / d).abs() < 1e-15);
        assert!(make_noisy_state(&s, 1.5).is_err());
    }

    #[test]
    fn witness_closed_form_matches_trace() {
        let s = s33();
        for (k, p) in [0.0, 0.13, 0.321, 0.77, 1.0].into_iter().enumerate() {
            let eps = 0.05 * k as f64;
            let rho = make_noisy_state(&s, p).unwrap();
            let direct = witness_value(s.projector(), 4, &rho, eps).unwrap();
            let closed = witness_value_closed(18, 4, eps, p).unwrap();
            assert!((direct - closed).abs() < 1e-10);
        }
        assert!(witness_value_closed(18, 4, 0.25, 0.0).unwrap() < 0.0);
        assert!(witness_value_closed(18, 4, 0.25, 1.0).unwrap() > 0.0);
        assert!(witness_value_closed(18, 4, 0.8, 0.5).is_err());
    }

    #[test]
    fn witness_vanishes_at_threshold_exactly() {
        let proj = ges_projector_exact::<BigRational>(3, 3).unwrap();
        let eps = BigRational::from_ratio(1, 4);
        let (p, r) = threshold_witness(18, 4, Target::Gme, eps.clone()).unwrap();
        assert_eq!(p, BigRational::from_ratio(9, 28));
        assert_eq!(r.method, Method::Witness);
        let rho = noisy_state_from_projector(&proj, 4, p).unwrap();
        assert_eq!(witness_value(&proj, 4, &rho, eps).unwrap(), BigRational::from_ratio(0, 1));
    }

    #[test]
    fn bisection_brackets_a_step() {
        let r = bisect_threshold(Method::Pptmix, Target::Gme, 1e-3, |p| Ok((0.4 - p).max(0.0))).unwrap();
        assert!((r.p_star - 0.4).abs() <= 1e-3);
        assert!(r.bracket.1 - r.bracket.0 <= 1e-3);
        assert!(!r.non_monotone && !r.never_detected);
        let never = bisect_threshold(Method::Pptmix, Target::Gme, 1e-3, |_| Ok(0.0)).unwrap();
        assert!(never.never_detected && never.p_star == 0.0);
        let bumpy =
            bisect_threshold(Method::Pptmix, Target::Gme, 1e-3, |p| Ok(if (0.3..0.6).contains(&p) { 0.0 } else { 1.0 - p }))
                .unwrap();
        assert!(bumpy.non_monotone && bumpy.p_star < 0.3);
    }
}
