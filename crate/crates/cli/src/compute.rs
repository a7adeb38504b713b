//! Quantities shared by `measure`, `noise-threshold`, `exact` and `reproduce`.

use std::f64::consts::FRAC_PI_2;

use serde_json::{json, Value};

use gesq_core::exact::{antisym_ggm, antisym_gm, ggm_ges_exact, gm_ces_exact, gm_upper_bound_S, witness_threshold};
use gesq_core::noise::{threshold_bisect, Method, Target, ThresholdResult};
use gesq_core::sdp::{
    fidelity_ggm_bound, fidelity_gm_bound, ggm_lower_bound, gm_lower_bound, ppt_mixture_monotone, BoundResult,
    SdpOptions, SdpSolution,
};
use gesq_core::subspaces::{build, Family};
use gesq_core::tensor::json::{state_to_doc, StateDoc};
use gesq_core::tensor::{HermitianOp, Subspace};
use gesq_core::variational::{ggm_via_cuts, seesaw_gm, SeesawConfig, SeesawResult};
use gesq_core::{Exact, Scalar};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Gm,
    Ggm,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Gm => "GM",
            Measure::Ggm => "GGM",
        }
    }
}

/// Family member with its construction parameters.
#[derive(Clone, Debug)]
pub struct Spec {
    pub family: Family,
    pub n: usize,
    pub d: usize,
    pub theta: f64,
}

impl Spec {
    pub fn build(&self) -> Result<Subspace<f64>, CliError> {
        Ok(build::<f64>(self.family, self.n, self.d, self.theta)?)
    }

    pub fn is_right_angle(&self) -> bool {
        self.theta == FRAC_PI_2
    }
}

/// A computed number, its exact rational form when known, and solver details.
#[derive(Clone, Debug, Default)]
pub struct Value64 {
    pub value: f64,
    pub exact: Option<String>,
    pub details: Vec<(String, Value)>,
}

impl Value64 {
    pub fn plain(value: f64) -> Self {
        Self { value, ..Default::default() }
    }

    pub fn with(mut self, key: &str, v: Value) -> Self {
        self.details.push((key.into(), v));
        self
    }
}

fn sdp_details(s: &SdpSolution) -> Value {
    json!({
        "status": s.status.to_string(),
        "iterations": s.iterations,
        "relative_gap": s.relative_gap,
        "primal_infeasibility": s.primal_infeasibility,
        "dual_infeasibility": s.dual_infeasibility,
        "real_mode": s.real_mode,
        "audit_passed": s.audit.passed,
    })
}

fn bound(b: BoundResult) -> Value64 {
    Value64::plain(b.value).with("solver", sdp_details(&b.solution))
}

fn exact_ggm_s(spec: &Spec) -> Option<Exact> {
    if !spec.is_right_angle() {
        return None;
    }
    let c = Exact::cos_pi_over(spec.d as u32)?;
    Some((Exact::from_ratio(1, 1) - c) / Exact::from_ratio(2, 1))
}

/// Closed-form value when one exists for this family and measure.
pub fn closed_form(spec: &Spec, m: Measure) -> Result<Option<Value64>, CliError> {
    let single = |v: f64, exact: Option<Exact>| Value64 { value: v, exact: exact.map(|e| e.to_string()), ..Default::default() };
    Ok(match (spec.family, m) {
        (Family::S, Measure::Ggm) => {
            Some(single(ggm_ges_exact::<f64>(spec.n, spec.d, spec.theta)?.value, exact_ggm_s(spec)))
        }
        (Family::S, Measure::Gm) if spec.n == 2 => Some(single(gm_ces_exact::<f64>(spec.d, spec.theta)?.value, None)),
        (Family::Ces, _) => {
            let g = gm_ces_exact::<f64>(spec.d, spec.theta)?;
            Some(single(g.value, None).with("single_vector", json!(g.single_vector)))
        }
        (Family::Asym, Measure::Gm) => {
            Some(single(antisym_gm::<f64>(spec.n)?, Some(antisym_gm::<Exact>(spec.n)?)))
        }
        (Family::Asym, Measure::Ggm) => {
            Some(single(antisym_ggm::<f64>(spec.n)?, Some(antisym_ggm::<Exact>(spec.n)?)))
        }
        _ => None,
    })
}

pub fn gm_bound(spec: &Spec) -> Result<Value64, CliError> {
    if spec.family != Family::S || !spec.is_right_angle() {
        return Err(CliError::Usage("the GM upper bound is only available for S at theta = pi/2".into()));
    }
    let value = gm_upper_bound_S::<f64>(spec.n, spec.d)?;
    let exact = gm_upper_bound_S::<Exact>(spec.n, spec.d).ok().map(|e| e.to_string());
    Ok(Value64 { value, exact, ..Default::default() })
}

fn seesaw_record(r: &SeesawResult<f64>, cfg: &SeesawConfig) -> Value64 {
    let factors: Vec<StateDoc> = r.optimizer.iter().map(state_to_doc).collect();
    Value64::plain(r.entanglement)
        .with("restarts", json!(cfg.restarts))
        .with("best_restart", json!(r.best_restart))
        .with("converged", json!(r.converged))
        .with("groups", json!(r.groups))
        .with("factors", json!(factors))
}

pub fn seesaw(s: &Subspace<f64>, m: Measure, cfg: &SeesawConfig) -> Result<Value64, CliError> {
    Ok(match m {
        Measure::Gm => {
            let r = seesaw_gm(s, cfg)?;
            seesaw_record(&r, cfg)
        }
        Measure::Ggm => {
            let (_, cut, per_cut) = ggm_via_cuts(s, cfg)?;
            let best = per_cut.iter().find(|(c, _)| *c == cut).map(|(_, r)| r).expect("achieving cut is listed");
            let values: Vec<Value> =
                per_cut.iter().map(|(c, r)| json!({"cut": c.to_string(), "value": r.entanglement})).collect();
            seesaw_record(best, cfg).with("cut", json!(cut.to_string())).with("cuts", Value::Array(values))
        }
    })
}

pub fn sdp(s: &Subspace<f64>, m: Measure, opts: &SdpOptions) -> Result<Value64, CliError> {
    Ok(match m {
        Measure::Gm => bound(gm_lower_bound(s, opts)?),
        Measure::Ggm => {
            let (v, per_cut) = ggm_lower_bound(s, opts)?;
            let cuts: Vec<Value> = per_cut
                .iter()
                .map(|(c, b)| json!({"cut": c.to_string(), "value": b.value, "solver": sdp_details(&b.solution)}))
                .collect();
            Value64 { value: v, exact: None, details: vec![("cuts".into(), Value::Array(cuts))] }
        }
    })
}

/// Detectors evaluated on a mixed state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detector {
    Pptmix { fully: bool },
    Fidelity(Measure),
}

pub fn detector(rho: &HermitianOp<f64>, det: Detector, opts: &SdpOptions) -> Result<Value64, CliError> {
    Ok(bound(match det {
        Detector::Pptmix { fully } => ppt_mixture_monotone(rho, fully, opts)?,
        Detector::Fidelity(Measure::Gm) => fidelity_gm_bound(rho, opts)?,
        Detector::Fidelity(Measure::Ggm) => fidelity_ggm_bound(rho, opts)?,
    }))
}

/// The subspace entanglement used as the witness offset: closed form when
/// available, otherwise the seesaw value.
pub fn witness_epsilon(spec: &Spec, s: &Subspace<f64>, target: Target, cfg: &SeesawConfig) -> Result<Value64, CliError> {
    let m = match target {
        Target::Gme => Measure::Ggm,
        Target::Ent => Measure::Gm,
    };
    if let Some(v) = closed_form(spec, m)? {
        return Ok(v.with("epsilon_method", json!("exact")));
    }
    Ok(seesaw(s, m, cfg)?.with("epsilon_method", json!("seesaw")))
}

pub fn witness(s: &Subspace<f64>, target: Target, eps: &Value64) -> Result<Value64, CliError> {
    let total = s.space().total();
    let value = witness_threshold::<f64>(total, s.dim(), eps.value)?;
    let exact = match &eps.exact {
        Some(e) => {
            let e: Exact = e.parse().map_err(|_| CliError::Other(format!("bad rational {e}")))?;
            Some(witness_threshold::<Exact>(total, s.dim(), e)?.to_string())
        }
        None => None,
    };
    Ok(Value64 { value, exact, details: vec![("epsilon".into(), json!(eps.value)), ("target".into(), json!(target))] })
}

pub fn bisect(s: &Subspace<f64>, method: Method, tol_p: f64, opts: &SdpOptions) -> Result<(Value64, ThresholdResult), CliError> {
    let r = threshold_bisect(s, method, tol_p, opts)?;
    let v = Value64::plain(r.p_star)
        .with("bracket", json!([r.bracket.0, r.bracket.1]))
        .with("value_lo", json!(r.value_lo))
        .with("value_hi", json!(r.value_hi))
        .with("never_detected", json!(r.never_detected))
        .with("non_monotone", json!(r.non_monotone))
        .with("evaluations", json!(r.samples.len()));
    Ok((v, r))
}
