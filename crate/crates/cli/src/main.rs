mod compute;
mod error;
mod manifest;
mod reference;
mod reproduce;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gesq_core::exact::{
    antisym_ggm, antisym_gm, ggm_ges_exact, gm_ces_exact, gm_upper_bound_S, lambda_max_ces, s_witness_threshold_closed,
};
use gesq_core::noise::{make_noisy_state, threshold_witness, Method, Target, DEFAULT_TOL_P};
use gesq_core::sdp::problems::{fidelity_ggm_program, fidelity_gm_program, ppt_mixture_program, subspace_program};
use gesq_core::sdp::{Lowered, SdpOptions};
use gesq_core::subspaces::{appendix_c_state, verify_appendix_b_equivalence, Family};
use gesq_core::tensor::json::subspace_to_doc;
use gesq_core::tensor::Bipartition;
use gesq_core::variational::SeesawConfig;
use gesq_core::{Exact, Scalar};

use compute::{Detector, Measure, Spec, Value64};
use error::CliError;
use manifest::{RunManifest, SolverSettings};
use reproduce::Settings;

#[derive(Parser, Debug)]
#[command(name = "gesq", version, about = "Genuinely entangled subspaces: construction, measures and table reproduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Output file (construct, measure, noise-threshold, exact, figure1, verify) or directory (reproduce).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest total dimension D accepted by SDP-based methods.
    #[arg(long = "max-D", global = true, default_value_t = 128)]
    max_d: usize,
    /// Seesaw restarts unless a command overrides them.
    #[arg(long, global = true, default_value_t = 200)]
    max_restarts: usize,
    /// Largest number of scalar variables after lowering an SDP.
    #[arg(long, global = true, default_value_t = SdpOptions::default().max_vars)]
    max_vars: usize,
    /// Seconds after which `reproduce` starts no new cell.
    #[arg(long, global = true, default_value_t = 3600.0)]
    time_limit: f64,
    /// Seed; overrides GESQ_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Solve SDPs over complex Hermitian matrices even when the data are real.
    #[arg(long, global = true)]
    complex: bool,
    /// Print one line per interior-point iteration to stderr.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Args, Debug, Clone)]
struct SubspaceArgs {
    /// S, CES, Q1, Q2, ASYM or WSPAN.
    #[arg(long)]
    subspace: String,
    /// Number of parties.
    #[arg(long = "N", default_value_t = 3)]
    n: usize,
    /// Local dimension.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Angle in radians; accepts `pi/2`, `2pi/3`, `2*pi/3`.
    #[arg(long, default_value = "pi/2", value_parser = parse_theta)]
    theta: f64,
}

impl SubspaceArgs {
    fn spec(&self) -> Result<Spec, CliError> {
        let family: Family = self.subspace.parse()?;
        Ok(Spec { family, n: self.n, d: self.d, theta: self.theta })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MeasureMethod {
    Exact,
    Seesaw,
    Sdp,
    Pptmix,
    Fidelity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    #[value(name = "GM")]
    Gm,
    #[value(name = "GGM")]
    Ggm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ThresholdMethod {
    Witness,
    Pptmix,
    Fidelity,
    #[value(name = "fidelity-GM")]
    FidelityGm,
    #[value(name = "fidelity-GGM")]
    FidelityGgm,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a subspace and write its orthonormal basis as JSON.
    Construct(SubspaceArgs),
    /// Compute one entanglement quantity.
    Measure {
        #[command(flatten)]
        sub: SubspaceArgs,
        #[arg(long, value_enum)]
        method: MeasureMethod,
        /// GM or GGM; pptmix always targets GME.
        #[arg(long, value_enum)]
        target: Option<TargetArg>,
        /// White-noise weight for the mixed-state detectors.
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        /// Use fully-PPT mixtures (pptmix only).
        #[arg(long)]
        fully: bool,
        /// Seesaw restarts (defaults to --max-restarts).
        #[arg(long)]
        restarts: Option<usize>,
        /// Write the lowered conic program as JSON to this path instead of solving.
        #[arg(long)]
        dump_program: Option<PathBuf>,
    },
    /// White-noise tolerance of a subspace state.
    NoiseThreshold {
        #[command(flatten)]
        sub: SubspaceArgs,
        #[arg(long, value_enum)]
        method: ThresholdMethod,
        /// gme or ent; implied by the fidelity-GM / fidelity-GGM / pptmix methods.
        #[arg(long)]
        target: Option<Target>,
        /// Bracket width at which bisection stops.
        #[arg(long = "tol-p", alias = "tol", default_value_t = DEFAULT_TOL_P)]
        tol_p: f64,
        /// Witness offset; computed when omitted.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Recompute a table or figure and compare against the bundled reference values.
    Reproduce {
        /// I, II, III, IV, V or VI.
        #[arg(long, required_unless_present = "fig1", conflicts_with = "fig1")]
        table: Option<String>,
        #[arg(long)]
        fig1: bool,
        /// Comma-separated subset of exact, seesaw, sdp, pptmix, fidelity, witness.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long = "tol-p", default_value_t = DEFAULT_TOL_P)]
        tol_p: f64,
    },
    /// Structural checks: the unitary equivalence for d = 2..6 and the PPT certificate.
    Verify,
    /// Closed-form values as {formula, inputs, value} records.
    Exact {
        /// gm-ces, lambda-max-ces, ggm-s, gm-bound-s, witness-threshold-s, antisym-gm, antisym-ggm; all when omitted.
        #[arg(long)]
        formula: Option<String>,
        #[arg(long = "N", default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value = "pi/2", value_parser = parse_theta)]
        theta: f64,
    },
    /// CSV of E_GM of the two-qudit CES family over a theta grid.
    Figure1 {
        /// Grid points per half turn.
        #[arg(long, default_value_t = reproduce::FIG1_STEPS)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7")]
        d: Vec<usize>,
    },
}

/// Radians, with `pi` shortcuts such as `pi/2`, `2pi/3`, `2*pi/3` or `pi`.
fn parse_theta(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|e| format!("bad angle '{s}': {e}"));
    };
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let num = match head.trim_end_matches('*') {
        "" => 1.0,
        h => h.parse::<f64>().map_err(|e| format!("bad angle '{s}': {e}"))?,
    };
    let den = match tail.strip_prefix('/') {
        Some(x) => x.parse::<f64>().map_err(|e| format!("bad angle '{s}': {e}"))?,
        None if tail.is_empty() => 1.0,
        None => return Err(format!("bad angle '{s}'")),
    };
    Ok(if num == 1.0 { PI / den } else { num * PI / den })
}

struct Ctx {
    seed: u64,
    sdp: SdpOptions,
    seesaw: SeesawConfig,
    out: Option<PathBuf>,
    max_d: usize,
    time_limit: f64,
}

impl Ctx {
    fn from(g: &Global) -> Result<Self, CliError> {
        let seed = match g.seed {
            Some(s) => s,
            None => match std::env::var("GESQ_SEED") {
                Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("GESQ_SEED = '{v}' is not an integer")))?,
                Err(_) => 0,
            },
        };
        let mut sdp = SdpOptions { allow_real: !g.complex, max_vars: g.max_vars, ..Default::default() };
        sdp.ipm.trace = g.trace;
        let seesaw = SeesawConfig { restarts: g.max_restarts, rng_seed: seed, ..Default::default() };
        seesaw.validate()?;
        if !(g.time_limit > 0.0) {
            return Err(CliError::Usage("--time-limit must be positive".into()));
        }
        Ok(Self { seed, sdp, seesaw, out: g.out.clone(), max_d: g.max_d, time_limit: g.time_limit })
    }

    fn check_d(&self, total: usize) -> Result<(), CliError> {
        if total > self.max_d {
            return Err(CliError::Budget(format!("D = {total} exceeds --max-D {}", self.max_d)));
        }
        Ok(())
    }

    fn emit_json(&self, v: &impl serde::Serialize) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(v)? + "\n";
        match &self.out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }

    fn solver(&self) -> SolverSettings {
        SolverSettings { sdp: self.sdp, seesaw: self.seesaw }
    }
}

fn value_json(v: &Value64) -> Value {
    let mut out = json!({ "value": v.value, "exact": v.exact });
    for (k, x) in &v.details {
        out[k] = x.clone();
    }
    out
}

fn subspace_json(spec: &Spec, dim: usize, total: usize) -> Value {
    json!({ "subspace": spec.family.to_string(), "N": spec.n, "d": spec.d, "theta": spec.theta, "dimension": dim, "D": total })
}

fn cmd_construct(ctx: &Ctx, sub: &SubspaceArgs) -> Result<(), CliError> {
    let spec = sub.spec()?;
    let s = spec.build()?;
    ctx.emit_json(&subspace_to_doc(&s))?;
    eprintln!(
        "{} N={} d={}: dimension {} in D = {} (local dims {:?})",
        spec.family,
        spec.n,
        spec.d,
        s.dim(),
        s.space().total(),
        s.space().dims()
    );
    Ok(())
}

fn dump_programs(
    path: &Path,
    ctx: &Ctx,
    s: &gesq_core::tensor::Subspace<f64>,
    method: MeasureMethod,
    target: Measure,
    p: f64,
    fully: bool,
) -> Result<(), CliError> {
    let lower = |prog| -> Result<Value, CliError> {
        Ok(serde_json::to_value(Lowered::new(&prog, ctx.sdp.allow_real)?.to_dump())?)
    };
    let n = s.space().n_parties();
    let doc = match (method, target) {
        (MeasureMethod::Sdp, Measure::Gm) => lower(subspace_program(s, &Bipartition::all(n)?))?,
        (MeasureMethod::Sdp, Measure::Ggm) => {
            let mut cuts = Vec::new();
            for cut in Bipartition::all(n)? {
                cuts.push(json!({ "cut": cut.to_string(), "program": lower(subspace_program(s, &[cut]))? }));
            }
            Value::Array(cuts)
        }
        (MeasureMethod::Pptmix, _) => lower(ppt_mixture_program(&make_noisy_state(s, p)?, fully)?)?,
        (MeasureMethod::Fidelity, Measure::Gm) => lower(fidelity_gm_program(&make_noisy_state(s, p)?)?)?,
        (MeasureMethod::Fidelity, Measure::Ggm) => lower(fidelity_ggm_program(&make_noisy_state(s, p)?)?)?,
        _ => return Err(CliError::Usage("--dump-program needs --method sdp, pptmix or fidelity".into())),
    };
    std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_measure(
    ctx: &Ctx,
    sub: &SubspaceArgs,
    method: MeasureMethod,
    target: Option<TargetArg>,
    p: f64,
    fully: bool,
    restarts: Option<usize>,
    dump: Option<&Path>,
) -> Result<(), CliError> {
    let spec = sub.spec()?;
    let target = match (method, target) {
        (MeasureMethod::Pptmix, None | Some(TargetArg::Ggm)) => Measure::Ggm,
        (MeasureMethod::Pptmix, Some(TargetArg::Gm)) => {
            return Err(CliError::Usage("pptmix detects genuine multipartite entanglement; use --target GGM".into()))
        }
        (_, Some(TargetArg::Gm)) => Measure::Gm,
        (_, Some(TargetArg::Ggm)) => Measure::Ggm,
        (_, None) => return Err(CliError::Usage("--target GM|GGM is required for this method".into())),
    };
    if fully && method != MeasureMethod::Pptmix {
        return Err(CliError::Usage("--fully only applies to --method pptmix".into()));
    }
    let mixed = matches!(method, MeasureMethod::Pptmix | MeasureMethod::Fidelity);
    if p != 0.0 && !mixed {
        return Err(CliError::Usage("--p only applies to the mixed-state methods pptmix and fidelity".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(CliError::Usage(format!("--p = {p} outside [0, 1]")));
    }
    let s = spec.build()?;
    let total = s.space().total();
    let mut seesaw = ctx.seesaw;
    if let Some(r) = restarts {
        if method != MeasureMethod::Seesaw {
            return Err(CliError::Usage("--restarts only applies to --method seesaw".into()));
        }
        seesaw.restarts = r;
        seesaw.validate()?;
    }
    if let Some(path) = dump {
        return dump_programs(path, ctx, &s, method, target, p, fully);
    }
    let start = Instant::now();
    let v = match method {
        MeasureMethod::Exact => compute::closed_form(&spec, target)?.ok_or_else(|| {
            CliError::Usage(format!("no closed form for the {} of {} with N = {}", target.name(), spec.family, spec.n))
        })?,
        MeasureMethod::Seesaw => compute::seesaw(&s, target, &seesaw)?,
        MeasureMethod::Sdp => {
            ctx.check_d(total)?;
            compute::sdp(&s, target, &ctx.sdp)?
        }
        MeasureMethod::Pptmix | MeasureMethod::Fidelity => {
            ctx.check_d(total)?;
            let rho = make_noisy_state(&s, p)?;
            let det = if method == MeasureMethod::Pptmix { Detector::Pptmix { fully } } else { Detector::Fidelity(target) };
            compute::detector(&rho, det, &ctx.sdp)?
        }
    };
    let method_name = format!("{method:?}").to_ascii_lowercase();
    let mut out = subspace_json(&spec, s.dim(), total);
    out["method"] = json!(method_name);
    out["target"] = json!(target.name());
    if mixed {
        out["p"] = json!(p);
        out["fully"] = json!(fully);
    }
    out["seed"] = json!(ctx.seed);
    out["seconds"] = json!(start.elapsed().as_secs_f64());
    out["result"] = value_json(&v);
    out["settings"] = match method {
        MeasureMethod::Seesaw => serde_json::to_value(seesaw)?,
        MeasureMethod::Exact => Value::Null,
        _ => serde_json::to_value(ctx.sdp)?,
    };
    ctx.emit_json(&out)
}

fn cmd_noise(
    ctx: &Ctx,
    sub: &SubspaceArgs,
    method: ThresholdMethod,
    target: Option<Target>,
    tol_p: f64,
    epsilon: Option<f64>,
) -> Result<(), CliError> {
    let spec = sub.spec()?;
    let s = spec.build()?;
    let total = s.space().total();
    let mismatch = |m: &str, t: Target| CliError::Usage(format!("method {m} does not detect target {t:?}"));
    let method = match (method, target) {
        (ThresholdMethod::Witness, _) => Method::Witness,
        (ThresholdMethod::Pptmix, None | Some(Target::Gme)) => Method::Pptmix,
        (ThresholdMethod::Pptmix, Some(t)) => return Err(mismatch("pptmix", t)),
        (ThresholdMethod::Fidelity, Some(Target::Gme)) | (ThresholdMethod::FidelityGgm, None | Some(Target::Gme)) => {
            Method::FidelityGgm
        }
        (ThresholdMethod::Fidelity, Some(Target::Ent)) | (ThresholdMethod::FidelityGm, None | Some(Target::Ent)) => {
            Method::FidelityGm
        }
        (ThresholdMethod::Fidelity, None) => {
            return Err(CliError::Usage("--method fidelity needs --target gme|ent".into()))
        }
        (ThresholdMethod::FidelityGgm, Some(t)) => return Err(mismatch("fidelity-GGM", t)),
        (ThresholdMethod::FidelityGm, Some(t)) => return Err(mismatch("fidelity-GM", t)),
    };
    if epsilon.is_some() && method != Method::Witness {
        return Err(CliError::Usage("--epsilon only applies to --method witness".into()));
    }
    if !(tol_p > 0.0 && tol_p < 1.0) {
        return Err(CliError::Usage(format!("--tol-p = {tol_p} outside (0, 1)")));
    }
    let mut out = subspace_json(&spec, s.dim(), total);
    let start = Instant::now();
    if method == Method::Witness {
        let target = target.ok_or_else(|| CliError::Usage("--method witness needs --target gme|ent".into()))?;
        let eps = match epsilon {
            Some(e) => Value64::plain(e).with("epsilon_method", json!("given")),
            None => compute::witness_epsilon(&spec, &s, target, &ctx.seesaw)?,
        };
        let (_, result) = threshold_witness::<f64>(total, s.dim(), target, eps.value)?;
        let w = compute::witness(&s, target, &eps)?;
        out["result"] = serde_json::to_value(&result)?;
        out["exact"] = json!(w.exact);
        out["epsilon"] = value_json(&eps);
    } else {
        ctx.check_d(total)?;
        let (_, result) = compute::bisect(&s, method, tol_p, &ctx.sdp)?;
        out["result"] = serde_json::to_value(&result)?;
        out["tol_p"] = json!(tol_p);
        out["settings"] = serde_json::to_value(ctx.sdp)?;
    }
    out["seed"] = json!(ctx.seed);
    out["seconds"] = json!(start.elapsed().as_secs_f64());
    ctx.emit_json(&out)
}

fn cmd_reproduce(
    ctx: &Ctx,
    table: Option<&str>,
    fig1: bool,
    methods: Option<Vec<String>>,
    tol_p: f64,
) -> Result<i32, CliError> {
    let set = Settings {
        sdp: ctx.sdp,
        seesaw: ctx.seesaw,
        tol_p,
        max_d: ctx.max_d,
        deadline: Some(Instant::now() + Duration::from_secs_f64(ctx.time_limit)),
        methods,
    };
    let out = ctx.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let records = if fig1 {
        reproduce::reproduce_fig1(&set, &out, ctx.seed)?
    } else {
        let id = table.unwrap_or_default().to_ascii_uppercase();
        if !reproduce::TABLES.contains(&id.as_str()) {
            return Err(CliError::Usage(format!("unknown table '{id}' (expected I..VI)")));
        }
        let mut m = reproduce::table_manifest(&id, &set, ctx.seed);
        m.param("time_limit", ctx.time_limit);
        reproduce::reproduce_cells(&format!("table-{id}"), reference::table(&id)?, &set, &out, m)?
    };
    Ok(reproduce::exit_code(&records))
}

fn cmd_verify(ctx: &Ctx) -> Result<i32, CliError> {
    let mut m = RunManifest::new("verify", ctx.seed, ctx.solver());
    let mut ok = true;
    let mut b = Vec::new();
    for d in 2..=6 {
        let r = verify_appendix_b_equivalence(d)?;
        ok &= r.equivalent && r.dimension == (d - 1) * (d - 1);
        eprintln!("equivalence d={d}: dimension {}, projector distance {:.1e}", r.dimension, r.projector_distance);
        b.push(json!({ "d": d, "dimension": r.dimension, "projector_distance": r.projector_distance, "equivalent": r.equivalent }));
    }
    let c = appendix_c_state::<Exact>()?;
    let want = Exact::from_ratio(239371, 568000);
    let c_ok = c.complement_value == want && c.ppt.iter().all(|&x| x) && c.state.trace() == Exact::from_ratio(1, 1);
    ok &= c_ok;
    eprintln!(
        "certificate: tr(P_perp rho) = {}, PPT on each party {:?}, {}",
        c.complement_value,
        c.ppt,
        if c_ok { "ok" } else { "FAILED" }
    );
    m.param("unitary_equivalence", b);
    m.param(
        "ppt_certificate",
        json!({
            "complement_value": c.complement_value.to_string(),
            "subspace_value": c.subspace_value.to_string(),
            "closed_form": c.closed_form.to_string(),
            "ppt": c.ppt,
            "passed": c_ok,
        }),
    );
    m.param("passed", ok);
    ctx.emit_json(&m)?;
    Ok(if ok { 0 } else { 2 })
}

fn exact_records(formula: Option<&str>, n: usize, d: usize, theta: f64) -> Result<Vec<Value>, CliError> {
    const ALL: [&str; 7] =
        ["gm-ces", "lambda-max-ces", "ggm-s", "gm-bound-s", "witness-threshold-s", "antisym-gm", "antisym-ggm"];
    let names: Vec<&str> = match formula {
        Some(f) if ALL.contains(&f) => vec![f],
        Some(f) => return Err(CliError::Usage(format!("unknown formula '{f}' (expected one of {})", ALL.join(", ")))),
        None => ALL.to_vec(),
    };
    let right = theta == std::f64::consts::FRAC_PI_2;
    let mut out = Vec::new();
    for name in names {
        let (inputs, value, exact): (Value, Result<f64, CliError>, Option<String>) = match name {
            "gm-ces" => (json!({"d": d, "theta": theta}), gm_ces_exact(d, theta).map(|g| g.value).map_err(Into::into), None),
            "lambda-max-ces" => (json!({"d": d, "theta": theta}), Ok(lambda_max_ces(d, theta)), None),
            "ggm-s" => {
                let spec = Spec { family: Family::S, n, d, theta };
                let exact = compute::closed_form(&spec, Measure::Ggm).ok().flatten().and_then(|v| v.exact);
                (json!({"N": n, "d": d, "theta": theta}), ggm_ges_exact(n, d, theta).map(|g| g.value).map_err(Into::into), exact)
            }
            "gm-bound-s" if right => (
                json!({"N": n, "d": d}),
                gm_upper_bound_S::<f64>(n, d).map_err(Into::into),
                gm_upper_bound_S::<Exact>(n, d).ok().map(|e| e.to_string()),
            ),
            "witness-threshold-s" if right => (json!({"d": d}), Ok(s_witness_threshold_closed::<f64>(d)), None),
            "antisym-gm" => (
                json!({"N": n}),
                antisym_gm::<f64>(n).map_err(Into::into),
                antisym_gm::<Exact>(n).ok().map(|e| e.to_string()),
            ),
            "antisym-ggm" => (
                json!({"N": n}),
                antisym_ggm::<f64>(n).map_err(Into::into),
                antisym_ggm::<Exact>(n).ok().map(|e| e.to_string()),
            ),
            _ => continue,
        };
        match value {
            Ok(v) => out.push(json!({ "formula": name, "inputs": inputs, "value": v, "exact": exact })),
            Err(e) if formula.is_some() => return Err(e),
            Err(_) => {}
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("no formula applies at N = {n}, d = {d}, theta = {theta}")));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    if let Some(j) = cli.global.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    let ctx = Ctx::from(&cli.global)?;
    match cli.command {
        Command::Construct(sub) => cmd_construct(&ctx, &sub).map(|_| 0),
        Command::Measure { sub, method, target, p, fully, restarts, dump_program } => {
            cmd_measure(&ctx, &sub, method, target, p, fully, restarts, dump_program.as_deref()).map(|_| 0)
        }
        Command::NoiseThreshold { sub, method, target, tol_p, epsilon } => {
            cmd_noise(&ctx, &sub, method, target, tol_p, epsilon).map(|_| 0)
        }
        Command::Reproduce { table, fig1, methods, tol_p } => cmd_reproduce(&ctx, table.as_deref(), fig1, methods, tol_p),
        Command::Verify => cmd_verify(&ctx),
        Command::Exact { formula, n, d, theta } => {
            let recs = exact_records(formula.as_deref(), n, d, theta)?;
            ctx.emit_json(&recs).map(|_| 0)
        }
        Command::Figure1 { steps, d } => reproduce::write_figure1(&d, steps, ctx.out.as_deref()).map(|_| 0),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("gesq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
