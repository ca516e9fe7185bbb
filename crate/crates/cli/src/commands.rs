//! One function per subcommand. Each returns the text of its output; the
//! binary decides where it goes.

use std::fmt::Write as _;

use qpc_cocycle::{certify_uh, gap_label, lyapunov, rotation_number, Estimator, UHVerdict};
use qpc_core::{CircleSet, CocycleParams, ProjPoint};
use qpc_induction::{classify_energy, compute_r_star, init_scale0, inductive_step, EnergyClass};
use qpc_operator::{
    build_truncation, eigenvalues, gap_edge_eigenfunction, gaps_from_values, refine_grid, GapReport, IdsEvaluator,
    OperatorError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{CliError, RunConfig, VERSION};
use crate::density::visited_fraction;

/// Base points of the hyperbolicity certificate.
pub const UH_GRID: usize = 2000;
/// Horizon of the hyperbolicity certificate.
pub const UH_HORIZON: usize = 1000;
/// Largest `|k|` tried when labelling a gap.
pub const LABEL_K_MAX: u32 = 50;
/// Circle distance accepted by a gap label.
pub const LABEL_TOL: f64 = 1e-3;
/// Sites of the gap-edge eigenvector window.
pub const EDGE_WINDOW: usize = 800;

/// The text a command produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    /// Main output: CSV or JSON.
    pub body: String,
    /// Secondary JSON written next to the main output, if any.
    pub summary: Option<String>,
}

impl Report {
    fn body(body: String) -> Self {
        Self { body, summary: None }
    }
}

/// The subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Lyapunov exponent, rotation number and certificate over an energy grid.
    Lyapunov,
    /// Gaps and a cover of the spectrum.
    Spectrum,
    /// Rotation number against the density of states.
    Rotation,
    /// Classification of each grid energy by the multi-scale construction.
    Classify,
    /// The scale-0 probe at one energy.
    Probe,
    /// The per-scale log of the construction at one energy.
    Induct,
    /// One orbit of the fiber map and its visited-cell fraction.
    Orbit,
    /// Eigenvalues of a truncation, or the eigenvector nearest one energy.
    OperatorEigs,
}

impl Command {
    /// Name on the command line.
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Self::Lyapunov => "lyapunov",
            Self::Spectrum => "spectrum",
            Self::Rotation => "rotation",
            Self::Classify => "classify",
            Self::Probe => "probe",
            Self::Induct => "induct",
            Self::Orbit => "orbit",
            Self::OperatorEigs => "operator-eigs",
        }
    }

    /// Run against a configuration.
    pub fn run(self, cfg: &RunConfig) -> Result<Report, CliError> {
        match self {
            Self::Lyapunov => cmd_lyapunov(cfg),
            Self::Spectrum => cmd_spectrum(cfg),
            Self::Rotation => cmd_rotation(cfg),
            Self::Classify => cmd_classify(cfg),
            Self::Probe => cmd_probe(cfg),
            Self::Induct => cmd_induct(cfg),
            Self::Orbit => cmd_orbit(cfg),
            Self::OperatorEigs => cmd_operator_eigs(cfg),
        }
    }
}

fn csv_preamble(command: &str, cfg: &RunConfig) -> String {
    let mut s = format!("# {VERSION} {command}\n");
    for line in cfg.to_text().lines() {
        let _ = writeln!(s, "# {line}");
    }
    s
}

fn json_document(command: &str, cfg: &RunConfig, result: Value) -> String {
    let config: serde_json::Map<String, Value> =
        cfg.entries().into_iter().map(|(k, v)| (k.to_string(), Value::String(v))).collect();
    let doc = json!({
        "version": VERSION,
        "command": command,
        "config": config,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types always serialize")
}

fn run_error<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Run(e.to_string())
}

/// Certificate over the whole circle with `c = 1` and `K = λ^{3/4}`.
///
/// Looser constants also certify energies inside the spectrum at this
/// horizon, since a growing slope exists at every sampled phase there too.
#[must_use]
pub fn uh_verdict(params: &CocycleParams) -> UHVerdict {
    certify_uh(params, &CircleSet::full(), 1.0, params.lp(0.75), UH_HORIZON, UH_GRID).verdict
}

fn verdict_name(v: UHVerdict) -> &'static str {
    match v {
        UHVerdict::CertifiedUH => "CertifiedUH",
        UHVerdict::NotCertified => "NotCertified",
    }
}

/// Gaps on `grid`, refined until adjacent density-of-states values differ
/// by at most `5/trunc`.
pub fn spectrum_report(params: &CocycleParams, grid: &[f64], trunc: usize, samples: usize) -> Result<GapReport, CliError> {
    if grid.len() < 2 {
        return Err(CliError::Usage("the spectrum needs --e-grid of at least 2".into()));
    }
    let ev = IdsEvaluator::new(params, trunc, samples);
    let (g, v) = refine_grid(&ev, grid, 5.0 / trunc as f64, 1e-6, 100_000);
    gaps_from_values(params, &ev, &g, &v, 0.0).map_err(|e| match e {
        OperatorError::GridTooCoarse { e_lo, e_hi, jump } => CliError::Run(format!(
            "{e}; refinement stopped at 100000 points. Narrow --e-min/--e-max around [{e_lo}, {e_hi}] \
             or raise --e-grid (jump {jump:.3e})"
        )),
        other => run_error(other),
    })
}

fn cmd_lyapunov(cfg: &RunConfig) -> Result<Report, CliError> {
    let base = cfg.params()?;
    let n = cfg.n_or(100_000)?;
    let samples = cfg.samples_or(8)?;
    let grid = cfg.energy_grid(&base)?;
    let rows: Vec<(f64, f64, f64, f64, UHVerdict)> = grid
        .par_iter()
        .map(|&e| {
            let p = base.with_energy(e);
            let est = lyapunov(&p, n, samples, 0, Estimator::MatrixNorm);
            let alpha = rotation_number(&p, cfg.theta0.unwrap_or(0.0), n);
            (e, est.gamma, est.stderr, alpha, uh_verdict(&p))
        })
        .collect();
    let mut s = csv_preamble("lyapunov", cfg);
    s.push_str("E,gamma,gamma_stderr,alpha,uh_verdict\n");
    for (e, g, se, a, v) in &rows {
        let _ = writeln!(s, "{e},{g},{se},{a},{}", verdict_name(*v));
    }
    let (e_min, g_min) = rows
        .iter()
        .map(|r| (r.0, r.1))
        .fold((f64::NAN, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let _ = writeln!(s, "# min_gamma={g_min} at E={e_min}");
    Ok(Report::body(s))
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = cfg.params()?;
    let grid = cfg.energy_grid(&p)?;
    let report = spectrum_report(&p, &grid, cfg.trunc, cfg.samples_or(64)?)?;
    Ok(Report::body(json_document("spectrum", cfg, to_value(&report))))
}

fn cmd_rotation(cfg: &RunConfig) -> Result<Report, CliError> {
    let base = cfg.params()?;
    let n = cfg.n_or(100_000)?;
    let grid = cfg.energy_grid(&base)?;
    let ids = IdsEvaluator::new(&base, cfg.trunc, cfg.samples_or(64)?).at_many(&grid);
    let alphas: Vec<f64> = grid
        .par_iter()
        .map(|&e| rotation_number(&base.with_energy(e), cfg.theta0.unwrap_or(0.0), n))
        .collect();
    let mut s = csv_preamble("rotation", cfg);
    s.push_str("E,alpha,two_alpha,ids,label\n");
    for ((e, a), k) in grid.iter().zip(&alphas).zip(&ids) {
        let label = gap_label(*a, base.omega, LABEL_K_MAX, LABEL_TOL).map_or(String::new(), |l| l.to_string());
        let _ = writeln!(s, "{e},{a},{},{k},{label}", 2.0 * a);
    }
    Ok(Report::body(s))
}

/// Classification of one energy, cross-checked against the certificate,
/// the density of states and the spectrum cover.
pub fn classify_one(
    cfg: &RunConfig,
    base: &CocycleParams,
    e: f64,
    ids: &IdsEvaluator,
    cover: &GapReport,
) -> Result<Value, CliError> {
    let p = base.with_energy(e);
    let report = classify_energy(&p, cfg.induction_mode(), cfg.n_or(4)?, cfg.grid);
    let mut entry = json!({
        "energy": e,
        "class": to_value(&report.class),
        "branch_history": to_value(&report.branch_history),
        "uh_verdict": verdict_name(uh_verdict(&p)),
        "ids": ids.at(e),
        "in_spectrum_cover": cover.spectrum_cover.contains(e),
    });
    if matches!(report.class, EnergyClass::GapEdgeEvidence { .. }) {
        let depth = report.states.len().saturating_sub(1);
        entry["r_star"] = match compute_r_star(&p, &report.states, depth) {
            Ok(r) => to_value(&r),
            Err(err) => json!({ "error": err.to_string() }),
        };
        if let Some((theta_star, half_width)) = report.theta_star {
            entry["theta_star"] = json!([theta_star, half_width]);
            entry["eigenfunction"] = match gap_edge_eigenfunction(&p, e, theta_star, EDGE_WINDOW) {
                Ok(u) => json!({
                    "eigenvalue": u.eigenvalue,
                    "decay_rate": u.decay_rate,
                    "residual": u.residual,
                    "ratio_u1_u0": u.ratio_u1_u0,
                }),
                Err(err) => json!({ "error": err.to_string() }),
            };
        }
    }
    Ok(entry)
}

fn cmd_classify(cfg: &RunConfig) -> Result<Report, CliError> {
    let base = cfg.params()?;
    let grid = cfg.energy_grid(&base)?;
    let samples = cfg.samples_or(64)?;
    let window = base.energy_window();
    let cover_grid: Vec<f64> = (0..200)
        .map(|i| window.0 - 1.0 + (window.1 - window.0 + 2.0) * i as f64 / 199.0)
        .collect();
    let cover = spectrum_report(&base, &cover_grid, cfg.trunc, samples)?;
    let ids = IdsEvaluator::new(&base, cfg.trunc, samples);
    let entries: Vec<Value> = grid
        .par_iter()
        .map(|&e| classify_one(cfg, &base, e, &ids, &cover))
        .collect::<Result<_, _>>()?;
    let result = json!({
        "spectrum_cover": to_value(&cover.spectrum_cover),
        "energies": entries,
    });
    Ok(Report::body(json_document("classify", cfg, result)))
}

fn cmd_probe(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = cfg.params()?;
    cfg.single_energy()?;
    let state = init_scale0(&p, cfg.induction_mode()).map_err(run_error)?;
    let out = inductive_step(&p, &state, cfg.grid);
    let mut body = csv_preamble("probe", cfg);
    match (&out.probe, &out.scan) {
        (Some(r), _) => body.push_str(&r.to_csv()),
        (None, Some(s)) => body.push_str(&s.to_csv()),
        (None, None) => body.push_str("theta,phi,in_J_next\n"),
    }
    let result = json!({
        "kind": to_value(&out.kind),
        "reason": out.reason,
        "i_0": to_value(&state.i_n),
        "k_0": state.k_n,
        "m_0": state.m_n,
        "nu_0": state.nu_n,
        "shape": out.probe.as_ref().map(|r| to_value(&r.shape)),
        "branch": out.probe.as_ref().map(|r| to_value(&r.branch)),
        "bend": out.probe.as_ref().and_then(|r| r.bend).map(|b| to_value(&b)),
        "arcs": out.probe.as_ref().map(|r| to_value(&r.arcs)).or_else(|| out.scan.as_ref().map(|s| to_value(&s.arcs))),
        "eps": 2.0 * p.lp(-0.75),
        "scan_issues": out.scan.as_ref().map(|s| to_value(&s.issues)),
        "disjointness": to_value(&out.disjointness_report),
    });
    Ok(Report {
        body,
        summary: Some(json_document("probe", cfg, result)),
    })
}

fn cmd_induct(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = cfg.params()?;
    cfg.single_energy()?;
    let report = classify_energy(&p, cfg.induction_mode(), cfg.n_or(4)?, cfg.grid);
    Ok(Report::body(json_document("induct", cfg, to_value(&report))))
}

/// The starting phase: `theta0` when given, else a draw from `seed`.
#[must_use]
pub fn start_phase(cfg: &RunConfig) -> f64 {
    cfg.theta0.unwrap_or_else(|| ChaCha8Rng::seed_from_u64(cfg.seed).gen::<f64>())
}

fn cmd_orbit(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = cfg.params()?;
    cfg.single_energy()?;
    let n = cfg.n_or(100_000)?;
    let theta0 = start_phase(cfg);
    let r0 = ProjPoint::from_value(cfg.r0.unwrap_or_else(|| p.lp(0.75)));
    let mut s = csv_preamble("orbit", cfg);
    s.push_str("k,theta,r,angle\n");
    let (mut t, mut r) = (theta0, r0);
    for k in 0..=n {
        let _ = writeln!(s, "{k},{t},{},{}", r.to_f64(), r.angle_fraction());
        (t, r) = qpc_dynamics::phi_step(&p, t, r);
    }
    let fraction = visited_fraction(&p, theta0, r0, n, 64);
    let _ = writeln!(s, "# visited_fraction={fraction} cells=64x64");
    Ok(Report::body(s))
}

fn cmd_operator_eigs(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = cfg.params()?;
    let theta0 = cfg.theta0.unwrap_or(0.0);
    if let Some(e) = cfg.energy {
        let u = gap_edge_eigenfunction(&p, e, theta0, cfg.trunc).map_err(run_error)?;
        return Ok(Report::body(json_document("operator-eigs", cfg, to_value(&u))));
    }
    if cfg.trunc == 0 {
        return Err(CliError::Usage("--trunc must be at least 1".into()));
    }
    let values = eigenvalues(&build_truncation(&p, theta0, cfg.trunc));
    let mut s = csv_preamble("operator-eigs", cfg);
    s.push_str("index,eigenvalue\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{i},{v}");
    }
    Ok(Report::body(s))
}
