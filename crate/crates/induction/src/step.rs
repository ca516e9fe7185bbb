//! One step of the construction: probe `I_n`, stop or build `I_{n+1}`, and
//! choose `K_{n+1}`, `M_{n+1}`, `ν_{n+1}` and `e_{n+1}^±`.

use qpc_core::{CircleSet, CocycleParams};
use qpc_geometry::{phi, scan, Bend, Branch, DisjointnessCheck, GeometryError, ProbeResult, ProbeScan};
use serde::{Deserialize, Serialize};

use crate::state::{dilate, BranchRecord, Mode, Scale, ScaleState};

/// Arcs of `I_n` spanning fewer doubles than this cannot be sampled.
const MIN_ARC_FLOATS: f64 = 64.0;
/// Largest lower end of a search window for `K_{n+1}`.
const K_SEARCH_CAP: f64 = 1e9;
/// The energy shift allowed by `e^±` moves `φ` by this fraction of `ε`,
/// which keeps `{|φ(E′)| ≤ 1.99λ^{−3/4}}` inside `J_{n+1}`.
const E_SHIFT_FRACTION: f64 = 0.005;

/// How a step ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    /// The small-value set is empty or a point: the cocycle is uniformly
    /// hyperbolic and the construction stops.
    StoppedUh,
    /// `I_{n+1}` was built and every condition for the next scale holds.
    Continued,
    /// The probe could not be classified, or a condition for the next scale
    /// fails; see [`StepOutcome::reason`].
    Unresolved,
}

/// The result of [`inductive_step`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    /// How the step ended.
    pub kind: StepKind,
    /// The state at scale `n + 1` when continued.
    pub next: Option<ScaleState>,
    /// The classified probe, when it could be classified.
    pub probe: Option<ProbeResult>,
    /// The raw scan, kept when classification failed.
    pub scan: Option<ProbeScan>,
    /// Every condition checked for the next scale, in order.
    pub disjointness_report: Vec<DisjointnessCheck>,
    /// Why the step is unresolved, or a note on why it stopped.
    pub reason: Option<String>,
}

impl StepOutcome {
    fn unresolved(reason: String) -> Self {
        Self {
            kind: StepKind::Unresolved,
            next: None,
            probe: None,
            scan: None,
            disjointness_report: Vec::new(),
            reason: Some(reason),
        }
    }
}

fn check(condition: &str, offender: Option<i64>) -> DisjointnessCheck {
    DisjointnessCheck {
        condition: condition.to_string(),
        passed: offender.is_none(),
        offender,
    }
}

/// Shifts `m ≠ 0` with `|m| ≤ n`, ordered `1, −1, 2, −2, …`.
fn shifts(n: u64) -> impl Iterator<Item = i64> {
    (1..=n as i64).flat_map(|m| [m, -m])
}

fn first_self_overlap(set: &CircleSet, omega: f64, n: u64) -> Option<i64> {
    shifts(n).find(|&m| set.translate(m as f64 * omega).overlaps(set))
}

/// Endpoint tolerance for probing `I_n`: a millionth of its shortest arc,
/// clamped to `[2·eps_machine, 10⁻¹³]`.
fn refine_tol(set: &CircleSet) -> f64 {
    let shortest = set.arcs().iter().map(|a| a.len).fold(f64::INFINITY, f64::min);
    (1e-6 * shortest).clamp(2.0 * f64::EPSILON, 1e-13)
}

/// Largest `|m|` searched for a resonance of `J_{n+1}`.
///
/// Paper constants use `⌊λ^{K_n/(25τ)}⌋`. The toy schedule uses `4T²` with
/// `T` the lower end of its non-resonant `K` window, twice the largest `M_{n+1}` of a non-resonant step,
/// so that, as with `Mode::PaperConstants`, a resonance too long to detect cannot
/// break the self-disjointness of `I_{n+1}`.
fn resonance_range(params: &CocycleParams, state: &ScaleState) -> Result<u64, String> {
    match state.mode {
        Mode::PaperConstants => {
            let r = params.lp(state.k_n as f64 / (25.0 * params.tau)).floor();
            if r > K_SEARCH_CAP {
                return Err(format!("resonance range {r:e} exceeds the search cap"));
            }
            Ok(r as u64)
        }
        Mode::Toy { growth, .. } => {
            let t = toy_target(state, growth);
            Ok(4 * t * t)
        }
    }
}

/// `max(⌈K_n^growth⌉, 2M_n + 1)`. A smaller `K_{n+1}` would put
/// `I_{n+1} + K_{n+1}ω ⊂ I_n + K_{n+1}ω` inside the doubled translates of
/// `I_n`, which `Mode::PaperConstants` avoids by its growth.
fn toy_target(state: &ScaleState, growth: f64) -> u64 {
    ((state.k_n as f64).powf(growth).ceil() as u64).max(2 * state.m_n + 1)
}

/// The window in which `K_{n+1}` is searched.
fn k_window(params: &CocycleParams, state: &ScaleState, resonant: bool, nu: u64) -> Result<(u64, u64), String> {
    let (lo, hi) = match state.mode {
        Mode::PaperConstants => {
            let kn = state.k_n as f64;
            let tau = params.tau;
            if resonant {
                let top = params.lp(kn / (20.0 * tau));
                ((0.5 * top).ceil(), top.floor())
            } else {
                let base = params.lp(kn / (60.0 * tau));
                (base.floor(), (2.0 * base).floor())
            }
        }
        Mode::Toy { growth, .. } => {
            let t = toy_target(state, growth).max(2 * nu) as f64;
            (t, 2.0 * t)
        }
    };
    if lo > K_SEARCH_CAP {
        return Err(format!("K window starts at {lo:e}, beyond the search cap"));
    }
    let lo = lo.max(1.0) as u64;
    let hi = hi.min(2.0 * K_SEARCH_CAP) as u64;
    if lo > hi {
        return Err(format!("K window [{lo}, {hi}] is empty"));
    }
    Ok((lo, hi))
}

/// `⋃_{j≤n} ⋃_{m=−2M_j}^{2M_j} (2I_j + mω)`.
fn forbidden(state: &ScaleState, omega: f64) -> CircleSet {
    state.scales.iter().fold(CircleSet::empty(), |acc, s| {
        let m = 2 * s.m as i64;
        acc.union(&dilate(&s.i, 2.0).union_of_translates(omega, -m..=m))
    })
}

/// `∂φ/∂E` at `θ` by a central difference whose step is shrunk until it
/// moves `φ` by less than `ε/10`.
fn energy_sensitivity(params: &CocycleParams, theta: f64, m: usize, k: usize, eps: f64) -> Option<f64> {
    let e = params.energy;
    let mut delta = 1e-8 * (1.0 + e.abs());
    for _ in 0..6 {
        let up = phi(&params.with_energy(e + delta), theta, m, k).to_f64();
        let down = phi(&params.with_energy(e - delta), theta, m, k).to_f64();
        let diff = up - down;
        if !diff.is_finite() {
            return None;
        }
        if diff.abs() < 0.1 * eps {
            return Some(diff / (2.0 * delta));
        }
        delta *= 1e-3;
    }
    None
}

/// `e_{n+1}^±`. A bent-upward single arc keeps `e^−` and a bent-downward one
/// keeps `e^+`; every other side is shrunk to the shift that moves `φ` by
/// `E_SHIFT_FRACTION·ε` at the steepest arc midpoint, and floored at
/// `λ^{−4M_{n+1}}`.
fn next_energy_window(
    params: &CocycleParams,
    state: &ScaleState,
    probe: &ProbeResult,
    m_next: u64,
) -> (f64, f64) {
    let (m, k) = (state.m_n as usize, state.k_n as usize);
    let steepest = probe
        .arcs
        .iter()
        .filter_map(|a| energy_sensitivity(params, a.midpoint(), m, k, probe.eps))
        .map(f64::abs)
        .fold(0.0f64, f64::max);
    let floor = (-4.0 * m_next as f64 * params.lambda.ln()).exp();
    let shrunk = |prev: f64| {
        let w = if steepest > 0.0 {
            E_SHIFT_FRACTION * probe.eps / steepest
        } else {
            floor
        };
        w.min(prev).max(floor)
    };
    match probe.bend {
        Some(Bend::Upward) => (state.e_minus, shrunk(state.e_plus)),
        Some(Bend::Downward) => (shrunk(state.e_minus), state.e_plus),
        None => (shrunk(state.e_minus), shrunk(state.e_plus)),
    }
}

/// Probe `I_n` with `(M_n, K_n)` and either stop, continue to scale `n + 1`,
/// or report why neither is possible.
///
/// The small-value set `J_{n+1}` is tested for resonance up to the range of
/// the schedule. A non-resonant `J_{n+1}` becomes `I_{n+1}`; two resonant
/// arcs `A`, `B` become `J¹ ∪ (J² − ν_{n+1}ω)` for the least `ν_{n+1} ≥ 1`
/// joining them. `K_{n+1}` is the least value in the schedule's window with
/// `I_{n+1} + K_{n+1}ω` outside `⋃_{j≤n} ⋃_{|m|≤2M_j} (2I_j + mω)`, and
/// `M_{n+1}` the least in `[K_{n+1}², 2K_{n+1}²]` with `I_{n+1} − M_{n+1}ω`
/// outside the same set. Finally `I_{n+1}` must miss its translates by
/// `0 < |m| ≤ 2M_{n+1}`.
#[must_use]
pub fn inductive_step(params: &CocycleParams, state: &ScaleState, grid: usize) -> StepOutcome {
    if state.i_n.is_empty() {
        return StepOutcome {
            kind: StepKind::StoppedUh,
            next: None,
            probe: None,
            scan: None,
            disjointness_report: Vec::new(),
            reason: Some(format!("I_{} is empty", state.n)),
        };
    }
    for a in state.i_n.arcs() {
        if a.len < MIN_ARC_FLOATS * f64::EPSILON {
            return StepOutcome::unresolved(format!(
                "an arc of I_{} has length {:e}, below double-precision resolution",
                state.n, a.len
            ));
        }
    }
    let (m, k) = (state.m_n as usize, state.k_n as usize);
    let raw = match scan(params, &state.i_n, m, k, grid, refine_tol(&state.i_n)) {
        Ok(s) => s,
        Err(e) => return StepOutcome::unresolved(e.to_string()),
    };
    let probe = match raw.clone().classify() {
        Ok(p) => p,
        Err(GeometryError::UnresolvedShape { reason, n_arcs }) => {
            return StepOutcome {
                scan: Some(raw),
                ..StepOutcome::unresolved(format!("probe shape with {n_arcs} arcs: {reason}"))
            }
        }
        Err(e) => {
            return StepOutcome {
                scan: Some(raw),
                ..StepOutcome::unresolved(e.to_string())
            }
        }
    };
    step_from_probe(params, state, probe)
}

/// The part of [`inductive_step`] after the probe has been classified:
/// stop on an empty or one-point small-value set, otherwise build
/// `I_{n+1}`, `K_{n+1}`, `M_{n+1}`, `ν_{n+1}` and `e_{n+1}^±` from `probe`.
#[must_use]
pub fn step_from_probe(params: &CocycleParams, state: &ScaleState, probe: ProbeResult) -> StepOutcome {
    let omega = params.omega;
    let stopped = |reason: &str| StepOutcome {
        kind: StepKind::StoppedUh,
        next: None,
        probe: Some(probe.clone()),
        scan: None,
        disjointness_report: Vec::new(),
        reason: Some(reason.to_string()),
    };
    let record = match probe.branch {
        Branch::Stop => return stopped(&format!("J_{} is empty or a single point", state.n + 1)),
        Branch::BranchI => BranchRecord::BranchI,
        Branch::BranchII => BranchRecord::BranchII(probe.bend.expect("a single arc has a bend")),
    };

    if let Some(a) = probe.arcs.iter().find(|a| a.len < MIN_ARC_FLOATS * f64::EPSILON) {
        let reason = format!(
            "an arc of J_{} has length {:e}, below double-precision resolution",
            state.n + 1,
            a.len
        );
        return StepOutcome {
            kind: StepKind::Unresolved,
            next: None,
            probe: Some(probe),
            scan: None,
            disjointness_report: Vec::new(),
            reason: Some(reason),
        };
    }

    let mut report = Vec::new();
    let fail = |report: Vec<DisjointnessCheck>, reason: String| StepOutcome {
        kind: StepKind::Unresolved,
        next: None,
        probe: Some(probe.clone()),
        scan: None,
        disjointness_report: report,
        reason: Some(reason),
    };

    // Resonance and I_{n+1}.
    let j = CircleSet::from_arcs(probe.arcs.iter().copied());
    let range = match resonance_range(params, state) {
        Ok(r) => r,
        Err(e) => return fail(report, e),
    };
    let resonance = first_self_overlap(&j, omega, range);
    let (i_next, nu) = match resonance {
        None => (j.clone(), 0),
        Some(_) if j.n_arcs() == 2 => {
            let a = CircleSet::from_arcs([j.arcs()[0]]);
            let b = CircleSet::from_arcs([j.arcs()[1]]);
            let found = (1..=range).find_map(|nu| {
                let t = nu as f64 * omega;
                if a.translate(t).overlaps(&b) {
                    Some((nu, a.clone(), b.clone()))
                } else if b.translate(t).overlaps(&a) {
                    Some((nu, b.clone(), a.clone()))
                } else {
                    None
                }
            });
            let (nu, j1, j2) = found.expect("a resonance between two arcs has a positive labelling");
            let i = j1.union(&j2.translate(-(nu as f64) * omega));
            let tol = 4.0 * f64::EPSILON;
            report.push(check("I_{n+1} inside I_n", (!i.is_subset_of(&state.i_n, tol)).then_some(0)));
            report.push(check(
                "I_{n+1} + nu*omega inside I_n",
                (!i.translate(nu as f64 * omega).is_subset_of(&state.i_n, tol)).then_some(nu as i64),
            ));
            (i, nu)
        }
        Some(m) => {
            report.push(check("J_{n+1} single arc disjoint from its short translates", Some(m)));
            return fail(report, format!("J_{} meets its own translate by {m}*omega", state.n + 1));
        }
    };
    if state.mode == Mode::PaperConstants {
        let bound = 0.5 * params.lp(-(state.k_n as f64) / 9.0);
        let long = i_next.arcs().iter().any(|a| a.len >= bound);
        report.push(check("arcs of I_{n+1} shorter than lambda^{-K_n/9}/2", long.then_some(0)));
    }

    // K_{n+1} and M_{n+1}.
    let (k_lo, k_hi) = match k_window(params, state, nu > 0, nu) {
        Ok(w) => w,
        Err(e) => return fail(report, e),
    };
    let banned = forbidden(state, omega);
    let Some(k_next) = (k_lo..=k_hi).find(|&k| !i_next.translate(k as f64 * omega).overlaps(&banned)) else {
        report.push(check("I_{n+1} + K_{n+1}*omega outside the doubled earlier translates", Some(k_hi as i64)));
        return fail(report, format!("no K in [{k_lo}, {k_hi}] keeps I_{{n+1}} + K*omega clear"));
    };
    report.push(check("I_{n+1} + K_{n+1}*omega outside the doubled earlier translates", None));
    let (m_lo, m_hi) = (k_next * k_next, 2 * k_next * k_next);
    let Some(m_next) = (m_lo..=m_hi).find(|&m| !i_next.translate(-(m as f64) * omega).overlaps(&banned)) else {
        report.push(check("I_{n+1} - M_{n+1}*omega outside the doubled earlier translates", Some(m_hi as i64)));
        return fail(report, format!("no M in [{m_lo}, {m_hi}] keeps I_{{n+1}} - M*omega clear"));
    };
    report.push(check("I_{n+1} - M_{n+1}*omega outside the doubled earlier translates", None));
    report.push(check(
        "I_{n+1} disjoint from I_{n+1} + m*omega, 0 < |m| <= 2*M_{n+1}",
        first_self_overlap(&i_next, omega, 2 * m_next),
    ));
    report.push(check("nu_{n+1} <= K_{n+1}/2", (2 * nu > k_next).then_some(nu as i64)));
    if let Some(c) = report.iter().find(|c| !c.passed) {
        let reason = format!("condition fails: {}", c.condition);
        return fail(report, reason);
    }

    let (e_minus, e_plus) = next_energy_window(params, state, &probe, m_next);
    let mut scales = state.scales.clone();
    scales.push(Scale {
        i: i_next,
        k: k_next,
        m: m_next,
        nu,
    });
    let mut history = state.branch_history.clone();
    history.push(record);
    let next = ScaleState::new(scales, e_minus, e_plus, history, state.mode, report.clone(), omega);
    StepOutcome {
        kind: StepKind::Continued,
        next: Some(next),
        probe: Some(probe),
        scan: None,
        disjointness_report: report,
        reason: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::init_scale0;

    const TOY: Mode = Mode::Toy { k0: 4, growth: 1.5 };

    #[test]
    fn refine_tolerance_is_clamped() {
        assert_eq!(refine_tol(&CircleSet::arc(0.1, 0.2)), 1e-13);
        assert_eq!(refine_tol(&CircleSet::arc(0.1, 1e-12)), 2.0 * f64::EPSILON);
        assert!((refine_tol(&CircleSet::arc(0.1, 1e-8)) / 1e-14 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn toy_windows() {
        let p = CocycleParams::almost_mathieu(100.0, 0.0);
        let s = init_scale0(&p, TOY).unwrap();
        assert_eq!(k_window(&p, &s, false, 0).unwrap(), (33, 66));
        assert_eq!(k_window(&p, &s, true, 20).unwrap(), (40, 80));
        assert_eq!(resonance_range(&p, &s).unwrap(), 4 * 33 * 33);
    }

    #[test]
    fn forbidden_set_covers_the_doubled_translates() {
        let p = CocycleParams::almost_mathieu(1e8, 2_550_000.0);
        let s = init_scale0(&p, TOY).unwrap();
        let f = forbidden(&s, p.omega);
        for m in [-32, 0, 32] {
            for a in s.i_n.arcs() {
                assert!(f.contains(qpc_core::wrap(a.midpoint() + m as f64 * p.omega)));
            }
        }
        assert!(f.measure() <= 65.0 * 2.0 * s.i_n.measure() + 1e-12);
    }

    #[test]
    fn empty_interval_stops() {
        let p = CocycleParams::almost_mathieu(100.0, 500.0);
        let s = init_scale0(&p, TOY).unwrap();
        let out = inductive_step(&p, &s, 100);
        assert_eq!(out.kind, StepKind::StoppedUh);
        assert!(out.probe.is_none());
    }

    #[test]
    fn gap_energy_stops_at_scale_zero() {
        let p = CocycleParams::almost_mathieu(100.0, -37.0);
        let s = init_scale0(&p, TOY).unwrap();
        let out = inductive_step(&p, &s, 2000);
        assert_eq!(out.kind, StepKind::StoppedUh);
        assert_eq!(out.probe.unwrap().branch, Branch::Stop);
    }

    #[test]
    fn interior_energy_at_large_coupling_reaches_sub_float_arcs() {
        let p = CocycleParams::almost_mathieu(1e8, 2_550_000.0);
        let s = init_scale0(&p, TOY).unwrap();
        let out = inductive_step(&p, &s, 2000);
        assert_eq!(out.kind, StepKind::Unresolved);
        assert_eq!(out.probe.unwrap().branch, Branch::BranchI);
        assert!(out.reason.unwrap().contains("below double-precision resolution"));
        assert!(out.next.is_none());
    }

    fn synthetic(arcs: Vec<qpc_core::Arc>, branch: Branch, bend: Option<Bend>, p: &CocycleParams) -> ProbeResult {
        ProbeResult {
            samples: Vec::new(),
            j_next: CircleSet::from_arcs(arcs.iter().copied()),
            shape: match arcs.len() {
                0 => qpc_geometry::Shape::Empty,
                1 => qpc_geometry::Shape::SingleInterval,
                _ => qpc_geometry::Shape::TwoIntervals,
            },
            arcs,
            branch,
            bend,
            deriv_stats: Default::default(),
            eps: 2.0 * p.lp(-0.75),
        }
    }

    fn large_coupling() -> (CocycleParams, ScaleState) {
        let p = CocycleParams::almost_mathieu(1e8, 2_550_000.0);
        let s = init_scale0(&p, TOY).unwrap();
        (p, s)
    }

    #[test]
    fn stop_probe_stops() {
        let (p, s) = large_coupling();
        let out = step_from_probe(&p, &s, synthetic(Vec::new(), Branch::Stop, None, &p));
        assert_eq!(out.kind, StepKind::StoppedUh);
        assert!(out.next.is_none());
    }

    #[test]
    fn two_short_arcs_continue() {
        let (p, s) = large_coupling();
        let a = s.i_n.arcs()[0];
        let arcs = vec![qpc_core::Arc::new(a.at(0.3), 1e-9), qpc_core::Arc::new(a.at(0.7), 1e-9)];
        let out = step_from_probe(&p, &s, synthetic(arcs, Branch::BranchI, None, &p));
        assert_eq!(out.kind, StepKind::Continued, "{:?}", out.reason);
        assert!(out.disjointness_report.iter().all(|c| c.passed));
        let next = out.next.unwrap();
        assert_eq!(next.n, 1);
        assert_eq!(next.nu_n, 0);
        assert_eq!(next.i_n.n_arcs(), 2);
        assert!(next.i_n.is_subset_of(&s.i_n, 0.0));
        assert!((33..=66).contains(&next.k_n));
        assert!(next.m_n >= next.k_n * next.k_n && next.m_n <= 2 * next.k_n * next.k_n);
        assert_eq!(next.branch_history, vec![BranchRecord::BranchI]);
        assert!(next.e_minus > 0.0 && next.e_minus < s.e_minus);
        assert!(next.e_plus > 0.0 && next.e_plus < s.e_plus);
        // The chosen K and M miss the doubled translates of I_0.
        let banned = forbidden(&s, p.omega);
        assert!(!next.i_n.translate(next.k_n as f64 * p.omega).overlaps(&banned));
        assert!(!next.i_n.translate(-(next.m_n as f64) * p.omega).overlaps(&banned));
        // And are the least such values.
        for k in 33..next.k_n {
            assert!(next.i_n.translate(k as f64 * p.omega).overlaps(&banned), "K = {k}");
        }
    }

    #[test]
    fn resonant_arcs_are_folded_onto_one() {
        let (p, s) = large_coupling();
        // I_0 meets its translate by 17ω; put J² = J¹ + 17ω inside both.
        let overlap = s.i_n.intersect(&s.i_n.translate(-17.0 * p.omega));
        let a = qpc_core::Arc::new(overlap.arcs()[0].at(0.3), 1e-9);
        let b = qpc_core::Arc::new(a.lo + 17.0 * p.omega, 1e-9);
        let out = step_from_probe(&p, &s, synthetic(vec![a, b], Branch::BranchI, None, &p));
        assert_eq!(out.kind, StepKind::Continued, "{:?}", out.reason);
        let names: Vec<&str> = out.disjointness_report.iter().map(|c| c.condition.as_str()).collect();
        assert!(names.contains(&"I_{n+1} + nu*omega inside I_n"));
        let next = out.next.unwrap();
        assert_eq!(next.nu_n, 17);
        assert!(next.k_n >= 34);
        assert_eq!(next.i_n.n_arcs(), 1);
        assert!((next.i_n.arcs()[0].lo - a.lo).abs() < 1e-15);
        assert!((next.i_n.measure() - 1e-9).abs() < 1e-15);
    }

    #[test]
    fn single_arc_keeps_the_bent_side() {
        let (p, s) = large_coupling();
        let arcs = vec![qpc_core::Arc::new(s.i_n.arcs()[0].at(0.3), 1e-9)];
        let out = step_from_probe(&p, &s, synthetic(arcs, Branch::BranchII, Some(Bend::Upward), &p));
        assert_eq!(out.kind, StepKind::Continued, "{:?}", out.reason);
        let next = out.next.unwrap();
        assert_eq!(next.branch_history, vec![BranchRecord::BranchII(Bend::Upward)]);
        assert_eq!(next.e_minus, s.e_minus);
        assert!(next.e_plus < s.e_plus);
    }

    #[test]
    fn blocked_k_window_is_unresolved_with_the_failing_condition() {
        let (p, s) = large_coupling();
        let a = s.i_n.arcs()[0];
        let arcs = vec![qpc_core::Arc::new(a.at(0.9), 1e-9)];
        let out = step_from_probe(&p, &s, synthetic(arcs, Branch::BranchII, Some(Bend::Downward), &p));
        assert_eq!(out.kind, StepKind::Unresolved);
        assert!(out.reason.unwrap().starts_with("no K in [33, 66]"));
        assert!(!out.disjointness_report.last().unwrap().passed);
    }
}
