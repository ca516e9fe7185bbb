//! Running the construction at one energy and reading off its outcome.

use qpc_core::{Arc, CircleSet, CocycleParams, ProjPoint};
use qpc_geometry::{Bend, Branch, DerivStats, Shape};
use serde::{Deserialize, Serialize};

use crate::audit::{product_growth_audit, sample_theta};
use crate::error::InductionError;
use crate::state::{init_scale0, BranchRecord, Mode, ScaleState};
use crate::step::{inductive_step, StepKind};

/// Orbits per scale in the growth audit.
const AUDIT_SAMPLES: usize = 64;
/// Longest audited orbit.
const AUDIT_HORIZON_CAP: usize = 10_000;

/// What the computed scales say about one energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EnergyClass {
    /// The small-value set vanished at this scale.
    UH {
        /// The scale whose probe found nothing.
        scale: usize,
    },
    /// Every computed scale from `from_scale` on took the single-arc
    /// branch, all bent the same way.
    GapEdgeEvidence {
        /// First scale of the run.
        from_scale: usize,
        /// The common bend.
        bend: Bend,
        /// Number of scales in the run.
        run: usize,
    },
    /// The deepest computed scale took the two-arc branch.
    MinimalEvidence {
        /// That scale.
        scale: usize,
    },
    /// No scale was completed, or the single-arc run changes bend.
    Inconclusive {
        /// Why.
        reason: String,
    },
}

/// Probe summary kept in the per-scale log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeStats {
    /// Shape of the small-value set.
    pub shape: Shape,
    /// Its arcs.
    pub arcs: Vec<Arc>,
    /// `2λ^{−3/4}`.
    pub eps: f64,
    /// Derivative data on the arcs.
    pub deriv: DerivStats,
}

/// Audit pass rates kept in the per-scale log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRates {
    /// Orbits audited.
    pub orbits: usize,
    /// Fraction passing the growth bound.
    pub growth: f64,
    /// Fraction passing the small-slope location check.
    pub small_slope: f64,
    /// Fraction keeping every slope large before entry.
    pub large_slope: f64,
    /// Smallest growth rate seen, in nats.
    pub min_rate: f64,
}

/// One line of the per-scale log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleLog {
    /// Scale index.
    pub n: usize,
    /// Arcs of `I_n`.
    pub i_n: Vec<Arc>,
    /// `K_n`.
    pub k_n: u64,
    /// `M_n`.
    pub m_n: u64,
    /// `ν_n`.
    pub nu_n: u64,
    /// How the step from this scale ended.
    pub step: StepKind,
    /// Branch taken by the probe at this scale, if one was.
    pub branch: Option<BranchRecord>,
    /// Probe summary, if the probe was classified.
    pub probe: Option<ProbeStats>,
    /// Growth audit over `Θ_n`.
    pub audit: AuditRates,
    /// `e_n^−`.
    pub e_minus: f64,
    /// `e_n^+`.
    pub e_plus: f64,
    /// Why the step stopped or is unresolved.
    pub reason: Option<String>,
}

/// The outcome of [`classify_energy`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// The energy.
    pub energy: f64,
    /// The classification.
    pub class: EnergyClass,
    /// Branch of every classified probe: one per completed scale, plus the
    /// probe of the last scale when the next one could not be built.
    pub branch_history: Vec<BranchRecord>,
    /// Midpoint and half-width of the deepest `I_n`, when the history ends
    /// in a run of single-arc scales.
    pub theta_star: Option<(f64, f64)>,
    /// One entry per scale visited.
    pub logs: Vec<ScaleLog>,
    /// The states of every scale visited, for [`compute_r_star`].
    #[serde(skip)]
    pub states: Vec<ScaleState>,
}

fn audit_rates(params: &CocycleParams, state: &ScaleState) -> AuditRates {
    let horizon = (2 * (state.m_n + state.k_n) as usize).clamp(1, AUDIT_HORIZON_CAP);
    let r = product_growth_audit(params, state, &sample_theta(state, AUDIT_SAMPLES), horizon);
    AuditRates {
        orbits: r.orbits,
        growth: r.growth_fraction(),
        small_slope: r.small_slope_fraction(),
        large_slope: r.large_slope_fraction(),
        min_rate: r.min_rate,
    }
}

/// Read the class off a branch history when the run ended without a stop.
fn evidence(history: &[BranchRecord], reason: Option<String>) -> EnergyClass {
    let Some(last) = history.last() else {
        return EnergyClass::Inconclusive {
            reason: reason.unwrap_or_else(|| "no scale was completed".into()),
        };
    };
    match last {
        BranchRecord::BranchI => EnergyClass::MinimalEvidence {
            scale: history.len() - 1,
        },
        BranchRecord::BranchII(bend) => {
            let run = history.iter().rev().take_while(|b| matches!(b, BranchRecord::BranchII(_))).count();
            let from_scale = history.len() - run;
            if history[from_scale..].iter().all(|b| b == last) {
                EnergyClass::GapEdgeEvidence {
                    from_scale,
                    bend: *bend,
                    run,
                }
            } else {
                EnergyClass::Inconclusive {
                    reason: "consecutive single-arc scales are bent in opposite directions".into(),
                }
            }
        }
    }
}

/// Run the construction at `params.energy` for at most `max_scales` steps
/// and classify the outcome. A failure to build scale 0 is reported as
/// [`EnergyClass::Inconclusive`].
#[must_use]
pub fn classify_energy(params: &CocycleParams, mode: Mode, max_scales: usize, grid: usize) -> EnergyReport {
    let mut report = EnergyReport {
        energy: params.energy,
        class: EnergyClass::Inconclusive {
            reason: "max_scales is zero".into(),
        },
        branch_history: Vec::new(),
        theta_star: None,
        logs: Vec::new(),
        states: Vec::new(),
    };
    let mut state = match init_scale0(params, mode) {
        Ok(s) => s,
        Err(e) => {
            report.class = EnergyClass::Inconclusive {
                reason: format!("scale 0: {e}"),
            };
            return report;
        }
    };
    let mut end_reason = None;
    let mut observed = None;
    for _ in 0..max_scales {
        let out = inductive_step(params, &state, grid);
        let branch = out.probe.as_ref().and_then(|p| match p.branch {
            Branch::BranchI => Some(BranchRecord::BranchI),
            Branch::BranchII => p.bend.map(BranchRecord::BranchII),
            Branch::Stop => None,
        });
        report.logs.push(ScaleLog {
            n: state.n,
            i_n: state.i_n.arcs().to_vec(),
            k_n: state.k_n,
            m_n: state.m_n,
            nu_n: state.nu_n,
            step: out.kind,
            branch,
            probe: out.probe.as_ref().map(|p| ProbeStats {
                shape: p.shape,
                arcs: p.arcs.clone(),
                eps: p.eps,
                deriv: p.deriv_stats.clone(),
            }),
            audit: audit_rates(params, &state),
            e_minus: state.e_minus,
            e_plus: state.e_plus,
            reason: out.reason.clone(),
        });
        match (out.kind, out.next) {
            (StepKind::StoppedUh, _) => {
                report.class = EnergyClass::UH { scale: state.n };
                report.branch_history = state.branch_history.clone();
                report.states.push(state);
                return report;
            }
            (StepKind::Continued, Some(next)) => {
                report.states.push(std::mem::replace(&mut state, next));
            }
            _ => {
                // The probe at this scale was classified even though the
                // next scale could not be built; its branch still counts.
                observed = branch;
                end_reason = out.reason;
                break;
            }
        }
    }
    let mut history = state.branch_history.clone();
    history.extend(observed);
    report.class = evidence(&history, end_reason.map(|r| format!("scale {}: {r}", state.n)));
    report.branch_history = history;
    if matches!(report.class, EnergyClass::GapEdgeEvidence { .. }) {
        report.theta_star = state.centre();
    }
    report.states.push(state);
    report
}

/// The nested slope intervals `B_n` and their limit estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RStar {
    /// Slope at the angular midpoint of the deepest `B_n`.
    pub r_star: f64,
    /// Slope width of the deepest `B_n`; `∞` if it contains `∞`.
    pub width: f64,
    /// `B_0, …, B_depth` as arcs of `ℝ̂`, in units of `π` radians.
    pub intervals: Vec<Arc>,
}

fn slope_of_angle(a: f64) -> f64 {
    let t = std::f64::consts::PI * a;
    ProjPoint::new(t.cos(), t.sin()).to_f64()
}

/// Push `{|r| ≥ λ^{3/4}}` over `θ* − M_nω` forward `M_n` steps for each
/// `n ≤ depth`, where `θ*` is the midpoint of `I_depth`, and intersect.
///
/// Each image is the arc of `ℝ̂` between the images of `±λ^{3/4}` that
/// contains the image of `∞`.
pub fn compute_r_star(params: &CocycleParams, states: &[ScaleState], depth: usize) -> Result<RStar, InductionError> {
    let deepest = states.get(depth).ok_or_else(|| {
        InductionError::InvalidParameter(format!("depth {depth} exceeds the {} computed scales", states.len()))
    })?;
    let (theta_star, _) = deepest
        .centre()
        .ok_or_else(|| InductionError::InvalidParameter(format!("I_{depth} is empty")))?;
    let large = params.lp(0.75);
    let mut intervals: Vec<Arc> = Vec::with_capacity(depth + 1);
    for (n, s) in states[..=depth].iter().enumerate() {
        let start = theta_star - s.m_n as f64 * params.omega;
        let push = |r: ProjPoint| {
            let mut t = start;
            let mut p = r;
            for _ in 0..s.m_n {
                p = p.step(params.v(t));
                t += params.omega;
            }
            p.angle_fraction()
        };
        let (a, b, mid) = (
            push(ProjPoint::from_value(large)),
            push(ProjPoint::from_value(-large)),
            push(ProjPoint::INFINITY),
        );
        let forward = Arc::from_endpoints(a, b);
        let arc = if forward.contains(mid) {
            forward
        } else {
            Arc::from_endpoints(b, a)
        };
        if let Some(prev) = intervals.last() {
            let tol = 1e-12;
            let outer = CircleSet::from_arcs([*prev]);
            let inner = CircleSet::from_arcs([arc]);
            if !inner.is_subset_of(&outer, tol) {
                let excess = inner.difference(&outer).measure();
                return Err(InductionError::NotNested {
                    outer: n - 1,
                    inner: n,
                    excess,
                });
            }
        }
        intervals.push(arc);
    }
    let last = *intervals.last().expect("depth + 1 intervals");
    let contains_infinity = last.contains(0.5);
    let width = if contains_infinity {
        f64::INFINITY
    } else {
        (slope_of_angle(last.hi()) - slope_of_angle(last.lo)).abs()
    };
    Ok(RStar {
        r_star: slope_of_angle(last.midpoint()),
        width,
        intervals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::step::StepKind;

    const TOY: Mode = Mode::Toy { k0: 4, growth: 1.5 };

    #[test]
    fn history_readings() {
        let up = BranchRecord::BranchII(Bend::Upward);
        let down = BranchRecord::BranchII(Bend::Downward);
        assert!(matches!(evidence(&[], Some("x".into())), EnergyClass::Inconclusive { reason } if reason == "x"));
        assert_eq!(
            evidence(&[up, BranchRecord::BranchI], None),
            EnergyClass::MinimalEvidence { scale: 1 }
        );
        assert_eq!(
            evidence(&[BranchRecord::BranchI, up, up], None),
            EnergyClass::GapEdgeEvidence {
                from_scale: 1,
                bend: Bend::Upward,
                run: 2
            }
        );
        assert!(matches!(evidence(&[down, up], None), EnergyClass::Inconclusive { .. }));
    }

    #[test]
    fn gap_energy_is_uh_at_scale_zero() {
        let p = CocycleParams::almost_mathieu(100.0, -37.0);
        let r = classify_energy(&p, TOY, 3, 2000);
        assert_eq!(r.class, EnergyClass::UH { scale: 0 });
        assert_eq!(r.logs.len(), 1);
        assert_eq!(r.logs[0].step, StepKind::StoppedUh);
        assert!(r.theta_star.is_none());
    }

    #[test]
    fn interior_energy_at_large_coupling_is_minimal_evidence() {
        let p = CocycleParams::almost_mathieu(1e8, 2_550_000.0);
        let r = classify_energy(&p, TOY, 3, 2000);
        // The probe at scale 0 takes the two-arc branch, but its arcs are
        // below float resolution and scale 1 cannot be built.
        assert_eq!(r.class, EnergyClass::MinimalEvidence { scale: 0 });
        assert_eq!(r.branch_history, vec![BranchRecord::BranchI]);
        assert_eq!(r.logs.len(), 1);
        assert_eq!(r.logs[0].step, StepKind::Unresolved);
        assert_eq!(r.logs[0].branch, Some(BranchRecord::BranchI));
        assert_eq!(r.states.len(), 1);
        let json = serde_json::to_string(&r.logs).unwrap();
        assert!(json.contains("\"k_n\":4"));
    }

    #[test]
    fn zero_scales_is_inconclusive() {
        let p = CocycleParams::almost_mathieu(100.0, 0.0);
        let r = classify_energy(&p, TOY, 0, 100);
        assert!(matches!(r.class, EnergyClass::Inconclusive { .. }));
    }

    #[test]
    fn r_star_from_scale_zero_is_large_and_sharp() {
        let p = CocycleParams::almost_mathieu(1e8, 2_550_000.0);
        let r = classify_energy(&p, TOY, 3, 2000);
        let rs = compute_r_star(&p, &r.states, 0).unwrap();
        assert_eq!(rs.intervals.len(), 1);
        // Sixteen steps with slopes of size λ contract by about λ^{-32}.
        assert!(rs.width < 1e-3, "{}", rs.width);
        assert!(rs.r_star.abs() >= p.lp(0.75));
        assert!(compute_r_star(&p, &r.states, 5).is_err());
    }

    #[test]
    fn nested_images_over_longer_runs() {
        // The same base point pushed over M and then 2M steps: the longer
        // run starts further back and lands inside the first image.
        let p = CocycleParams::almost_mathieu(1e8, 2_550_000.0);
        let s0 = init_scale0(&p, TOY).unwrap();
        let mut scales = s0.scales.clone();
        let mut deeper = scales[0].clone();
        deeper.m *= 2;
        scales.push(deeper);
        let s1 = ScaleState::new(scales, 1.0, 1.0, vec![BranchRecord::BranchI], TOY, Vec::new(), p.omega);
        let rs = compute_r_star(&p, &[s0, s1], 1).unwrap();
        assert_eq!(rs.intervals.len(), 2);
        assert!(rs.intervals[1].len <= rs.intervals[0].len);
    }
}
