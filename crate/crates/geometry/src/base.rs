//! The first scale `(I_0, K_0, M_0, ν_0)` and its translate-disjointness checks.

use qpc_core::{CircleSet, CocycleParams};
use serde::{Deserialize, Serialize};

use crate::critical::CriticalSet;
use crate::error::GeometryError;

/// How `K_0`, `M_0` and the resonance range are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BaseSchedule {
    /// `K_0 = ⌊λ^{1/(60τ)}⌋` (or `⌊λ^{1/(20τ)}⌋` when resonant), `M_0 = K_0²`,
    /// resonances searched up to `⌊λ^{1/(25τ)}⌋`. A failed check is an error.
    Paper,
    /// Fixed `K_0 = k0` and `M_0 = m0`, resonances searched up to `⌊k0/2⌋`.
    /// Failed checks are recorded in [`BaseScale::checks`] instead of raised.
    Toy {
        /// `K_0`.
        k0: u64,
        /// `M_0`.
        m0: u64,
    },
}

/// Outcome of one translate-disjointness condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointnessCheck {
    /// Name of the condition.
    pub condition: String,
    /// Whether it holds.
    pub passed: bool,
    /// Smallest offending shift `m` (by `|m|`, positive first), if any.
    pub offender: Option<i64>,
}

/// The first scale of the construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseScale {
    /// `I_0`: `J_0` itself, or `J_0¹ ∪ (J_0² − ν_0ω)` when resonant.
    pub i0: CircleSet,
    /// `K_0`.
    pub k0: u64,
    /// `M_0`.
    pub m0: u64,
    /// `ν_0`, zero when non-resonant.
    pub nu0: u64,
    /// Whether two arcs of `J_0` are joined by a short translate.
    pub resonant: bool,
    /// Whether the schedule gives `K_0 ≤ 1`, which leaves no room for the
    /// separation `M_0 ≫ K_0 ≫ 1`.
    pub degenerate: bool,
    /// Largest `|m|` searched for a resonance.
    pub resonance_range: u64,
    /// Every disjointness condition checked, in order.
    pub checks: Vec<DisjointnessCheck>,
}

impl BaseScale {
    /// Whether every recorded condition holds.
    #[must_use]
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// [`build_base_scale_with`] using [`BaseSchedule::Paper`].
pub fn build_base_scale(params: &CocycleParams, j0: &CriticalSet) -> Result<BaseScale, GeometryError> {
    build_base_scale_with(params, j0, BaseSchedule::Paper)
}

/// Shifts `m ≠ 0` with `|m| ≤ n`, ordered `1, −1, 2, −2, …`.
fn shifts(n: u64) -> impl Iterator<Item = i64> {
    (1..=n as i64).flat_map(|m| [m, -m])
}

/// First `m` in `ms` for which `a ∩ (b + mω) ≠ ∅`.
fn first_overlap<I: Iterator<Item = i64>>(a: &CircleSet, b: &CircleSet, omega: f64, ms: I) -> Option<i64> {
    ms.into_iter().find(|&m| a.overlaps(&b.translate(m as f64 * omega)))
}

fn check(condition: &str, offender: Option<i64>) -> DisjointnessCheck {
    DisjointnessCheck {
        condition: condition.to_string(),
        passed: offender.is_none(),
        offender,
    }
}

/// Build `(I_0, K_0, M_0, ν_0)` from `J_0` and verify the disjointness
/// conditions at shifts `0 < |m| ≤ 2M_0`. With [`BaseSchedule::Paper`] the
/// first failed condition is returned as an error.
///
/// The resonance test scans `J_0 ∩ (J_0 + mω)` directly. When two arcs
/// `A`, `B` resonate, `ν_0` is the least `ν ≥ 1` with `(J¹ + νω) ∩ J² ≠ ∅`
/// for one of the labellings `(J¹, J²) = (A, B)` or `(B, A)`.
pub fn build_base_scale_with(
    params: &CocycleParams,
    j0: &CriticalSet,
    schedule: BaseSchedule,
) -> Result<BaseScale, GeometryError> {
    let scale = base_scale_report(params, j0, schedule);
    if schedule == BaseSchedule::Paper {
        if let Some(c) = scale.checks.iter().find(|c| !c.passed) {
            return Err(GeometryError::DisjointnessFailure {
                condition: c.condition.clone(),
                offender: c.offender.unwrap_or(0),
            });
        }
    }
    Ok(scale)
}

/// The construction of [`build_base_scale_with`] with every check recorded
/// and none raised, for either schedule.
#[must_use]
pub fn base_scale_report(params: &CocycleParams, j0: &CriticalSet, schedule: BaseSchedule) -> BaseScale {
    let omega = params.omega;
    let tau = params.tau;
    let lambda = params.lambda;
    let resonance_range = match schedule {
        BaseSchedule::Paper => lambda.powf(1.0 / (25.0 * tau)).floor() as u64,
        BaseSchedule::Toy { k0, .. } => k0 / 2,
    };
    let j = &j0.set;
    let resonance = first_overlap(j, j, omega, shifts(resonance_range));

    let mut checks = Vec::new();
    let (i0, nu0, labelled) = match resonance {
        Some(_) if j.n_arcs() == 2 => {
            let a = CircleSet::from_arcs([j.arcs()[0]]);
            let b = CircleSet::from_arcs([j.arcs()[1]]);
            let mut found = None;
            for nu in 1..=resonance_range {
                let t = nu as f64 * omega;
                if a.translate(t).overlaps(&b) {
                    found = Some((nu, a.clone(), b.clone()));
                    break;
                }
                if b.translate(t).overlaps(&a) {
                    found = Some((nu, b.clone(), a.clone()));
                    break;
                }
            }
            let (nu, j1, j2) = found.expect("a resonance between two arcs has a positive labelling");
            (j1.union(&j2.translate(-(nu as f64) * omega)), nu, Some((j1, j2)))
        }
        Some(m) => {
            // A single arc overlapping its own short translate: no resonant
            // relabelling exists.
            checks.push(check("J0 single arc disjoint from its short translates", Some(m)));
            (j.clone(), 0, None)
        }
        None => (j.clone(), 0, None),
    };
    let resonant = labelled.is_some();
    let (k0, m0) = match schedule {
        BaseSchedule::Paper => {
            let exponent = if resonant { 20.0 } else { 60.0 };
            let k0 = lambda.powf(1.0 / (exponent * tau)).floor() as u64;
            (k0, k0 * k0)
        }
        BaseSchedule::Toy { k0, m0 } => (k0, m0),
    };

    let range = 2 * m0;
    checks.push(check(
        "I0 disjoint from I0 + m*omega, 0 < |m| <= 2*M0",
        first_overlap(&i0, &i0, omega, shifts(range)),
    ));
    if let Some((j1, j2)) = &labelled {
        let nu = nu0 as i64;
        let ms = std::iter::once(0)
            .chain(shifts(range))
            .filter(move |&m| m != 0 && m != nu);
        checks.push(check(
            "J0 disjoint from I0 + m*omega, |m| <= 2*M0, m not in {0, nu0}",
            first_overlap(j, &i0, omega, ms),
        ));
        checks.push(check(
            "I0 disjoint from J0^2",
            i0.overlaps(j2).then_some(0),
        ));
        checks.push(check(
            "I0 + nu0*omega disjoint from J0^1",
            i0.translate(nu0 as f64 * omega).overlaps(j1).then_some(nu),
        ));
    }

    BaseScale {
        i0,
        k0,
        m0,
        nu0,
        resonant,
        degenerate: k0 <= 1,
        resonance_range,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::critical_set;
    use qpc_core::{Arc, GOLDEN_OMEGA};

    fn synthetic(arcs: Vec<Arc>) -> CriticalSet {
        let set = CircleSet::from_arcs(arcs);
        let n = set.n_arcs();
        CriticalSet {
            set,
            branch_signs: vec![1; n],
            window: 0.0,
        }
    }

    #[test]
    fn single_arc_is_non_resonant_with_degenerate_paper_constants() {
        let p = CocycleParams::almost_mathieu(100.0, 100.0);
        let j0 = critical_set(&p, 1e-12).unwrap();
        let b = base_scale_report(&p, &j0, BaseSchedule::Paper);
        assert!(!b.resonant);
        assert_eq!(b.nu0, 0);
        assert_eq!(b.k0, 100f64.powf(1.0 / 60.0).floor() as u64);
        assert_eq!(b.k0, 1);
        assert_eq!(b.m0, 1);
        assert!(b.degenerate);
        assert_eq!(b.i0, j0.set);
        // The arc has length ≈ 0.38 > ‖2ω‖ ≈ 0.236, so it meets its
        // translate by 2ω = 2M_0·ω and the checked build refuses it.
        assert!(!b.all_checks_pass());
        assert!(matches!(build_base_scale(&p, &j0), Err(GeometryError::DisjointnessFailure { offender: 2, .. })));
    }

    #[test]
    fn synthetic_resonant_pair() {
        // λ = 10¹² gives a resonance range ⌊λ^{1/25}⌋ = 3.
        let p = CocycleParams::almost_mathieu(1e12, 0.0);
        let a = Arc::new(0.2, 0.001);
        let b = Arc::new(a.lo + 3.0 * GOLDEN_OMEGA, 0.001);
        let j0 = synthetic(vec![a, b]);
        let s = build_base_scale(&p, &j0).unwrap();
        assert!(s.resonant);
        assert_eq!(s.nu0, 3);
        assert_eq!(s.i0.n_arcs(), 1);
        assert!((s.i0.measure() - 0.001).abs() < 1e-9);
        assert_eq!(s.k0, 1e12f64.powf(1.0 / 20.0).floor() as u64);
        assert!(s.all_checks_pass());
        assert_eq!(s.checks.len(), 4);
    }

    #[test]
    fn distant_pair_is_non_resonant() {
        let p = CocycleParams::almost_mathieu(1e12, 0.0);
        let n = p.lambda.powf(1.0 / 25.0).floor() as i64;
        let j0 = synthetic(vec![Arc::new(0.1, 0.001), Arc::new(0.45, 0.001)]);
        // Oracle: direct scan of every short translate.
        for m in (-n..=n).filter(|&m| m != 0) {
            assert!(!j0.set.overlaps(&j0.set.translate(m as f64 * GOLDEN_OMEGA)));
        }
        let s = build_base_scale(&p, &j0).unwrap();
        assert!(!s.resonant);
        assert_eq!(s.i0, j0.set);
    }

    #[test]
    fn toy_mode_records_failures() {
        let p = CocycleParams::almost_mathieu(100.0, 0.0);
        let j0 = critical_set(&p, 1e-12).unwrap();
        let s = build_base_scale_with(&p, &j0, BaseSchedule::Toy { k0: 4, m0: 16 }).unwrap();
        assert!(s.resonant);
        assert_eq!(s.nu0, 1);
        assert_eq!(s.i0.n_arcs(), 1);
        assert!(!s.all_checks_pass());
        // The same J_0 with paper constants (K_0 = M_0 = 1) meets I_0 + 2ω.
        assert_eq!(
            build_base_scale(&p, &j0),
            Err(GeometryError::DisjointnessFailure {
                condition: "I0 disjoint from I0 + m*omega, 0 < |m| <= 2*M0".into(),
                offender: 2,
            })
        );
    }
}
