//! The state of the construction at one scale and the sets derived from the
//! scales so far.

use qpc_core::{Arc, CircleSet, CocycleParams};
use qpc_geometry::{base_scale_report, build_base_scale, critical_set, BaseSchedule, Bend, DisjointnessCheck, GeometryError};
use serde::{Deserialize, Serialize};

use crate::error::InductionError;

/// How the integers `K_n`, `M_n` and the resonance ranges are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    /// `K_{n+1}` between `λ^{K_n/(60τ)}` and `λ^{K_n/(20τ)}`. The base scale
    /// must pass every disjointness check.
    PaperConstants,
    /// `K_0 = k0`, `M_0 = k0²` and `K_{n+1} ≥ ⌈K_n^growth⌉`. Failed base-scale
    /// checks are recorded and every later check stays active.
    Toy {
        /// `K_0`.
        k0: u64,
        /// Exponent of the schedule for `K`.
        growth: f64,
    },
}

/// The data of one finished scale `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    /// `I_j`.
    pub i: CircleSet,
    /// `K_j`.
    pub k: u64,
    /// `M_j`.
    pub m: u64,
    /// `ν_j`.
    pub nu: u64,
}

/// The branch taken by the probe at one scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchRecord {
    /// Two monotone arcs of opposite slope.
    BranchI,
    /// One arc, bent as recorded.
    BranchII(Bend),
}

/// `(Θ_n, G_n, S_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaSets {
    /// `Θ_n = 𝕋 ∖ (⋃_{j<n} ⋃_{m=−M_j+1}^{ν_j} (I_j + mω) ∪ ⋃_{m=0}^{ν_n} (I_n + mω))`.
    pub theta: CircleSet,
    /// `G_n = ⋃_{j≤n} ⋃_{m=1}^{K_j} (I_j + mω)`.
    pub g: CircleSet,
    /// `S_n = 𝕋 ∖ ⋃_{j≤n} ⋃_{m=1}^{M_j} (I_j + mω)`.
    pub s: CircleSet,
}

impl ThetaSets {
    /// The sets for the scales `scales[0..=n]`; empty `scales` gives
    /// `(𝕋, ∅, 𝕋)`, the values before the first scale.
    #[must_use]
    pub fn from_scales(scales: &[Scale], omega: f64) -> Self {
        let Some((last, earlier)) = scales.split_last() else {
            return Self {
                theta: CircleSet::full(),
                g: CircleSet::empty(),
                s: CircleSet::full(),
            };
        };
        let mut removed = last.i.union_of_translates(omega, 0..=last.nu as i64);
        for sc in earlier {
            removed = removed.union(&sc.i.union_of_translates(omega, -(sc.m as i64) + 1..=sc.nu as i64));
        }
        let mut g = CircleSet::empty();
        let mut s_removed = CircleSet::empty();
        for sc in scales {
            g = g.union(&sc.i.union_of_translates(omega, 1..=sc.k as i64));
            s_removed = s_removed.union(&sc.i.union_of_translates(omega, 1..=sc.m as i64));
        }
        Self {
            theta: removed.complement(),
            g,
            s: s_removed.complement(),
        }
    }
}

/// The construction at scale `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleState {
    /// Scale index `n`.
    pub n: usize,
    /// `I_n`.
    pub i_n: CircleSet,
    /// `K_n`.
    pub k_n: u64,
    /// `M_n`.
    pub m_n: u64,
    /// `ν_n`.
    pub nu_n: u64,
    /// `e_n^−`.
    pub e_minus: f64,
    /// `e_n^+`.
    pub e_plus: f64,
    /// Branch taken at each finished scale `0..n`.
    pub branch_history: Vec<BranchRecord>,
    /// `(Θ_n, G_n, S_n)`.
    pub theta_sets: ThetaSets,
    /// Scales `0..n`, the last being the current one.
    pub scales: Vec<Scale>,
    /// The schedule.
    pub mode: Mode,
    /// Checks made when this scale was built.
    pub checks: Vec<DisjointnessCheck>,
    /// Whether the schedule leaves `K_n ≤ 1`.
    pub degenerate: bool,
}

impl ScaleState {
    /// Build a state from its scales, computing the derived sets.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        scales: Vec<Scale>,
        e_minus: f64,
        e_plus: f64,
        branch_history: Vec<BranchRecord>,
        mode: Mode,
        checks: Vec<DisjointnessCheck>,
        omega: f64,
    ) -> Self {
        let cur = scales.last().expect("at least one scale").clone();
        let theta_sets = ThetaSets::from_scales(&scales, omega);
        Self {
            n: scales.len() - 1,
            i_n: cur.i,
            k_n: cur.k,
            m_n: cur.m,
            nu_n: cur.nu,
            e_minus,
            e_plus,
            branch_history,
            theta_sets,
            scales,
            mode,
            checks,
            degenerate: cur.k <= 1,
        }
    }

    /// `(Θ_n, G_n, S_n)` with the current scale dropped: the sets at `n − 1`.
    #[must_use]
    pub fn previous_sets(&self, omega: f64) -> ThetaSets {
        ThetaSets::from_scales(&self.scales[..self.n], omega)
    }

    /// `Σ_j (M_j + K_j + ν_j + 1)·|I_j|`, a union bound for `|𝕋 ∖ Θ_{n+1}|`
    /// once the next scale is added.
    #[must_use]
    pub fn removed_measure_bound(&self) -> f64 {
        self.scales
            .iter()
            .map(|s| (s.m + s.k + s.nu + 1) as f64 * s.i.measure())
            .sum()
    }

    /// Midpoint of the first arc of `I_n` and its half-width.
    #[must_use]
    pub fn centre(&self) -> Option<(f64, f64)> {
        self.i_n.arcs().first().map(|a| (a.midpoint(), 0.5 * a.len))
    }
}

/// `kI`: every arc scaled by `k` about its centre.
#[must_use]
pub fn dilate(set: &CircleSet, k: f64) -> CircleSet {
    CircleSet::from_arcs(set.arcs().iter().map(|a| {
        let len = (k * a.len).min(1.0);
        Arc::new(a.midpoint() - 0.5 * len, len)
    }))
}

/// Scale 0: `I_0`, `K_0`, `M_0`, `ν_0` from the critical set.
///
/// An energy outside the window where the critical set is non-empty gives
/// `I_0 = ∅`. In [`Mode::PaperConstants`] a failed base-scale check is an
/// error; in [`Mode::Toy`] it is recorded in [`ScaleState::checks`].
pub fn init_scale0(params: &CocycleParams, mode: Mode) -> Result<ScaleState, InductionError> {
    if let Mode::Toy { k0, growth } = mode {
        if k0 < 1 || !(growth > 1.0) {
            return Err(InductionError::InvalidParameter(format!(
                "toy schedule needs k0 >= 1 and growth > 1, got k0 = {k0}, growth = {growth}"
            )));
        }
    }
    let schedule = match mode {
        Mode::PaperConstants => BaseSchedule::Paper,
        Mode::Toy { k0, .. } => BaseSchedule::Toy { k0, m0: k0 * k0 },
    };
    let j0 = match critical_set(params, 1e-13) {
        Ok(j0) => j0,
        Err(GeometryError::EmptyCritical(_)) => {
            let (k, m) = match schedule {
                BaseSchedule::Paper => {
                    let k = params.lp(1.0 / (60.0 * params.tau)).floor() as u64;
                    (k, k * k)
                }
                BaseSchedule::Toy { k0, m0 } => (k0, m0),
            };
            let scale = Scale {
                i: CircleSet::empty(),
                k,
                m,
                nu: 0,
            };
            return Ok(ScaleState::new(vec![scale], 1.0, 1.0, Vec::new(), mode, Vec::new(), params.omega));
        }
        Err(e) => return Err(e.into()),
    };
    let base = match mode {
        Mode::PaperConstants => build_base_scale(params, &j0)?,
        Mode::Toy { .. } => base_scale_report(params, &j0, schedule),
    };
    let scale = Scale {
        i: base.i0,
        k: base.k0,
        m: base.m0,
        nu: base.nu0,
    };
    Ok(ScaleState::new(vec![scale], 1.0, 1.0, Vec::new(), mode, base.checks, params.omega))
}
