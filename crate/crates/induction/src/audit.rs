//! Growth audits along orbits that start in `Θ_n` with a large slope.

use qpc_core::{CocycleParams, ProjPoint};
use qpc_dynamics::iterate;
use qpc_geometry::entry_time;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::state::ScaleState;

/// Relative slack on growth rates. At `k = 0` the bound is attained
/// exactly by `|r_0| = λ^{3/4}` when `n = 0`.
const RATE_TOL: f64 = 1e-12;

/// Pass counts and extremes of the growth audit at one scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// Scale index `n`.
    pub n: usize,
    /// Samples offered.
    pub requested: usize,
    /// Samples outside `Θ_n`, skipped.
    pub rejected: usize,
    /// Orbits run: two starting slopes `±λ^{3/4}` per accepted sample.
    pub orbits: usize,
    /// Orbits on which `|r_0⋯r_k| ≥ λ^{(2/3+(1/12)^{n+1})(k+1)}` at every
    /// checked `k` before entry into `I_n`, up to a relative `10⁻¹²`.
    pub growth_pass: usize,
    /// Orbits on which every `|r_k| < λ^{3/4}` before entry has
    /// `θ_k ∈ G_{n−1}`.
    pub small_slope_pass: usize,
    /// Orbits on which `|r_k| ≥ λ^{3/4}` at every `k` before entry.
    pub large_slope_pass: usize,
    /// `min_k (log|r_0⋯r_k|/(k+1) − (2/3+(1/12)^{n+1}) log λ)`, in nats.
    pub worst_margin: f64,
    /// `min_k log|r_0⋯r_k|/(k+1)`, in nats.
    pub min_rate: f64,
    /// The growth exponent `2/3 + (1/12)^{n+1}`.
    pub exponent: f64,
    /// Longest orbit run.
    pub horizon: usize,
}

impl AuditReport {
    fn fraction(&self, count: usize) -> f64 {
        if self.orbits == 0 {
            1.0
        } else {
            count as f64 / self.orbits as f64
        }
    }

    /// Fraction of orbits passing the growth check.
    #[must_use]
    pub fn growth_fraction(&self) -> f64 {
        self.fraction(self.growth_pass)
    }

    /// Fraction of orbits passing the small-slope location check.
    #[must_use]
    pub fn small_slope_fraction(&self) -> f64 {
        self.fraction(self.small_slope_pass)
    }

    /// Fraction of orbits keeping every slope large before entry.
    #[must_use]
    pub fn large_slope_fraction(&self) -> f64 {
        self.fraction(self.large_slope_pass)
    }
}

struct OrbitAudit {
    growth: bool,
    small: bool,
    large: bool,
    margin: f64,
    rate: f64,
}

/// Audit orbits of `(θ_0, ±λ^{3/4})` for `θ_0 ∈ Θ_n` up to the first entry
/// into `I_n`, or `horizon` steps when there is none.
///
/// The growth bound is checked at every `k` with `|r_k| ≥ λ^{−2}`; a smaller
/// `r_k` is paired with `r_{k+1}` and the bound applies after the pair.
#[must_use]
pub fn product_growth_audit(params: &CocycleParams, state: &ScaleState, thetas: &[f64], horizon: usize) -> AuditReport {
    let ln_l = params.lambda.ln();
    let exponent = 2.0 / 3.0 + (1.0f64 / 12.0).powi(state.n as i32 + 1);
    let large = params.lp(0.75);
    let tiny = params.lambda.powi(-2);
    let g_prev = state.previous_sets(params.omega).g;
    let accepted: Vec<f64> = thetas
        .iter()
        .copied()
        .filter(|&t| state.theta_sets.theta.contains(t))
        .collect();

    let audits: Vec<OrbitAudit> = accepted
        .par_iter()
        .flat_map_iter(|&t0| {
            let steps = entry_time(t0, &state.i_n, params.omega, horizon).unwrap_or(horizon);
            let g_prev = &g_prev;
            [large, -large].into_iter().map(move |r0| {
                let orbit = iterate(params, t0, ProjPoint::from_value(r0), steps);
                let mut a = OrbitAudit {
                    growth: true,
                    small: true,
                    large: true,
                    margin: f64::INFINITY,
                    rate: f64::INFINITY,
                };
                for k in 0..steps {
                    let rk = orbit.r[k].abs();
                    if rk < large {
                        a.large = false;
                        if !g_prev.contains(orbit.theta[k]) {
                            a.small = false;
                        }
                    }
                    if rk < tiny {
                        continue;
                    }
                    let rate = orbit.log_abs_product(k) / (k + 1) as f64;
                    a.rate = a.rate.min(rate);
                    let margin = rate - exponent * ln_l;
                    a.margin = a.margin.min(margin);
                    if margin < -RATE_TOL * ln_l {
                        a.growth = false;
                    }
                }
                a
            })
        })
        .collect();

    AuditReport {
        n: state.n,
        requested: thetas.len(),
        rejected: thetas.len() - accepted.len(),
        orbits: audits.len(),
        growth_pass: audits.iter().filter(|a| a.growth).count(),
        small_slope_pass: audits.iter().filter(|a| a.small).count(),
        large_slope_pass: audits.iter().filter(|a| a.large).count(),
        worst_margin: audits.iter().map(|a| a.margin).fold(f64::INFINITY, f64::min),
        min_rate: audits.iter().map(|a| a.rate).fold(f64::INFINITY, f64::min),
        exponent,
        horizon,
    }
}

/// The first `count` points of the sequence `{(i + 1)√2}` that lie in
/// `Θ_n`, or fewer if `100·count` terms do not supply them.
#[must_use]
pub fn sample_theta(state: &ScaleState, count: usize) -> Vec<f64> {
    let step = std::f64::consts::SQRT_2;
    (1..=100 * count.max(1))
        .map(|i| (i as f64 * step).fract())
        .filter(|&t| state.theta_sets.theta.contains(t))
        .take(count)
        .collect()
}
