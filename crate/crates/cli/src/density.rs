//! Box-counting density of one fiber orbit on `𝕋 × ℝ̂`.

use qpc_core::{CocycleParams, ProjPoint};
use qpc_dynamics::phi_step;

/// Fraction of the `cells × cells` boxes of `[0,1) × [0,1)` visited by
/// `(θ_k, angle(r_k))` for `0 ≤ k ≤ n`, where `angle` is the position of
/// the slope on `ℝ̂` as a fraction of `π`.
#[must_use]
pub fn visited_fraction(params: &CocycleParams, theta0: f64, r0: ProjPoint, n: usize, cells: usize) -> f64 {
    let cells = cells.max(1);
    let mut seen = vec![false; cells * cells];
    let index = |x: f64| ((x * cells as f64) as usize).min(cells - 1);
    let (mut t, mut r) = (theta0, r0);
    for k in 0..=n {
        seen[index(t) * cells + index(r.angle_fraction())] = true;
        if k < n {
            (t, r) = phi_step(params, t, r);
        }
    }
    seen.iter().filter(|&&b| b).count() as f64 / (cells * cells) as f64
}
