//! The critical set `J_0 = {θ : |λf(θ) − E| ≤ 2λ^{3/4}}`.

use qpc_core::{wrap, Arc, CircleSet, CocycleParams};
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Grid used to locate the two critical points of the potential.
const CRITICAL_GRID: usize = 4096;
/// Maximum bisection steps for an endpoint.
const MAX_BISECT: usize = 60;

/// `J_0` with the monotonicity of `f` on each arc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    /// The arcs of `J_0`.
    pub set: CircleSet,
    /// Per arc: sign of `f′` on it, or `0` when the arc contains a critical point.
    pub branch_signs: Vec<i8>,
    /// Half-width `2λ^{3/4}` of the defining window.
    pub window: f64,
}

/// Locate `J_0` by bisection of `λf − E = ±2λ^{3/4}` on the two monotone
/// pieces of `f`, with endpoints to `refine_tol`.
pub fn critical_set(params: &CocycleParams, refine_tol: f64) -> Result<CriticalSet, GeometryError> {
    if !params.energy_in_window() {
        let (lo, hi) = params.energy_window();
        return Err(GeometryError::EmptyCritical(format!(
            "E = {} outside [{lo}, {hi}]",
            params.energy
        )));
    }
    let a = 2.0 * params.lp(0.75);
    let pot = &params.potential;
    let crit = pot.critical_points(CRITICAL_GRID);
    let theta_min = crit
        .iter()
        .copied()
        .min_by(|x, y| pot.f(*x).total_cmp(&pot.f(*y)))
        .ok_or_else(|| GeometryError::InvalidParameter("potential has no critical points".into()))?;
    let theta_max = crit
        .iter()
        .copied()
        .max_by(|x, y| pot.f(*x).total_cmp(&pot.f(*y)))
        .expect("non-empty");
    let g = |t: f64| params.v(t);
    let mut arcs = Vec::with_capacity(2);
    // Increasing piece [θ_min, θ_max], then decreasing piece [θ_max, θ_min + 1].
    let up_len = wrap(theta_max - theta_min);
    let down_len = 1.0 - up_len;
    for (start, len, increasing) in [(theta_min, up_len, true), (theta_max, down_len, false)] {
        // h is increasing along the piece in both cases.
        let h = |s: f64| {
            let v = g(start + s);
            if increasing {
                v
            } else {
                -v
            }
        };
        if h(0.0) > a || h(len) < -a {
            continue;
        }
        let lo = if h(0.0) >= -a {
            0.0
        } else {
            bisect_increasing(&h, -a, 0.0, len, refine_tol)
        };
        let hi = if h(len) <= a {
            len
        } else {
            bisect_increasing(&h, a, 0.0, len, refine_tol)
        };
        if hi >= lo {
            arcs.push(Arc::new(wrap(start + lo), hi - lo));
        }
    }
    let set = CircleSet::from_arcs(arcs);
    let branch_signs = set
        .arcs()
        .iter()
        .map(|arc| {
            if arc.contains(theta_min) || arc.contains(theta_max) {
                0
            } else if pot.df(arc.midpoint()) > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(CriticalSet {
        set,
        branch_signs,
        window: a,
    })
}

/// The point in `[lo, hi]` where the increasing `h` crosses `level`.
fn bisect_increasing<F: Fn(f64) -> f64>(h: &F, level: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..MAX_BISECT {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if h(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl CriticalSet {
    /// Total length of `J_0`.
    #[must_use]
    pub fn measure(&self) -> f64 {
        self.set.measure()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc_near_the_top() {
        let p = CocycleParams::almost_mathieu(100.0, 100.0);
        let j = critical_set(&p, 1e-13).unwrap();
        assert_eq!(j.set.n_arcs(), 1);
        assert_eq!(j.branch_signs, vec![0]);
        // cos 2πθ ≥ 1 − 2·100^{−1/4} on the arc; endpoints solve equality.
        let c = 1.0 - 2.0 * 100f64.powf(-0.25);
        let half = c.acos() / (2.0 * std::f64::consts::PI);
        let arc = j.set.arcs()[0];
        assert!((arc.len - 2.0 * half).abs() < 1e-10);
        assert!(qpc_core::circle_dist(arc.midpoint(), 0.0) < 1e-10);
    }

    #[test]
    fn two_arcs_at_the_centre() {
        let p = CocycleParams::almost_mathieu(100.0, 0.0);
        let j = critical_set(&p, 1e-13).unwrap();
        assert_eq!(j.set.n_arcs(), 2);
        let mids: Vec<f64> = j.set.arcs().iter().map(|a| a.midpoint()).collect();
        assert!((mids[0] - 0.25).abs() < 1e-9 && (mids[1] - 0.75).abs() < 1e-9);
        assert_eq!(j.branch_signs, vec![-1, 1]);
        for a in j.set.arcs() {
            for t in [a.lo, a.hi()] {
                assert!((p.v(t).abs() - j.window).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn outside_window_is_empty() {
        let base = CocycleParams::almost_mathieu(100.0, 0.0);
        let p = base.with_energy(100.0 + 3.0 * base.lp(0.75));
        assert!(matches!(critical_set(&p, 1e-12), Err(GeometryError::EmptyCritical(_))));
    }
}
