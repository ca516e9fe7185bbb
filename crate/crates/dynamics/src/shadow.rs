//! Shadowing of arbitrary orbits by the reference orbit started at `∞`, and
//! the closed-form gap between two orbits over the same base points.

use qpc_core::{CocycleParams, ProjPoint};

use crate::error::DynamicsError;
use crate::orbit::{log_abs, reference_orbit, sign_of};

/// `s_{k+1} = r_{k+1} − h/(s_0 − w)` for every orbit `s` over `θ_0`, where
/// `r` is the orbit of `(θ_0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShadowDecomposition {
    /// Step count `k`.
    pub k: usize,
    /// `r_{k+1}` of the reference orbit.
    pub r_next: ProjPoint,
    /// `h = 1/(r_1²⋯r_k²) > 0`.
    pub h: f64,
    /// `log h`, exact even when `h` underflows.
    pub log_h: f64,
    /// `w = 1/r_1 + 1/(r_1²r_2) + … + 1/(r_1²⋯r_{k−1}²r_k)`.
    pub w: f64,
}

impl ShadowDecomposition {
    /// Predicted `s_{k+1}` for the orbit starting at `s_0`; `∞` when `s_0 = w`.
    #[must_use]
    pub fn predict(&self, s0: f64) -> ProjPoint {
        if s0.is_infinite() {
            return self.r_next;
        }
        let d = s0 - self.w;
        if d == 0.0 {
            return ProjPoint::INFINITY;
        }
        // r_{k+1} − h/d, formed in homogeneous coordinates so that a large
        // correction near the pole d → 0 does not overflow.
        let r = self.r_next;
        let corr = self.h / d;
        if r.is_infinite() {
            return ProjPoint::INFINITY;
        }
        if corr.is_finite() {
            ProjPoint::new(r.u0(), r.u1() - corr * r.u0())
        } else {
            ProjPoint::INFINITY
        }
    }
}

/// The decomposition of step `k + 1` for orbits over `θ_0`.
///
/// `h` is accumulated in the log domain. `w` is summed over the merged
/// factors: a pair `ρ = r_i·r_{i+1}` with `|r_i| < λ^{−2}` contributes
/// `v(θ_i)/(P²ρ)` instead of the two nearly cancelling single terms, where
/// `P` is the product of the preceding factors.
pub fn shadow_decompose(
    params: &CocycleParams,
    theta0: f64,
    k: usize,
) -> Result<ShadowDecomposition, DynamicsError> {
    let (theta, r) = reference_orbit(params, theta0, k + 1);
    let threshold = params.lambda.powi(-2);
    if k >= 1 && r[k].abs() < threshold {
        return Err(DynamicsError::HypothesisViolated(format!(
            "|r_{k}| = {:e} < lambda^-2; decomposition undefined at this step",
            r[k].abs()
        )));
    }
    let mut log_p2 = 0.0; // log of P² for the factors consumed so far
    let mut sign_w_terms = 0.0;
    let mut i = 1;
    while i <= k {
        let ri = r[i];
        if ri.abs() < threshold && i < k {
            let v = params.v(theta[i]);
            let rho = ri.to_f64() * v - 1.0;
            let mag = (log_p2 + rho.abs().ln()).exp();
            sign_w_terms += v * rho.signum() / mag;
            log_p2 += 2.0 * rho.abs().ln();
            i += 2;
        } else {
            let la = log_abs(ri);
            let term = sign_of(ri) / (log_p2 + la).exp();
            sign_w_terms += term;
            log_p2 += 2.0 * la;
            i += 1;
        }
    }
    let log_h = -log_p2;
    Ok(ShadowDecomposition {
        k,
        r_next: r[k + 1],
        h: log_h.exp(),
        log_h,
        w: sign_w_terms,
    })
}

/// `r_k − s_k = (r_0 − s_0)/((s_0⋯s_{k−1})(r_0⋯r_{k−1}))` for the orbits of
/// `(θ_0, r_0)` and `(θ_0, s_0)`, evaluated in the log domain.
pub fn contraction_gap(
    params: &CocycleParams,
    theta0: f64,
    r0: ProjPoint,
    s0: ProjPoint,
    k: usize,
) -> Result<f64, DynamicsError> {
    if r0 == s0 {
        return Ok(0.0);
    }
    let diff = r0.to_f64() - s0.to_f64();
    if !diff.is_finite() {
        return Err(DynamicsError::ProductDegenerate("r_0 or s_0 is infinite".into()));
    }
    if diff == 0.0 {
        return Ok(0.0);
    }
    let mut log_den = 0.0;
    let mut sign = diff.signum();
    let (mut r, mut s, mut t) = (r0, s0, theta0);
    for j in 0..k {
        for (name, p) in [("r", r), ("s", s)] {
            if p.is_infinite() || p.u1() == 0.0 {
                return Err(DynamicsError::ProductDegenerate(format!(
                    "{name}_{j} is {}",
                    if p.is_infinite() { "infinite" } else { "zero" }
                )));
            }
        }
        log_den += log_abs(r) + log_abs(s);
        sign *= sign_of(r) * sign_of(s);
        let v = params.v(t);
        r = r.step(v);
        s = s.step(v);
        t = qpc_core::wrap(t + params.omega);
    }
    Ok(sign * (diff.abs().ln() - log_den).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::iterate;
    use qpc_core::{PotentialFn, GOLDEN_OMEGA};

    fn amo(lambda: f64, e: f64) -> CocycleParams {
        CocycleParams::new(lambda, e, GOLDEN_OMEGA, PotentialFn::cosine(), 0.38, 1.0).unwrap()
    }

    fn direct(params: &CocycleParams, theta0: f64, s0: f64, steps: usize) -> ProjPoint {
        *iterate(params, theta0, ProjPoint::from_value(s0), steps).r.last().unwrap()
    }

    fn outside_critical_for(params: &CocycleParams, theta0: f64, k: usize) -> bool {
        let a = 2.0 * params.lp(0.75);
        (0..=k).all(|j| params.v(theta0 + j as f64 * params.omega).abs() > a)
    }

    #[test]
    fn k_zero_is_one_step() {
        let p = amo(100.0, 0.0);
        let d = shadow_decompose(&p, 0.3, 0).unwrap();
        assert_eq!(d.h, 1.0);
        assert_eq!(d.w, 0.0);
        let s0 = 4.0;
        let want = p.v(0.3) - 1.0 / s0;
        assert!((d.predict(s0).to_f64() - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn matches_direct_iteration_at_k15() {
        // At λ = 100 the critical set covers ~45% of the circle and no orbit
        // avoids it for 16 consecutive steps, so this runs at λ = 10⁶.
        let p = amo(1e6, 0.0);
        let theta0 = (0..10_000)
            .map(|i| i as f64 / 10_000.0)
            .find(|&t| outside_critical_for(&p, t, 15))
            .unwrap();
        let s0 = p.lp(0.75);
        let d = shadow_decompose(&p, theta0, 15).unwrap();
        let want = direct(&p, theta0, s0, 16).to_f64();
        let got = d.predict(s0).to_f64();
        assert!(((got - want) / want).abs() < 1e-8, "got {got} want {want}");
    }

    #[test]
    fn pole_at_w() {
        let p = amo(100.0, 0.0);
        let theta0 = 0.05;
        let d = shadow_decompose(&p, theta0, 15).unwrap();
        assert!(d.predict(d.w).is_infinite());
        // The pole has width of order h, so it is only resolvable in double
        // precision while h is far above the spacing of floats near w.
        let d = shadow_decompose(&p, theta0, 1).unwrap();
        let delta = 1e-9 * d.h;
        for s0 in [d.w + delta, d.w - delta] {
            assert!(direct(&p, theta0, s0, 2).abs() > 1e8);
        }
    }

    #[test]
    fn contraction_examples() {
        let p = amo(100.0, 0.0);
        let r0 = ProjPoint::from_value(3.0);
        assert_eq!(contraction_gap(&p, 0.2, r0, r0, 5).unwrap(), 0.0);
        let s0 = ProjPoint::from_value(7.0);
        let one = contraction_gap(&p, 0.2, r0, s0, 1).unwrap();
        assert!((one - (3.0 - 7.0) / 21.0).abs() < 1e-15);
        let direct_gap = iterate(&p, 0.2, r0, 4).r[4].to_f64() - iterate(&p, 0.2, s0, 4).r[4].to_f64();
        let formula = contraction_gap(&p, 0.2, r0, s0, 4).unwrap();
        assert!((formula - direct_gap).abs() <= 1e-6 * direct_gap.abs() + 1e-13);
    }

    #[test]
    fn contraction_bound_far_from_critical_set() {
        let p = amo(1e6, 0.0);
        let theta0 = (0..100_000)
            .map(|i| i as f64 / 100_000.0)
            .find(|&t| outside_critical_for(&p, t, 20))
            .expect("an orbit segment avoiding the critical set");
        let a = p.lp(0.75);
        let gap = contraction_gap(&p, theta0, ProjPoint::from_value(a), ProjPoint::from_value(2.0 * a), 20)
            .unwrap();
        let bound = 2.0 * p.lp(-((4.0 / 3.0) * 19.0 + 0.75));
        assert!(gap.abs() <= bound, "{gap:e} > {bound:e}");
    }

    #[test]
    fn infinite_start_is_degenerate() {
        let p = amo(100.0, 0.0);
        assert!(contraction_gap(&p, 0.2, ProjPoint::INFINITY, ProjPoint::from_value(1.0), 3).is_err());
    }
}
