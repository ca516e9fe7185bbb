//! θ- and E-derivatives of the reference orbit started at `r_0 = ∞`.
//!
//! From `r_{m+1} = v(θ_m) − 1/r_m` one gets `r′_{m+1} = v′(θ_m) + r′_m/r_m²`
//! with `r′_1 = v′(θ_0)`, so `r′_k = Σ_j v′(θ_{j−1})/(r_j²⋯r_{k−1}²)`. When
//! `|r_m| < λ^{−2}` the two steps through `m` are taken together using
//! `ρ = r_m·r_{m+1} = r_m·v(θ_m) − 1`:
//! `r′_{m+2} = v′(θ_{m+1}) + (v′(θ_m)·r_m² + r′_m)/ρ²`,
//! which is finite even when `r_m = 0`. The E-derivative is the same
//! recursion with `v′` replaced by `−1`.

use qpc_core::CocycleParams;

use crate::error::DynamicsError;
use crate::orbit::reference_orbit;

/// `dr_k/dθ_0` for the orbit of `(θ_0, ∞)`.
pub fn orbit_dtheta(params: &CocycleParams, theta0: f64, k: usize) -> Result<f64, DynamicsError> {
    recursion(params, theta0, k, |t| params.dv(t))
}

/// `∂r_k/∂E` for the orbit of `(θ_0, ∞)`.
pub fn orbit_de(params: &CocycleParams, theta0: f64, k: usize) -> Result<f64, DynamicsError> {
    recursion(params, theta0, k, |_| -1.0)
}

fn recursion<F: Fn(f64) -> f64>(
    params: &CocycleParams,
    theta0: f64,
    k: usize,
    source: F,
) -> Result<f64, DynamicsError> {
    if k == 0 {
        return Err(DynamicsError::HypothesisViolated("r_0 = ∞ has no derivative (k = 0)".into()));
    }
    let (theta, r) = reference_orbit(params, theta0, k);
    let threshold = params.lambda.powi(-2);
    if k >= 2 && r[k - 1].abs() < threshold {
        return Err(DynamicsError::HypothesisViolated(format!(
            "|r_{}| = {:e} < lambda^-2",
            k - 1,
            r[k - 1].abs()
        )));
    }
    let mut m = 1;
    let mut d = source(theta[0]);
    while m < k {
        let rm = r[m].to_f64();
        if r[m].abs() < threshold && m + 2 <= k {
            let rho = rm * params.v(theta[m]) - 1.0;
            d = source(theta[m + 1]) + (source(theta[m]) * rm * rm + d) / (rho * rho);
            m += 2;
        } else {
            d = source(theta[m]) + d / (rm * rm);
            m += 1;
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qpc_core::{PotentialFn, GOLDEN_OMEGA};

    fn amo(lambda: f64, e: f64) -> CocycleParams {
        CocycleParams::new(lambda, e, GOLDEN_OMEGA, PotentialFn::cosine(), 0.38, 1.0).unwrap()
    }

    fn r_k(params: &CocycleParams, theta0: f64, k: usize) -> f64 {
        reference_orbit(params, theta0, k).1[k].to_f64()
    }

    #[test]
    fn first_step_derivatives() {
        let p = amo(100.0, 3.0);
        assert_eq!(orbit_dtheta(&p, 0.3, 1).unwrap(), p.dv(0.3));
        assert_eq!(orbit_de(&p, 0.3, 1).unwrap(), -1.0);
    }

    #[test]
    fn theta_derivative_matches_central_difference() {
        let p = amo(100.0, 0.0);
        let delta = 1e-7;
        let theta0 = 0.123;
        let got = orbit_dtheta(&p, theta0, 12).unwrap();
        let fd = (r_k(&p, theta0 + delta, 12) - r_k(&p, theta0 - delta, 12)) / (2.0 * delta);
        assert!(((got - fd) / fd).abs() < 1e-4, "{got} vs {fd}");
    }

    #[test]
    fn energy_derivative_matches_central_difference() {
        let delta = 1e-7;
        let theta0 = 0.61;
        let got = orbit_de(&amo(100.0, 5.0), theta0, 9).unwrap();
        let fd = (r_k(&amo(100.0, 5.0 + delta), theta0, 9) - r_k(&amo(100.0, 5.0 - delta), theta0, 9))
            / (2.0 * delta);
        assert!(((got - fd) / fd).abs() < 1e-4, "{got} vs {fd}");
    }

    #[test]
    fn energy_derivative_near_minus_one_away_from_critical_set() {
        let p = amo(1e6, 0.0);
        let big = p.lp(0.75);
        let mut checked = 0;
        for i in 0..2000 {
            let theta0 = i as f64 / 2000.0;
            let k = 10;
            let (_, r) = reference_orbit(&p, theta0, k);
            if (1..k).all(|j| r[j].abs() >= big) {
                let d = orbit_de(&p, theta0, k).unwrap();
                assert!(d < -1.0 && d > -1.01, "{d}");
                checked += 1;
            }
        }
        assert!(checked > 10);
    }

    #[test]
    fn zero_slope_is_bridged() {
        // Choose E so that r_1 = v(θ_0) is exactly zero.
        let theta0 = 0.2;
        let p0 = amo(100.0, 0.0);
        let p = p0.with_energy(p0.v(theta0));
        let d = orbit_dtheta(&p, theta0, 4).unwrap();
        assert!(d.is_finite());
        assert!(orbit_dtheta(&p, theta0, 2).is_err());
    }
}
