//! Diophantine constants of the frequency and entry times of rotation orbits.

use qpc_core::{wrap, CircleSet};
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// `⌊(κ/ε)^{1/τ}⌋`: a rotation by an `(κ, τ)`-Diophantine `ω` keeps an arc
/// of length at most `ε` disjoint from its first `N` translates either way.
#[must_use]
pub fn diophantine_n(eps: f64, kappa: f64, tau: f64) -> u64 {
    assert!(eps > 0.0 && kappa > 0.0 && tau >= 1.0, "need eps, kappa > 0 and tau >= 1");
    (kappa / eps).powf(1.0 / tau).floor() as u64
}

/// Fitted Diophantine constants of `ω` up to a denominator bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DcEstimate {
    /// `min_{1 ≤ q ≤ q_max} ‖qω‖·q^τ`.
    pub kappa: f64,
    /// Exponent fitted from `log‖qω‖` against `log q` at convergent
    /// denominators, clamped below at 1.
    pub tau: f64,
    /// `‖qω‖·q^τ` at the largest convergent denominator `≤ q_max`: the
    /// asymptotic constant, which ignores small-`q` exceptions.
    pub kappa_asymptotic: f64,
    /// Convergent denominators used in the fit.
    pub convergents: Vec<u64>,
}

/// `‖x‖`: distance to the nearest integer.
fn dist_to_int(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    f.min(1.0 - f)
}

/// Estimate `(κ, τ)` with `‖qω‖ ≥ κ/q^τ` for all `1 ≤ q ≤ q_max`.
pub fn estimate_dc_constants(omega: f64, q_max: u64) -> Result<DcEstimate, GeometryError> {
    if q_max < 100 {
        return Err(GeometryError::InvalidParameter(format!("q_max = {q_max} < 100")));
    }
    // Continued-fraction denominators q_{k+1} = a_k·q_k + q_{k−1}.
    let mut x = omega.rem_euclid(1.0);
    if x == 0.0 {
        return Err(GeometryError::RationalOmega(omega));
    }
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut convergents = vec![1u64];
    loop {
        let inv = 1.0 / x;
        let a = inv.floor();
        let rem = inv - a;
        let next = (a as u64).saturating_mul(q).saturating_add(q_prev);
        if next > q_max {
            break;
        }
        if next != q {
            convergents.push(next);
        }
        q_prev = q;
        q = next;
        if rem == 0.0 {
            return Err(GeometryError::RationalOmega(omega));
        }
        x = rem;
    }
    let pts: Vec<(f64, f64)> = convergents
        .iter()
        .filter(|&&q| q >= 2)
        .map(|&q| ((q as f64).ln(), dist_to_int(q as f64 * omega).ln()))
        .collect();
    let tau = if pts.len() >= 2 {
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (-sxy / sxx).max(1.0)
    } else {
        1.0
    };
    let kappa = (1..=q_max)
        .map(|q| dist_to_int(q as f64 * omega) * (q as f64).powf(tau))
        .fold(f64::INFINITY, f64::min);
    if kappa == 0.0 {
        return Err(GeometryError::RationalOmega(omega));
    }
    let last = *convergents.last().expect("q = 1 is always present");
    Ok(DcEstimate {
        kappa,
        tau,
        kappa_asymptotic: dist_to_int(last as f64 * omega) * (last as f64).powf(tau),
        convergents,
    })
}

/// `min{k ≥ 0 : θ_0 + kω ∈ set}`, searched up to `max_steps`.
#[must_use]
pub fn entry_time(theta0: f64, set: &CircleSet, omega: f64, max_steps: usize) -> Option<usize> {
    (0..=max_steps).find(|&k| set.contains(wrap(theta0 + (k as f64 * omega).rem_euclid(1.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qpc_core::GOLDEN_OMEGA;

    #[test]
    fn formula_examples() {
        assert_eq!(diophantine_n(0.01, 0.3, 1.0), 30);
        assert_eq!(diophantine_n(0.01, 0.3, 2.0), 5);
    }

    #[test]
    fn short_arc_translates_are_disjoint() {
        let n = diophantine_n(0.01, 0.38, 1.0) as i64;
        let j = CircleSet::arc(0.123 - 0.005, 0.01);
        for m in (-n..=n).filter(|&m| m != 0) {
            assert!(!j.overlaps(&j.translate(m as f64 * GOLDEN_OMEGA)), "m = {m}");
        }
    }

    #[test]
    fn golden_mean_constants() {
        let est = estimate_dc_constants(GOLDEN_OMEGA, 1_000_000).unwrap();
        assert!((est.tau - 1.0).abs() < 1e-2, "{est:?}");
        let inv_sqrt5 = 1.0 / 5f64.sqrt();
        assert!((est.kappa_asymptotic - inv_sqrt5).abs() < 0.05 * inv_sqrt5);
        // The minimum is attained at q = 1: ‖ω‖ = 1 − ω.
        assert!((est.kappa - (1.0 - GOLDEN_OMEGA)).abs() < 1e-12);
        for q in 1..=10_000u64 {
            assert!(dist_to_int(q as f64 * GOLDEN_OMEGA) * (q as f64).powf(est.tau) >= est.kappa);
        }
    }

    #[test]
    fn rational_frequency_is_rejected() {
        assert_eq!(estimate_dc_constants(0.5, 1000), Err(GeometryError::RationalOmega(0.5)));
    }

    #[test]
    fn entry_times() {
        let set = CircleSet::arc(0.5, 0.01);
        assert_eq!(entry_time(0.505, &set, GOLDEN_OMEGA, 10), Some(0));
        let k = entry_time(0.0, &set, GOLDEN_OMEGA, 1000).unwrap();
        assert!(set.contains(wrap(k as f64 * GOLDEN_OMEGA)));
    }
}
