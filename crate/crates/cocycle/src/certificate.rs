//! Grid certificate of uniform hyperbolicity.
//!
//! For a starting slope `r_0` the vector `U_0 = (1, r_0)` evolves under the
//! homogeneous map into `U_k = (r_0⋯r_{k−1}, r_0⋯r_k)`, so the growth
//! condition `max{|r_0⋯r_{k−1}|, |r_0⋯r_k|} ≥ c·K^k` reads
//! `log ‖U_k‖_∞ ≥ log c + k·log K` and never needs the slopes themselves.
//! A cocycle meeting the condition for every base point of some interval is
//! uniformly hyperbolic; the certificate checks it on a finite grid up to a
//! finite horizon, so it is evidence rather than proof.

use qpc_core::{wrap, CircleSet, CocycleParams};
use serde::{Deserialize, Serialize};

/// Outcome of [`certify_uh`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UHVerdict {
    /// Every grid point had a starting slope meeting the growth condition.
    CertifiedUH,
    /// Some grid point had none.
    NotCertified,
}

/// The first grid point for which every candidate slope failed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFailure {
    /// Base point `θ_0`.
    pub theta: f64,
    /// Largest step reached by any candidate before the condition failed.
    pub best_k: usize,
}

/// A grid certificate together with the parameters it was computed with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UHCertificate {
    /// The arc `I` that was sampled.
    pub interval: CircleSet,
    /// Constant `c`.
    pub c: f64,
    /// Growth factor `K > 1`.
    pub k: f64,
    /// Horizon: the condition is checked for `0 ≤ k ≤ n_max`.
    pub n_max: usize,
    /// Number of equispaced base points.
    pub grid: usize,
    /// Result.
    pub verdict: UHVerdict,
    /// Where the search failed, when it did.
    pub failure: Option<CertificateFailure>,
}

/// Check the growth condition on `grid` equispaced points of `interval`.
///
/// Candidate slopes are tried in the order: the slope that succeeded at the
/// previous grid point, `λ^{3/4}`, `−λ^{3/4}`, `v(θ_0)`. The search stops at
/// the first grid point where all candidates fail.
///
/// # Panics
/// If `interval` is not a single arc, or `K ≤ 1`, or `c ≤ 0`.
#[must_use]
pub fn certify_uh(
    params: &CocycleParams,
    interval: &CircleSet,
    c: f64,
    k: f64,
    n_max: usize,
    grid: usize,
) -> UHCertificate {
    assert_eq!(interval.n_arcs(), 1, "the certificate interval must be a single arc");
    assert!(k > 1.0, "growth factor must exceed one");
    assert!(c > 0.0, "constant must be positive");
    let arc = interval.arcs()[0];
    let grid = grid.max(1);
    let (log_c, log_k) = (c.ln(), k.ln());
    let big = params.lp(0.75);
    let mut previous: Option<f64> = None;
    let mut failure = None;
    for i in 0..grid {
        let frac = if grid == 1 { 0.5 } else { i as f64 / (grid - 1) as f64 };
        let theta = arc.at(frac);
        let mut candidates = Vec::with_capacity(4);
        candidates.extend(previous);
        candidates.extend([big, -big, params.v(theta)]);
        let mut best_k = 0;
        let mut found = None;
        for &r0 in &candidates {
            match first_violation(params, theta, r0, log_c, log_k, n_max) {
                None => {
                    found = Some(r0);
                    break;
                }
                Some(kk) => best_k = best_k.max(kk),
            }
        }
        match found {
            Some(r0) => previous = Some(r0),
            None => {
                failure = Some(CertificateFailure { theta, best_k });
                break;
            }
        }
    }
    UHCertificate {
        interval: interval.clone(),
        c,
        k,
        n_max,
        grid,
        verdict: if failure.is_none() {
            UHVerdict::CertifiedUH
        } else {
            UHVerdict::NotCertified
        },
        failure,
    }
}

/// First `k ≤ n_max` at which `log ‖U_k‖_∞ < log c + k·log K`, if any.
fn first_violation(
    params: &CocycleParams,
    theta0: f64,
    r0: f64,
    log_c: f64,
    log_k: f64,
    n_max: usize,
) -> Option<usize> {
    if !r0.is_finite() {
        return Some(0);
    }
    let (mut u0, mut u1) = (1.0f64, r0);
    let mut log_scale = 0.0;
    let mut t = wrap(theta0);
    for step in 0..=n_max {
        let m = u0.abs().max(u1.abs());
        if m.ln() + log_scale < log_c + step as f64 * log_k {
            return Some(step);
        }
        if step == n_max {
            break;
        }
        let v = params.v(t);
        let next = v * u1 - u0;
        u0 = u1;
        u1 = next;
        let m = u0.abs().max(u1.abs());
        if !(1e-64..=1e64).contains(&m) {
            u0 /= m;
            u1 /= m;
            log_scale += m.ln();
        }
        t = wrap(t + params.omega);
    }
    None
}
