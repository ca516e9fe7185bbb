//! Lyapunov exponent estimators.

use qpc_core::{wrap, CocycleParams, ProjPoint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::product::cocycle_product;

/// How `γ(E)` is estimated along each sampled orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Estimator {
    /// `(1/n)·log ‖A^n_E(θ)‖`.
    MatrixNorm,
    /// `(1/n)·Σ log|ρ|` along the fiber orbit started at `r_0 = λ^{3/4}`
    /// after a burn-in, with slopes below `λ^{−2}` merged with their successor.
    PairedProduct,
}

/// An estimate of the Lyapunov exponent, in nats per step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    /// Mean over samples, clamped at zero.
    pub gamma: f64,
    /// Steps per sample.
    pub n_steps: usize,
    /// Number of equispaced base points.
    pub n_samples: usize,
    /// Estimator used.
    pub estimator: Estimator,
    /// Standard error of the mean across samples.
    pub stderr: f64,
    /// True when the raw mean was negative and has been clamped to zero.
    pub clamped: bool,
}

/// Estimate `γ(E)` by averaging over `n_samples` equispaced base points.
///
/// `burn_in` only affects [`Estimator::PairedProduct`]: each orbit starts
/// `burn_in` steps before its sample point so that the slope has aligned
/// with the unstable direction when accumulation begins. Samples are
/// evaluated in parallel and reduced in a fixed order.
#[must_use]
pub fn lyapunov(
    params: &CocycleParams,
    n_steps: usize,
    n_samples: usize,
    burn_in: usize,
    estimator: Estimator,
) -> LyapunovEstimate {
    let n_samples = n_samples.max(1);
    let per_sample: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|s| {
            let theta = s as f64 / n_samples as f64;
            match estimator {
                Estimator::MatrixNorm => matrix_norm_rate(params, theta, n_steps),
                Estimator::PairedProduct => paired_rate(params, theta, n_steps, burn_in),
            }
        })
        .collect();
    let mean = per_sample.iter().sum::<f64>() / n_samples as f64;
    let stderr = if n_samples > 1 {
        let var = per_sample.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n_samples - 1) as f64;
        (var / n_samples as f64).sqrt()
    } else {
        0.0
    };
    LyapunovEstimate {
        gamma: mean.max(0.0),
        n_steps,
        n_samples,
        estimator,
        stderr,
        clamped: mean < 0.0,
    }
}

fn matrix_norm_rate(params: &CocycleParams, theta: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    cocycle_product(params, theta, n as i64).log_norm() / n as f64
}

/// `(1/n)·log|r_0⋯r_{n−1}|` after `burn_in` discarded steps.
fn paired_rate(params: &CocycleParams, theta: f64, n: usize, burn_in: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let omega = params.omega;
    let mut t = wrap(theta - (burn_in as f64 * omega).rem_euclid(1.0));
    let mut r = ProjPoint::from_value(params.lp(0.75));
    for _ in 0..burn_in {
        r = r.step(params.v(t));
        t = wrap(t + omega);
    }
    let threshold = params.lambda.powi(-2);
    let mut sum = 0.0;
    let mut j = 0;
    while j < n {
        let v = params.v(t);
        if r.abs() < threshold {
            // ρ = r_j·r_{j+1} = r_j·v(θ_j) − 1 stays away from zero.
            let rho = r.to_f64() * v - 1.0;
            sum += rho.abs().ln();
            r = r.step(v);
            t = wrap(t + omega);
            r = r.step(params.v(t));
            t = wrap(t + omega);
            j += 2;
        } else {
            sum += r.u1().abs().ln() - r.u0().abs().ln();
            r = r.step(v);
            t = wrap(t + omega);
            j += 1;
        }
    }
    sum / j as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use qpc_core::{PotentialFn, GOLDEN_OMEGA};

    fn amo(lambda: f64, e: f64) -> CocycleParams {
        CocycleParams::new(lambda, e, GOLDEN_OMEGA, PotentialFn::cosine(), 0.38, 1.0).unwrap()
    }

    #[test]
    fn outside_window_exceeds_three_quarters_log_lambda() {
        let p = amo(100.0, 0.0);
        let e = p.energy_window().1 + 1.0;
        let est = lyapunov(&p.with_energy(e), 10_000, 16, 1000, Estimator::MatrixNorm);
        assert!(est.gamma >= 0.75 * 100f64.ln(), "{}", est.gamma);
        assert!(!est.clamped);
    }

    #[test]
    fn estimators_agree_at_moderate_length() {
        let p = amo(100.0, 0.3);
        let a = lyapunov(&p, 20_000, 8, 1000, Estimator::MatrixNorm);
        let b = lyapunov(&p, 20_000, 8, 1000, Estimator::PairedProduct);
        assert!((a.gamma - b.gamma).abs() < 1e-2 * a.gamma, "{} vs {}", a.gamma, b.gamma);
    }

    #[test]
    fn free_laplacian_has_zero_exponent_in_band() {
        // λ small: the exponent is small but the estimate never goes below zero.
        let p = amo(0.01, 0.5);
        let est = lyapunov(&p, 10_000, 4, 1000, Estimator::MatrixNorm);
        assert!(est.gamma >= 0.0 && est.gamma < 0.01, "{}", est.gamma);
    }

    #[test]
    fn deterministic_across_runs() {
        let p = amo(10.0, 1.0);
        let a = lyapunov(&p, 5000, 32, 1000, Estimator::PairedProduct);
        let b = lyapunov(&p, 5000, 32, 1000, Estimator::PairedProduct);
        assert_eq!(a, b);
    }
}
