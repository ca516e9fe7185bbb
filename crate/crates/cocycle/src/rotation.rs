//! Fibered rotation number and gap labels.

use qpc_core::{circle_dist, wrap, CocycleParams, ProjPoint};

/// `α(E) ∈ [0, 1/2]`: half the rate of sign changes of the solution of
/// `u_{k+1} = (λf(θ_{k−1}) − E)·u_k − u_{k−1}` started from `(u_0, u_1) = (1, 0)`.
///
/// Each step maps the homogeneous pair `(u_k, u_{k+1})` forward; sign changes
/// are counted on its first coordinate, skipping exact zeros. `2α` equals the
/// integrated density of states up to `O(1/n)`.
#[must_use]
pub fn rotation_number(params: &CocycleParams, theta0: f64, n_steps: usize) -> f64 {
    if n_steps == 0 {
        return 0.0;
    }
    let mut p = ProjPoint::ZERO;
    let mut t = wrap(theta0);
    let mut last_sign = 0.0f64;
    let mut changes = 0usize;
    for _ in 0..n_steps {
        p = p.step(params.v(t));
        t = wrap(t + params.omega);
        let x = p.u0();
        if x != 0.0 {
            let s = x.signum();
            if last_sign != 0.0 && s != last_sign {
                changes += 1;
            }
            last_sign = s;
        }
    }
    changes as f64 / (2.0 * n_steps as f64)
}

/// The smallest `|k| ≤ k_max` with `‖2α − kω‖ < tol` on the circle; for equal
/// `|k|` the positive label is preferred.
#[must_use]
pub fn gap_label(alpha: f64, omega: f64, k_max: u32, tol: f64) -> Option<i64> {
    let target = wrap(2.0 * alpha);
    let hit = |k: i64| circle_dist(target, (k as f64 * omega).rem_euclid(1.0)) < tol;
    if hit(0) {
        return Some(0);
    }
    for m in 1..=i64::from(k_max) {
        if hit(m) {
            return Some(m);
        }
        if hit(-m) {
            return Some(-m);
        }
    }
    None
}
