//! Sturm-sequence eigenvalues and gap-edge eigenvectors.

use qpc_core::{wrap, CocycleParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::OperatorError;
use crate::truncation::{build_truncation, TridiagonalTruncation};

/// `#{eigenvalues ≤ e}`: the number of non-positive pivots of `T − e`.
#[must_use]
pub fn sturm_count(t: &TridiagonalTruncation, e: f64) -> usize {
    if e == f64::INFINITY {
        return t.n;
    }
    if e == f64::NEG_INFINITY {
        return 0;
    }
    let b2 = t.offdiag * t.offdiag;
    let mut count = 0;
    let mut q = 1.0f64;
    for (j, &d) in t.diag.iter().enumerate() {
        q = if j == 0 { d - e } else { d - e - b2 / q };
        if q <= 0.0 {
            count += 1;
            if q == 0.0 {
                q = -f64::MIN_POSITIVE.sqrt();
            }
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (`k` from 0), bisected to width `tol`.
/// A non-positive `tol` bisects to full floating-point resolution.
///
/// # Panics
/// If `k ≥ n`.
#[must_use]
pub fn kth_eigenvalue(t: &TridiagonalTruncation, k: usize, tol: f64) -> f64 {
    assert!(k < t.n, "eigenvalue index out of range");
    let bound = t.spectral_bound();
    let (mut lo, mut hi) = (-bound, bound);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol {
            return mid;
        }
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// All eigenvalues in ascending order, each to `1e−10·(‖diag‖_∞ + 2)`.
#[must_use]
pub fn eigenvalues(t: &TridiagonalTruncation) -> Vec<f64> {
    let tol = 1e-10 * t.spectral_bound();
    (0..t.n).into_par_iter().map(|k| kth_eigenvalue(t, k, tol)).collect()
}

/// An eigenpair of a truncation centred on a given phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEigenfunction {
    /// The eigenvalue nearest the requested energy.
    pub eigenvalue: f64,
    /// Least-squares rate of `log|u_j|` decay away from the peak over the
    /// middle half of the window.
    pub decay_rate: f64,
    /// Unit-norm eigenvector; entries below the float range are zero.
    pub vector: Vec<f64>,
    /// `log|u_j|` for the unit-norm eigenvector, accurate in the tails.
    pub log_abs: Vec<f64>,
    /// Site index of `vector[0]`; site 1 carries the centre phase.
    pub first_site: i64,
    /// `‖Hu − Eu‖/‖u‖` over interior rows.
    pub residual: f64,
    /// `u_1/u_0`.
    pub ratio_u1_u0: f64,
}

/// The eigenpair nearest `e_edge` of the `n`-site truncation whose site 1
/// has phase `θ*` and which extends `n/2` sites to the left of it.
///
/// The eigenvalue is bisected to full precision; the eigenvector comes from
/// the twisted factorization `T − μ = N_k Δ_k N_kᵀ` at the twist index with
/// the smallest pivot, which produces every entry as a product of ratios and
/// so keeps `log|u_j|` accurate far below machine epsilon.
pub fn gap_edge_eigenfunction(
    params: &CocycleParams,
    e_edge: f64,
    theta_star: f64,
    n: usize,
) -> Result<EdgeEigenfunction, OperatorError> {
    if n < 8 {
        return Err(OperatorError::InvalidParameter(format!("window size {n} < 8")));
    }
    let half = n / 2;
    let start = wrap(theta_star - (half as f64 * params.omega).rem_euclid(1.0));
    let t = build_truncation(params, start, n);
    let c = sturm_count(&t, e_edge);
    let mut candidates = Vec::with_capacity(2);
    if c > 0 {
        candidates.push(kth_eigenvalue(&t, c - 1, 0.0));
    }
    if c < n {
        candidates.push(kth_eigenvalue(&t, c, 0.0));
    }
    let mu = candidates
        .into_iter()
        .min_by(|a, b| (a - e_edge).abs().total_cmp(&(b - e_edge).abs()))
        .expect("n ≥ 8 gives at least one eigenvalue");
    let tolerance = 10.0 / n as f64;
    if (mu - e_edge).abs() > tolerance {
        return Err(OperatorError::NoNearbyEigenvalue {
            target: e_edge,
            nearest: mu,
            tolerance,
        });
    }
    let (log_abs, signs) = twisted_eigenvector(&t, mu);
    let vector: Vec<f64> = log_abs.iter().zip(&signs).map(|(l, s)| s * l.exp()).collect();
    let hu = t.apply(&vector);
    let res2: f64 = (1..n - 1).map(|i| (hu[i] - mu * vector[i]).powi(2)).sum();
    let norm2: f64 = vector.iter().map(|x| x * x).sum();
    let peak = log_abs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(half);
    let decay_rate = fit_decay(&log_abs, peak, n / 4, n - n / 4);
    let (i0, i1) = (half - 1, half);
    Ok(EdgeEigenfunction {
        eigenvalue: mu,
        decay_rate,
        ratio_u1_u0: signs[i1] * signs[i0] * (log_abs[i1] - log_abs[i0]).exp(),
        vector,
        log_abs,
        first_site: 1 - half as i64,
        residual: (res2 / norm2).sqrt(),
    })
}

/// `(log|u_i|, sign u_i)` of the eigenvector for eigenvalue `mu`, normalized
/// to unit Euclidean norm.
fn twisted_eigenvector(t: &TridiagonalTruncation, mu: f64) -> (Vec<f64>, Vec<f64>) {
    let n = t.n;
    let b = t.offdiag;
    let b2 = b * b;
    let tiny = f64::EPSILON * t.spectral_bound() * 1e-10;
    let guard = |x: f64| if x == 0.0 { tiny } else { x };
    let a: Vec<f64> = t.diag.iter().map(|d| d - mu).collect();
    let mut dp = vec![0.0; n];
    dp[0] = guard(a[0]);
    for i in 1..n {
        dp[i] = guard(a[i] - b2 / dp[i - 1]);
    }
    let mut dm = vec![0.0; n];
    dm[n - 1] = guard(a[n - 1]);
    for i in (0..n - 1).rev() {
        dm[i] = guard(a[i] - b2 / dm[i + 1]);
    }
    // γ_k = D⁺_k + D⁻_k − a_k; the twist index minimizes |γ_k|.
    let k = (0..n)
        .min_by(|&i, &j| (dp[i] + dm[i] - a[i]).abs().total_cmp(&(dp[j] + dm[j] - a[j]).abs()))
        .unwrap_or(0);
    let mut log_abs = vec![0.0; n];
    let mut sign = vec![1.0; n];
    // u_i = −b·u_{i+1}/D⁺_i for i < k, u_i = −b·u_{i−1}/D⁻_i for i > k.
    for i in (0..k).rev() {
        let ratio = -b / dp[i];
        log_abs[i] = log_abs[i + 1] + ratio.abs().ln();
        sign[i] = sign[i + 1] * ratio.signum();
    }
    for i in k + 1..n {
        let ratio = -b / dm[i];
        log_abs[i] = log_abs[i - 1] + ratio.abs().ln();
        sign[i] = sign[i - 1] * ratio.signum();
    }
    let max = log_abs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_norm = max + 0.5 * log_abs.iter().map(|l| (2.0 * (l - max)).exp()).sum::<f64>().ln();
    for l in &mut log_abs {
        *l -= log_norm;
    }
    (log_abs, sign)
}

/// Least-squares decay rate of `log|u_i|` against `|i − peak|` on `[lo, hi)`.
fn fit_decay(log_abs: &[f64], peak: usize, lo: usize, hi: usize) -> f64 {
    let pts: Vec<(f64, f64)> = (lo..hi)
        .map(|i| ((i as f64 - peak as f64).abs(), log_abs[i]))
        .collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx).powi(2)));
    if sxx == 0.0 {
        return 0.0;
    }
    -sxy / sxx
}
