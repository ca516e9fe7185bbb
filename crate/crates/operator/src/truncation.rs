//! Tridiagonal truncations of `H_θ`.

use qpc_core::{wrap, CocycleParams};
use serde::{Deserialize, Serialize};

/// The `n×n` Dirichlet truncation of `H_θ`: diagonal `λf(θ + (j−1)ω)`,
/// constant off-diagonal `−1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalTruncation {
    /// Matrix size.
    pub n: usize,
    /// Diagonal entries, site `j = 1..n` at index `j − 1`.
    pub diag: Vec<f64>,
    /// Off-diagonal entry (always `−1`).
    pub offdiag: f64,
    /// Phase of site 1.
    pub theta: f64,
}

/// Build the truncation whose site 1 has phase `θ`.
///
/// # Panics
/// If `n < 2`.
#[must_use]
pub fn build_truncation(params: &CocycleParams, theta: f64, n: usize) -> TridiagonalTruncation {
    assert!(n >= 2, "truncation size must be at least 2");
    let diag = (0..n)
        .map(|j| params.lambda * params.potential.f(wrap(theta + j as f64 * params.omega)))
        .collect();
    TridiagonalTruncation {
        n,
        diag,
        offdiag: -1.0,
        theta,
    }
}

impl TridiagonalTruncation {
    /// `‖diag‖_∞ + 2`, a bound on the spectral radius.
    #[must_use]
    pub fn spectral_bound(&self) -> f64 {
        self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs())) + 2.0 * self.offdiag.abs()
    }

    /// `(Hu)_j` for `j = 1..n` with Dirichlet boundary.
    #[must_use]
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|j| {
                let mut s = self.diag[j] * u[j];
                if j > 0 {
                    s += self.offdiag * u[j - 1];
                }
                if j + 1 < n {
                    s += self.offdiag * u[j + 1];
                }
                s
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qpc_core::PotentialFn;

    #[test]
    fn two_site_example() {
        let p = CocycleParams::new(10.0, 0.0, 0.25, PotentialFn::cosine(), 0.38, 1.0).unwrap();
        let t = build_truncation(&p, 0.0, 2);
        assert_eq!(t.diag[0], 10.0);
        assert!(t.diag[1].abs() < 1e-14);
        assert_eq!(t.offdiag, -1.0);
    }

    #[test]
    fn periodic_in_phase() {
        let p = CocycleParams::almost_mathieu(7.0, 0.0);
        let a = build_truncation(&p, 0.3, 20);
        let b = build_truncation(&p, 1.3, 20);
        for (x, y) in a.diag.iter().zip(&b.diag) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn entries_match_operator_definition() {
        let p = CocycleParams::almost_mathieu(100.0, 0.0);
        let t = build_truncation(&p, 0.123, 50);
        for (j, d) in t.diag.iter().enumerate() {
            let want = 100.0 * (2.0 * std::f64::consts::PI * (0.123 + j as f64 * p.omega)).cos();
            assert!((d - want).abs() <= 1e-11 * want.abs().max(1.0));
        }
    }
}
