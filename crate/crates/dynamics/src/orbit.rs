//! Single steps and paired orbits of the fiber map.

use qpc_core::{wrap, CocycleParams, ProjPoint};

/// One factor `ρ_i` of the running product of slopes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoFactor {
    /// `log |ρ_i|`.
    pub log_abs: f64,
    /// Sign of `ρ_i` (`±1`).
    pub sign: f64,
    /// First orbit index covered by this factor.
    pub start: usize,
    /// Last orbit index covered (`start` or `start + 1`).
    pub end: usize,
}

/// An orbit `(θ_k, r_k)` with the factorization of `r_first⋯r_k` into `ρ`s.
#[derive(Clone, Debug)]
pub struct PairedOrbit {
    /// Base points `θ_k`.
    pub theta: Vec<f64>,
    /// Fiber points `r_k`.
    pub r: Vec<ProjPoint>,
    /// Factors in index order. When `r_0 = ∞` the factorization starts at index 1.
    pub rho: Vec<RhoFactor>,
    /// Merging threshold `λ^{−2}`.
    pub pairing_threshold: f64,
}

/// One application of `Φ_E`: `(θ, r) ↦ (θ + ω mod 1, λf(θ) − E − 1/r)`.
#[inline]
#[must_use]
pub fn phi_step(params: &CocycleParams, theta: f64, r: ProjPoint) -> (f64, ProjPoint) {
    (wrap(theta + params.omega), r.step(params.v(theta)))
}

/// The orbit of `(θ_0, r_0)` for `n` steps with its `ρ`-factorization.
///
/// A slope with `|r_j| < λ^{−2}` is merged with `r_{j+1}`; the merged factor
/// is evaluated as `r_j·v(θ_j) − 1`, which stays accurate even when `r_j = 0`.
#[must_use]
pub fn iterate(params: &CocycleParams, theta0: f64, r0: ProjPoint, n: usize) -> PairedOrbit {
    let mut theta = Vec::with_capacity(n + 1);
    let mut r = Vec::with_capacity(n + 1);
    let mut t = wrap(theta0);
    let mut p = r0;
    theta.push(t);
    r.push(p);
    for _ in 0..n {
        let (t2, p2) = phi_step(params, t, p);
        t = t2;
        p = p2;
        theta.push(t);
        r.push(p);
    }
    let threshold = params.lambda.powi(-2);
    let rho = factorize(params, &theta, &r, threshold);
    PairedOrbit {
        theta,
        r,
        rho,
        pairing_threshold: threshold,
    }
}

/// Slopes `r_0 = ∞, r_1, …, r_n` of the orbit of `(θ_0, ∞)`.
#[must_use]
pub fn reference_orbit(params: &CocycleParams, theta0: f64, n: usize) -> (Vec<f64>, Vec<ProjPoint>) {
    let mut theta = Vec::with_capacity(n + 1);
    let mut r = Vec::with_capacity(n + 1);
    let mut t = wrap(theta0);
    let mut p = ProjPoint::INFINITY;
    theta.push(t);
    r.push(p);
    for _ in 0..n {
        p = p.step(params.v(t));
        t = wrap(t + params.omega);
        theta.push(t);
        r.push(p);
    }
    (theta, r)
}

fn factorize(params: &CocycleParams, theta: &[f64], r: &[ProjPoint], threshold: f64) -> Vec<RhoFactor> {
    let n = r.len() - 1;
    let mut out = Vec::with_capacity(r.len());
    let mut j = usize::from(r[0].is_infinite());
    while j <= n {
        let rj = r[j];
        if rj.abs() < threshold && j < n {
            let rho = rj.to_f64() * params.v(theta[j]) - 1.0;
            out.push(RhoFactor {
                log_abs: rho.abs().ln(),
                sign: rho.signum(),
                start: j,
                end: j + 1,
            });
            j += 2;
        } else {
            out.push(RhoFactor {
                log_abs: log_abs(rj),
                sign: sign_of(rj),
                start: j,
                end: j,
            });
            j += 1;
        }
    }
    out
}

/// `log |u1/u0|`, computed from the homogeneous coordinates.
#[inline]
pub(crate) fn log_abs(p: ProjPoint) -> f64 {
    p.u1().abs().ln() - p.u0().abs().ln()
}

#[inline]
pub(crate) fn sign_of(p: ProjPoint) -> f64 {
    if p.u0() == 0.0 {
        1.0
    } else if (p.u1() >= 0.0) == (p.u0() >= 0.0) {
        1.0
    } else {
        -1.0
    }
}

impl PairedOrbit {
    /// Number of steps `n` (the orbit has `n + 1` points).
    #[must_use]
    pub fn len_steps(&self) -> usize {
        self.r.len() - 1
    }

    /// First index included in the factorization (1 when `r_0 = ∞`).
    #[must_use]
    pub fn first_index(&self) -> usize {
        self.rho.first().map_or(0, |f| f.start)
    }

    /// `log |r_first⋯r_k|` assembled from the `ρ` factors. If `k` is the
    /// first index of a merged pair, that slope enters on its own.
    #[must_use]
    pub fn log_abs_product(&self, k: usize) -> f64 {
        let mut s = 0.0;
        for f in &self.rho {
            if f.end <= k {
                s += f.log_abs;
            } else {
                if f.start == k {
                    s += log_abs(self.r[k]);
                }
                break;
            }
        }
        s
    }

    /// Sum of `log |ρ_i|` over all factors.
    #[must_use]
    pub fn total_log(&self) -> f64 {
        self.rho.iter().map(|f| f.log_abs).sum()
    }

    /// Index of the factor that covers orbit index `k`, if any.
    #[must_use]
    pub fn rho_index_of(&self, k: usize) -> Option<usize> {
        self.rho
            .binary_search_by(|f| {
                if f.end < k {
                    std::cmp::Ordering::Less
                } else if f.start > k {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .ok()
    }
}
