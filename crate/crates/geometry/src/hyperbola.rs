//! Shape of a shifted hyperbola `ψ = s − h/g` near the zero of `g`.
//!
//! With `s` increasing and `g` decreasing through the band `[−1/λ, 1/λ]`
//! and `h` small and positive, `ψ` has a pole at the zero `p` of `g`.
//! Either `s(p)` is far from zero and `ψ` crosses the band twice with
//! slopes of opposite sign, or `s(p)` is close to zero and `ψ` makes two
//! bumps, a maximum below the band left of `p` and a minimum above it right
//! of `p`, separated by at least `d√δ/D^{3/2}`.

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Which shape `ψ` takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HyperbolaKind {
    /// `|s(p)| > 0.4/λ`: two monotone crossings of opposite slope.
    TwoBranches,
    /// `|s(p)| ≤ 0.4/λ`: a bump on each side of the pole.
    BumpPair,
    /// The samples do not bracket a zero of `g` with points on both sides.
    Degenerate,
}

/// Classification of `ψ` with the measured separation of the two sides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolaClass {
    /// The case.
    pub kind: HyperbolaKind,
    /// Interpolated zero `p` of `g`.
    pub p: f64,
    /// Interpolated `s(p)`.
    pub s_at_p: f64,
    /// `min_{θ > p} ψ − max_{θ < p} ψ` over samples where `|g| ≤ 1/λ`.
    pub gap: f64,
    /// `d√δ/D^{3/2}`.
    pub bound: f64,
}

/// First and second finite-difference derivatives on a non-uniform grid.
fn derivatives(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 1..n - 1 {
        let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        let (s0, s1) = ((y[i] - y[i - 1]) / h0, (y[i + 1] - y[i]) / h1);
        d1[i] = (s0 * h1 + s1 * h0) / (h0 + h1);
        d2[i] = 2.0 * (s1 - s0) / (h0 + h1);
    }
    d1[0] = (y[1] - y[0]) / (x[1] - x[0]);
    d1[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
    d2[0] = d2[1];
    d2[n - 1] = d2[n - 2];
    (d1, d2)
}

fn violated(name: &str) -> GeometryError {
    GeometryError::HypothesisViolated(name.to_string())
}

fn c2_norm(y: &[f64], d1: &[f64], d2: &[f64]) -> f64 {
    y.iter()
        .chain(d1)
        .chain(d2)
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Classify `ψ = s − h/g` from samples of `s`, `h`, `g` on the increasing
/// grid `thetas`.
///
/// The hypotheses are checked in this order, and the first that fails is
/// named in [`GeometryError::HypothesisViolated`]: `"grid"`,
/// `"D > d > lambda"`, `"h positivity"`, `"delta <= h"`, `"h < 1/D^4"`,
/// `"|h'| <= sqrt(h)"`, `"|h''| < 1"`, `"||s||_C2 < D"`, `"||g||_C2 < D"`,
/// `"s covers [-1/lambda, 1/lambda]"`, `"s' > d on the band"`,
/// `"g covers [-1/lambda, 1/lambda]"`, `"g' < -d on the band"`.
/// Derivatives are central finite differences on the grid.
#[allow(clippy::too_many_arguments)]
pub fn classify_shifted_hyperbola(
    thetas: &[f64],
    s: &[f64],
    h: &[f64],
    g: &[f64],
    d: f64,
    big_d: f64,
    delta: f64,
    lambda: f64,
) -> Result<HyperbolaClass, GeometryError> {
    let n = thetas.len();
    if n < 5 || s.len() != n || h.len() != n || g.len() != n || thetas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(violated("grid"));
    }
    if !(big_d > d && d > lambda && lambda > 0.0) {
        return Err(violated("D > d > lambda"));
    }
    if h.iter().any(|&v| v <= 0.0) {
        return Err(violated("h positivity"));
    }
    if !(delta > 0.0 && h.iter().all(|&v| v >= delta)) {
        return Err(violated("delta <= h"));
    }
    if h.iter().any(|&v| v >= big_d.powi(-4)) {
        return Err(violated("h < 1/D^4"));
    }
    let (h1, h2) = derivatives(thetas, h);
    if h1.iter().zip(h).any(|(d, v)| d.abs() > v.sqrt()) {
        return Err(violated("|h'| <= sqrt(h)"));
    }
    if h2.iter().any(|v| v.abs() >= 1.0) {
        return Err(violated("|h''| < 1"));
    }
    let (s1, s2) = derivatives(thetas, s);
    let (g1, g2) = derivatives(thetas, g);
    if c2_norm(s, &s1, &s2) >= big_d {
        return Err(violated("||s||_C2 < D"));
    }
    if c2_norm(g, &g1, &g2) >= big_d {
        return Err(violated("||g||_C2 < D"));
    }
    let band = 1.0 / lambda;
    let covers = |y: &[f64]| {
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lo <= -band && hi >= band
    };
    if !covers(s) {
        return Err(violated("s covers [-1/lambda, 1/lambda]"));
    }
    if s.iter().zip(&s1).any(|(v, dv)| v.abs() <= band && *dv <= d) {
        return Err(violated("s' > d on the band"));
    }
    if !covers(g) {
        return Err(violated("g covers [-1/lambda, 1/lambda]"));
    }
    if g.iter().zip(&g1).any(|(v, dv)| v.abs() <= band && *dv >= -d) {
        return Err(violated("g' < -d on the band"));
    }

    let bound = d * delta.sqrt() / big_d.powf(1.5);
    let degenerate = HyperbolaClass {
        kind: HyperbolaKind::Degenerate,
        p: f64::NAN,
        s_at_p: f64::NAN,
        gap: f64::NAN,
        bound,
    };
    // g is decreasing through the band, so its zero is the unique + to −
    // sign change.
    let Some(i) = (0..n - 1).find(|&i| g[i] > 0.0 && g[i + 1] <= 0.0) else {
        return Ok(degenerate);
    };
    let t = g[i] / (g[i] - g[i + 1]);
    let p = thetas[i] + t * (thetas[i + 1] - thetas[i]);
    let s_at_p = s[i] + t * (s[i + 1] - s[i]);

    let mut left_max = f64::NEG_INFINITY;
    let mut right_min = f64::INFINITY;
    for j in 0..n {
        if g[j] == 0.0 || g[j].abs() > band {
            continue;
        }
        let psi = s[j] - h[j] / g[j];
        if thetas[j] < p {
            left_max = left_max.max(psi);
        } else {
            right_min = right_min.min(psi);
        }
    }
    if !(left_max.is_finite() && right_min.is_finite()) {
        return Ok(HyperbolaClass { p, s_at_p, ..degenerate });
    }
    let kind = if s_at_p.abs() > 0.4 * band {
        HyperbolaKind::TwoBranches
    } else {
        HyperbolaKind::BumpPair
    };
    Ok(HyperbolaClass {
        kind,
        p,
        s_at_p,
        gap: right_min - left_max,
        bound,
    })
}
