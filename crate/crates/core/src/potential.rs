//! The potential `f : 𝕋 → ℝ` together with its first two derivatives.
//!
//! Derivatives are always analytic, never finite differences, because the
//! derivative recursions of the fiber map consume them bit-for-bit. Built-in
//! potentials are `cos 2πθ` and finite trigonometric polynomials; arbitrary
//! closures can be supplied as a `(f, f′, f″)` triple.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::circle::wrap;
use crate::error::CoreError;

/// Default floor on `|f″|` at critical points for the Morse check.
pub const DEFAULT_D2F_FLOOR: f64 = 1e-6;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// How the potential is evaluated.
#[derive(Clone)]
pub enum PotentialKind {
    /// `f(θ) = cos 2πθ`.
    Cosine,
    /// `f(θ) = Σ_k a_k cos 2πkθ + b_k sin 2πkθ` with `k` starting at 0.
    Trig {
        /// Cosine coefficients `a_0, a_1, …`.
        cos: Vec<f64>,
        /// Sine coefficients `b_0, b_1, …` (`b_0` is ignored).
        sin: Vec<f64>,
    },
    /// A user-supplied analytic triple.
    Custom {
        /// Short human-readable label used in reports.
        name: String,
        /// `f`.
        f: RealFn,
        /// `f′`.
        df: RealFn,
        /// `f″`.
        d2f: RealFn,
    },
}

/// A 1-periodic potential with analytic derivatives and its range.
#[derive(Clone)]
pub struct PotentialFn {
    kind: PotentialKind,
    f_min: f64,
    f_max: f64,
}

impl fmt::Debug for PotentialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialFn")
            .field("name", &self.name())
            .field("f_min", &self.f_min)
            .field("f_max", &self.f_max)
            .finish()
    }
}

impl PotentialFn {
    /// `f(θ) = cos 2πθ`, the almost Mathieu potential.
    #[must_use]
    pub fn cosine() -> Self {
        Self {
            kind: PotentialKind::Cosine,
            f_min: -1.0,
            f_max: 1.0,
        }
    }

    /// A trigonometric polynomial `Σ_k a_k cos 2πkθ + b_k sin 2πkθ`.
    #[must_use]
    pub fn trig(cos: Vec<f64>, sin: Vec<f64>) -> Self {
        Self::with_sampled_range(PotentialKind::Trig { cos, sin })
    }

    /// A user-supplied triple `(f, f′, f″)`; the range is found by sampling
    /// and refining the critical points.
    pub fn custom<F, G, H>(name: &str, f: F, df: G, d2f: H) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::with_sampled_range(PotentialKind::Custom {
            name: name.to_string(),
            f: Arc::new(f),
            df: Arc::new(df),
            d2f: Arc::new(d2f),
        })
    }

    /// Parse Fourier coefficients: one `k a_k b_k` triple per line, `#`
    /// starts a comment. The result is `Σ a_k cos 2πkθ + b_k sin 2πkθ`.
    pub fn parse_fourier(text: &str) -> Result<Self, CoreError> {
        let mut cos = Vec::new();
        let mut sin = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(CoreError::Parse(format!(
                    "line {}: expected `k a_k b_k`, got {:?}",
                    lineno + 1,
                    line
                )));
            }
            let k: usize = fields[0]
                .parse()
                .map_err(|e| CoreError::Parse(format!("line {}: k: {e}", lineno + 1)))?;
            let a: f64 = fields[1]
                .parse()
                .map_err(|e| CoreError::Parse(format!("line {}: a_k: {e}", lineno + 1)))?;
            let b: f64 = fields[2]
                .parse()
                .map_err(|e| CoreError::Parse(format!("line {}: b_k: {e}", lineno + 1)))?;
            if cos.len() <= k {
                cos.resize(k + 1, 0.0);
                sin.resize(k + 1, 0.0);
            }
            cos[k] += a;
            sin[k] += b;
        }
        if cos.is_empty() {
            return Err(CoreError::Parse("no coefficients".into()));
        }
        Ok(Self::trig(cos, sin))
    }

    fn with_sampled_range(kind: PotentialKind) -> Self {
        let mut p = Self {
            kind,
            f_min: 0.0,
            f_max: 0.0,
        };
        let (lo, hi) = p.sampled_range(4096);
        p.f_min = lo;
        p.f_max = hi;
        p
    }

    /// Short label used in reports.
    #[must_use]
    pub fn name(&self) -> String {
        match &self.kind {
            PotentialKind::Cosine => "cos".to_string(),
            PotentialKind::Trig { .. } => "trig".to_string(),
            PotentialKind::Custom { name, .. } => name.clone(),
        }
    }

    /// The evaluation rule.
    #[must_use]
    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// `f(θ)`.
    #[inline]
    #[must_use]
    pub fn f(&self, theta: f64) -> f64 {
        match &self.kind {
            PotentialKind::Cosine => (TAU * wrap(theta)).cos(),
            PotentialKind::Trig { cos, sin } => {
                let theta = wrap(theta);
                let mut s = 0.0;
                for (k, (&a, &b)) in cos.iter().zip(sin).enumerate() {
                    let x = TAU * k as f64 * theta;
                    s += a * x.cos() + b * x.sin();
                }
                s
            }
            PotentialKind::Custom { f, .. } => f(theta),
        }
    }

    /// `f′(θ)`.
    #[inline]
    #[must_use]
    pub fn df(&self, theta: f64) -> f64 {
        match &self.kind {
            PotentialKind::Cosine => -TAU * (TAU * wrap(theta)).sin(),
            PotentialKind::Trig { cos, sin } => {
                let theta = wrap(theta);
                let mut s = 0.0;
                for (k, (&a, &b)) in cos.iter().zip(sin).enumerate() {
                    let w = TAU * k as f64;
                    let x = w * theta;
                    s += w * (-a * x.sin() + b * x.cos());
                }
                s
            }
            PotentialKind::Custom { df, .. } => df(theta),
        }
    }

    /// `f″(θ)`.
    #[inline]
    #[must_use]
    pub fn d2f(&self, theta: f64) -> f64 {
        match &self.kind {
            PotentialKind::Cosine => -TAU * TAU * (TAU * wrap(theta)).cos(),
            PotentialKind::Trig { cos, sin } => {
                let theta = wrap(theta);
                let mut s = 0.0;
                for (k, (&a, &b)) in cos.iter().zip(sin).enumerate() {
                    let w = TAU * k as f64;
                    let x = w * theta;
                    s -= w * w * (a * x.cos() + b * x.sin());
                }
                s
            }
            PotentialKind::Custom { d2f, .. } => d2f(theta),
        }
    }

    /// Minimum of `f` over the circle.
    #[must_use]
    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    /// Maximum of `f` over the circle.
    #[must_use]
    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    /// Critical points of `f`: sign changes of `f′` on a `grid`-point
    /// half-offset lattice, refined by bisection.
    #[must_use]
    pub fn critical_points(&self, grid: usize) -> Vec<f64> {
        let grid = grid.max(8);
        let h = 1.0 / grid as f64;
        let node = |i: usize| (i as f64 + 0.5) * h;
        let mut out = Vec::new();
        for i in 0..grid {
            let (a, b) = (node(i), node(i) + h);
            let (da, db) = (self.df(a), self.df(b));
            if da == 0.0 {
                out.push(wrap(a));
                continue;
            }
            if da * db < 0.0 {
                out.push(wrap(bisect_sign(|t| self.df(t), a, b, da)));
            }
        }
        out
    }

    fn sampled_range(&self, grid: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..grid {
            let v = self.f(i as f64 / grid as f64);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        for c in self.critical_points(grid) {
            let v = self.f(c);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Bisection for a sign change of `g` on `[a, b]`, given `g(a)`.
pub(crate) fn bisect_sign<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, ga: f64) -> f64 {
    let sa = ga.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Outcome of the Morse check on a potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Number of sign changes of `f′` on the sampling grid.
    pub n_critical: usize,
    /// Refined critical points in `[0, 1)`.
    pub critical_points: Vec<f64>,
    /// Smallest `|f″|` over the critical points (`+∞` if there are none).
    pub min_abs_d2f: f64,
    /// Sampled minimum of `f` (grid plus critical points).
    pub sampled_min: f64,
    /// Sampled maximum of `f` (grid plus critical points).
    pub sampled_max: f64,
    /// Whether the potential has exactly two non-degenerate critical points
    /// and a consistent stored range.
    pub accepted: bool,
}

/// Check that `p` is a Morse function with exactly two critical points.
///
/// Counts sign changes of `f′` on `grid_size` points, refines each critical
/// point, checks `|f″|` against `floor`, and compares the stored range with
/// the sampled one (tolerance `1e−6`).
pub fn validate_potential(
    p: &PotentialFn,
    grid_size: usize,
    floor: f64,
) -> Result<ValidationReport, CoreError> {
    if grid_size < 1000 {
        return Err(CoreError::InvalidParameter(format!(
            "validation grid must have at least 1000 points, got {grid_size}"
        )));
    }
    let crit = p.critical_points(grid_size);
    let min_abs_d2f = crit
        .iter()
        .map(|&c| p.d2f(c).abs())
        .fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..grid_size {
        let v = p.f(i as f64 / grid_size as f64);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    for &c in &crit {
        let v = p.f(c);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let range_ok = (lo - p.f_min()).abs() < 1e-6 && (hi - p.f_max()).abs() < 1e-6;
    let report = ValidationReport {
        n_critical: crit.len(),
        critical_points: crit,
        min_abs_d2f,
        sampled_min: lo,
        sampled_max: hi,
        accepted: false,
    };
    if report.n_critical != 2 {
        return Err(CoreError::InvalidPotential(format!(
            "expected exactly 2 critical points, found {}",
            report.n_critical
        )));
    }
    if !(min_abs_d2f > floor) {
        return Err(CoreError::InvalidPotential(format!(
            "degenerate critical point: min |f''| = {min_abs_d2f:e} <= floor {floor:e}"
        )));
    }
    if !range_ok {
        return Err(CoreError::InvalidPotential(format!(
            "stored range [{}, {}] disagrees with sampled range [{lo}, {hi}]",
            p.f_min(),
            p.f_max()
        )));
    }
    Ok(ValidationReport {
        accepted: true,
        ..report
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cosine_accepted_with_two_critical_points() {
        let r = validate_potential(&PotentialFn::cosine(), 10_000, DEFAULT_D2F_FLOOR).unwrap();
        assert!(r.accepted);
        assert_eq!(r.n_critical, 2);
        let mut c = r.critical_points.clone();
        c.sort_by(f64::total_cmp);
        assert!(crate::circle_dist(c[0], 0.0) < 1e-12 || crate::circle_dist(c[1], 0.0) < 1e-12);
        assert!(c.iter().any(|&x| (x - 0.5).abs() < 1e-12));
        assert!((r.min_abs_d2f - 4.0 * PI * PI).abs() < 1e-9);
    }

    #[test]
    fn constant_rejected() {
        let p = PotentialFn::trig(vec![3.0], vec![0.0]);
        let e = validate_potential(&p, 10_000, DEFAULT_D2F_FLOOR).unwrap_err();
        assert!(matches!(e, CoreError::InvalidPotential(_)));
    }

    #[test]
    fn cos_4pi_rejected_with_four_critical_points() {
        let p = PotentialFn::trig(vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]);
        assert_eq!(p.critical_points(10_000).len(), 4);
        assert!(validate_potential(&p, 10_000, DEFAULT_D2F_FLOOR).is_err());
    }

    #[test]
    fn small_grid_is_a_precondition_failure() {
        assert!(matches!(
            validate_potential(&PotentialFn::cosine(), 999, DEFAULT_D2F_FLOOR),
            Err(CoreError::InvalidParameter(_))
        ));
    }

    #[test]
    fn trig_matches_cosine() {
        let p = PotentialFn::trig(vec![0.0, 1.0], vec![0.0, 0.0]);
        let c = PotentialFn::cosine();
        for i in 0..100 {
            let t = i as f64 / 97.0;
            assert!((p.f(t) - c.f(t)).abs() < 1e-14);
            assert!((p.df(t) - c.df(t)).abs() < 1e-12);
            assert!((p.d2f(t) - c.d2f(t)).abs() < 1e-10);
        }
        assert!((p.f_min() + 1.0).abs() < 1e-12 && (p.f_max() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_derivatives_match_central_differences() {
        let p = PotentialFn::trig(vec![0.1, 1.0, 0.2], vec![0.0, 0.3, 0.0]);
        let h = 1e-6;
        for i in 0..50 {
            let t = i as f64 / 50.0 + 0.003;
            let fd = (p.f(t + h) - p.f(t - h)) / (2.0 * h);
            let fd2 = (p.df(t + h) - p.df(t - h)) / (2.0 * h);
            assert!((fd - p.df(t)).abs() < 1e-6 * (1.0 + p.df(t).abs()));
            assert!((fd2 - p.d2f(t)).abs() < 1e-5 * (1.0 + p.d2f(t).abs()));
        }
    }

    #[test]
    fn periodic_exactly_for_cosine() {
        let p = PotentialFn::cosine();
        for i in 0..32 {
            let t = i as f64 / 32.0;
            assert_eq!(p.f(t + 1.0), p.f(t));
            assert_eq!(p.df(t - 1.0), p.df(t));
        }
    }

    #[test]
    fn parse_fourier_file() {
        let p = PotentialFn::parse_fourier("# cos plus a shift\n0 0.5 0\n1 1.0 0.0\n").unwrap();
        assert!((p.f(0.0) - 1.5).abs() < 1e-14);
        assert!(PotentialFn::parse_fourier("1 2").is_err());
        assert!(PotentialFn::parse_fourier("").is_err());
    }
}
