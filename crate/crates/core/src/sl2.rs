//! Renormalized `SL(2,ℝ)` matrices.
//!
//! A matrix is stored as `e^{log_scale}·U` where the entries of `U` have
//! largest magnitude `1` after renormalization, so products of thousands of
//! transfer matrices never overflow. The full matrix has determinant one;
//! the unscaled part therefore has determinant `e^{−2·log_scale}`.

use serde::{Deserialize, Serialize};

/// `e^{log_scale}·[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SL2Mat {
    /// Entry (0,0) of the unscaled part.
    pub a: f64,
    /// Entry (0,1) of the unscaled part.
    pub b: f64,
    /// Entry (1,0) of the unscaled part.
    pub c: f64,
    /// Entry (1,1) of the unscaled part.
    pub d: f64,
    /// Natural log of the scale factor.
    pub log_scale: f64,
}

impl SL2Mat {
    /// The identity.
    #[must_use]
    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    /// Matrix with the given entries and `log_scale = 0`.
    #[must_use]
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self {
            a,
            b,
            c,
            d,
            log_scale: 0.0,
        }
    }

    /// Determinant of the unscaled part, `ad − bc`.
    #[must_use]
    pub fn unscaled_det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Determinant of the represented matrix, `e^{2·log_scale}(ad − bc)`.
    /// Meaningful only while the unscaled determinant is resolvable.
    #[must_use]
    pub fn det(&self) -> f64 {
        (2.0 * self.log_scale).exp() * self.unscaled_det()
    }

    /// Largest singular value of the unscaled part.
    #[must_use]
    pub fn unscaled_norm(&self) -> f64 {
        let s = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let det = self.unscaled_det();
        let disc = (s * s - 4.0 * det * det).max(0.0);
        (0.5 * (s + disc.sqrt())).sqrt()
    }

    /// `log ‖M‖` for the operator 2-norm of the represented matrix.
    #[must_use]
    pub fn log_norm(&self) -> f64 {
        self.log_scale + self.unscaled_norm().ln()
    }

    /// Divide the entries by their largest magnitude and fold it into `log_scale`.
    #[must_use]
    pub fn renormalized(self) -> Self {
        let m = self
            .a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs());
        if m == 0.0 || m == 1.0 {
            return self;
        }
        Self {
            a: self.a / m,
            b: self.b / m,
            c: self.c / m,
            d: self.d / m,
            log_scale: self.log_scale + m.ln(),
        }
    }

    /// Matrix product `self · rhs`, renormalized.
    #[must_use]
    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
            log_scale: self.log_scale + rhs.log_scale,
        }
        .renormalized()
    }

    /// Inverse of the represented matrix, using `det = 1`: the adjugate.
    #[must_use]
    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
            log_scale: self.log_scale,
        }
    }

    /// Unscaled part applied to `(x, y)`.
    #[must_use]
    pub fn apply_unscaled(&self, x: f64, y: f64) -> (f64, f64) {
        (self.a * x + self.b * y, self.c * x + self.d * y)
    }

    /// Trace of the represented matrix.
    #[must_use]
    pub fn trace(&self) -> f64 {
        self.log_scale.exp() * (self.a + self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sl2(a: f64, b: f64, c: f64) -> SL2Mat {
        // d chosen so that ad − bc = 1.
        SL2Mat::new(a, b, c, (1.0 + b * c) / a)
    }

    #[test]
    fn identity_is_neutral() {
        let m = sl2(2.0, 3.0, 1.0);
        let p = m.mul(&SL2Mat::identity());
        assert!((p.det() - 1.0).abs() < 1e-12);
        assert!((p.trace() - m.trace()).abs() < 1e-12);
    }

    #[test]
    fn inverse_gives_identity() {
        let m = sl2(2.0, 3.0, 1.0).renormalized();
        let p = m.mul(&m.inverse());
        assert!((p.trace() - 2.0).abs() < 1e-12);
        assert!((p.log_norm()).abs() < 1e-12);
    }

    #[test]
    fn renormalized_norm_in_range() {
        let m = sl2(50.0, 3.0, -7.0).renormalized();
        let n = m.unscaled_norm();
        assert!((1.0..=10.0).contains(&n));
        assert!((m.det() - 1.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn norm_of_product_dominates_quotient(
            a1 in 0.5f64..5.0, b1 in -5.0f64..5.0, c1 in -5.0f64..5.0,
            a2 in 0.5f64..5.0, b2 in -5.0f64..5.0, c2 in -5.0f64..5.0,
        ) {
            let x = sl2(a1, b1, c1).renormalized();
            let y = sl2(a2, b2, c2).renormalized();
            let xy = x.mul(&y);
            prop_assert!(xy.log_norm() >= x.log_norm() - y.log_norm() - 1e-12);
            prop_assert!(xy.log_norm() <= x.log_norm() + y.log_norm() + 1e-12);
            prop_assert!((xy.det() - 1.0).abs() < 1e-9);
        }
    }
}
