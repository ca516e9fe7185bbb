//! Points of the projective line `ℝ̂ = ℝ ∪ {∞}` in homogeneous coordinates.
//!
//! A slope `r = u1/u0` is stored as the pair `(u0, u1)`, so `r = 0` and
//! `r = ∞` are ordinary points and the fiber map is the linear action
//! `(u0, u1) ↦ (u1, v·u1 − u0)`. Renormalization scales by a power of two,
//! which leaves the ratio bit-exact.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// The value of a projective point: a finite slope or `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Slope {
    /// A finite real slope.
    Finite(f64),
    /// The point at infinity (`u0 = 0`).
    Infinity,
}

/// A point of `ℝ̂` as homogeneous coordinates `(u0, u1)`, `r = u1/u0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjPoint {
    u0: f64,
    u1: f64,
}

impl ProjPoint {
    /// The point `∞`.
    pub const INFINITY: ProjPoint = ProjPoint { u0: 0.0, u1: 1.0 };
    /// The point `0`.
    pub const ZERO: ProjPoint = ProjPoint { u0: 1.0, u1: 0.0 };

    /// Point with homogeneous coordinates `(u0, u1)`, renormalized.
    ///
    /// # Panics
    /// If both coordinates are zero or either is not finite.
    #[must_use]
    pub fn new(u0: f64, u1: f64) -> Self {
        assert!(
            u0.is_finite() && u1.is_finite() && (u0 != 0.0 || u1 != 0.0),
            "homogeneous coordinates must be finite and not both zero: ({u0}, {u1})"
        );
        Self { u0, u1 }.renormalized()
    }

    /// Point representing the finite slope `r`; `±∞` maps to `∞`.
    #[must_use]
    pub fn from_value(r: f64) -> Self {
        if r.is_infinite() {
            Self::INFINITY
        } else if r.abs() <= 1.0 {
            Self { u0: 1.0, u1: r }
        } else {
            Self { u0: 1.0 / r, u1: 1.0 }
        }
    }

    /// First homogeneous coordinate.
    #[inline]
    #[must_use]
    pub fn u0(&self) -> f64 {
        self.u0
    }

    /// Second homogeneous coordinate.
    #[inline]
    #[must_use]
    pub fn u1(&self) -> f64 {
        self.u1
    }

    /// The slope `u1/u0`, or [`Slope::Infinity`] when `u0 = 0`.
    #[must_use]
    pub fn value(&self) -> Slope {
        if self.u0 == 0.0 {
            Slope::Infinity
        } else {
            Slope::Finite(self.u1 / self.u0)
        }
    }

    /// The slope as an `f64`, with `∞` mapped to `+∞`.
    #[inline]
    #[must_use]
    pub fn to_f64(&self) -> f64 {
        if self.u0 == 0.0 {
            f64::INFINITY
        } else {
            self.u1 / self.u0
        }
    }

    /// Whether this is the point at infinity.
    #[inline]
    #[must_use]
    pub fn is_infinite(&self) -> bool {
        self.u0 == 0.0
    }

    /// `|r|` with `∞` mapped to `+∞`.
    #[inline]
    #[must_use]
    pub fn abs(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Position on `ℝ̂ ≅ S¹` as a fraction in `[0, 1)`: the angle of the line
    /// through `(u0, u1)` divided by `π`.
    #[must_use]
    pub fn angle_fraction(&self) -> f64 {
        let a = self.u1.atan2(self.u0);
        let t = (a / PI).rem_euclid(1.0);
        if t >= 1.0 {
            0.0
        } else {
            t
        }
    }

    /// The image under `(u0, u1) ↦ (u1, v·u1 − u0)`, i.e. `r ↦ v − 1/r`.
    #[inline]
    #[must_use]
    pub fn step(&self, v: f64) -> Self {
        Self {
            u0: self.u1,
            u1: v * self.u1 - self.u0,
        }
        .renormalized()
    }

    /// Scale by a power of two so that `max(|u0|, |u1|) ∈ [1/2, 2]`.
    #[inline]
    #[must_use]
    pub fn renormalized(self) -> Self {
        let m = self.u0.abs().max(self.u1.abs());
        if (0.5..=2.0).contains(&m) {
            return self;
        }
        let e = m.log2().round() as i32;
        let s = pow2(-e);
        Self {
            u0: self.u0 * s,
            u1: self.u1 * s,
        }
    }
}

/// `2^e` for moderate `e`, exact.
fn pow2(e: i32) -> f64 {
    f64::from_bits(((1023 + e.clamp(-1022, 1023)) as u64) << 52)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn infinity_and_zero() {
        assert_eq!(ProjPoint::INFINITY.value(), Slope::Infinity);
        assert_eq!(ProjPoint::ZERO.value(), Slope::Finite(0.0));
        assert!(ProjPoint::ZERO.step(3.0).is_infinite());
        assert_eq!(ProjPoint::INFINITY.step(7.5).to_f64(), 7.5);
    }

    #[test]
    fn renormalization_bounds() {
        let p = ProjPoint::new(1e-200, 3e-201);
        let m = p.u0().abs().max(p.u1().abs());
        assert!((0.5..=2.0).contains(&m));
        assert!((p.to_f64() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn angle_fraction_of_landmarks() {
        assert_eq!(ProjPoint::ZERO.angle_fraction(), 0.0);
        assert!((ProjPoint::INFINITY.angle_fraction() - 0.5).abs() < 1e-15);
        let minus = ProjPoint::from_value(-1.0).angle_fraction();
        assert!((minus - 0.75).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn round_trip(r in -1e12f64..1e12) {
            let back = ProjPoint::from_value(r).to_f64();
            prop_assert!((back - r).abs() <= 1e-15 * r.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn step_is_mobius(r in -1e6f64..1e6, v in -200.0f64..200.0) {
            prop_assume!(r.abs() > 1e-6);
            let got = ProjPoint::from_value(r).step(v).to_f64();
            let want = v - 1.0 / r;
            prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }

        #[test]
        fn stays_normalized(r in -1e12f64..1e12, v in -500.0f64..500.0) {
            let mut p = ProjPoint::from_value(r);
            for _ in 0..50 {
                p = p.step(v);
                let m = p.u0().abs().max(p.u1().abs());
                prop_assert!((0.5..=2.0).contains(&m));
            }
        }
    }
}
