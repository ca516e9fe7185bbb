//! Arithmetic on the circle `𝕋 = ℝ/ℤ` and finite unions of arcs.
//!
//! An [`Arc`] is stored as `(lo, len)` and denotes `[lo, lo + len) mod 1`,
//! so arcs that wrap through `0` need no special casing and the full circle
//! is simply `len = 1`. A [`CircleSet`] keeps its arcs sorted, pairwise
//! disjoint and non-adjacent; every operation returns a normalized set.

use serde::{Deserialize, Serialize};

/// Reduce `x` into `[0, 1)`.
#[must_use]
pub fn wrap(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Distance on the circle: `min_{p∈ℤ} |a − b + p|`, always in `[0, 1/2]`.
#[must_use]
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(1.0 - d)
}

/// Signed representative of `a − b` in `[−1/2, 1/2)`.
#[must_use]
pub fn signed_diff(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    if d >= 0.5 {
        d - 1.0
    } else {
        d
    }
}

/// The arc `[lo, lo + len) mod 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    /// Left endpoint in `[0, 1)`.
    pub lo: f64,
    /// Length in `(0, 1]`.
    pub len: f64,
}

impl Arc {
    /// Arc starting at `lo` (wrapped into `[0,1)`) with length clamped to `[0, 1]`.
    #[must_use]
    pub fn new(lo: f64, len: f64) -> Self {
        Self {
            lo: wrap(lo),
            len: len.clamp(0.0, 1.0),
        }
    }

    /// Arc from `lo` counter-clockwise to `hi` (both taken mod 1).
    #[must_use]
    pub fn from_endpoints(lo: f64, hi: f64) -> Self {
        let lo = wrap(lo);
        let mut len = wrap(hi) - lo;
        if len < 0.0 {
            len += 1.0;
        }
        Self { lo, len }
    }

    /// Right endpoint `lo + len`, not reduced mod 1.
    #[must_use]
    pub fn hi(&self) -> f64 {
        self.lo + self.len
    }

    /// Midpoint, reduced into `[0, 1)`.
    #[must_use]
    pub fn midpoint(&self) -> f64 {
        wrap(self.lo + 0.5 * self.len)
    }

    /// Whether `theta` lies in the closed arc `[lo, lo + len]`.
    #[must_use]
    pub fn contains(&self, theta: f64) -> bool {
        if self.len >= 1.0 {
            return true;
        }
        wrap(theta - self.lo) <= self.len
    }

    /// Point at relative position `t ∈ [0,1]` along the arc, reduced mod 1.
    #[must_use]
    pub fn at(&self, t: f64) -> f64 {
        wrap(self.lo + t * self.len)
    }
}

/// A finite union of arcs on the circle, kept normalized.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CircleSet {
    arcs: Vec<Arc>,
}

/// Linear segments `[lo, hi]` inside `[0, 1]`, sorted and merged.
type Segments = Vec<(f64, f64)>;

impl CircleSet {
    /// The empty set.
    #[must_use]
    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    /// The whole circle.
    #[must_use]
    pub fn full() -> Self {
        Self {
            arcs: vec![Arc { lo: 0.0, len: 1.0 }],
        }
    }

    /// The union of the given arcs.
    #[must_use]
    pub fn from_arcs<I: IntoIterator<Item = Arc>>(arcs: I) -> Self {
        let mut segs = Vec::new();
        for arc in arcs {
            push_arc_segments(&mut segs, arc);
        }
        Self::from_segments(segs)
    }

    /// A single arc.
    #[must_use]
    pub fn arc(lo: f64, len: f64) -> Self {
        Self::from_arcs([Arc::new(lo, len)])
    }

    /// The normalized arcs, sorted by left endpoint.
    #[must_use]
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Number of arcs.
    #[must_use]
    pub fn n_arcs(&self) -> usize {
        self.arcs.len()
    }

    /// Whether the set has no arcs.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Lebesgue measure, in `[0, 1]`.
    #[must_use]
    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|a| a.len).sum::<f64>().min(1.0)
    }

    /// Whether `theta` belongs to the closure of the set.
    #[must_use]
    pub fn contains(&self, theta: f64) -> bool {
        self.arcs.iter().any(|a| a.contains(theta))
    }

    /// The set rotated by `t`.
    #[must_use]
    pub fn translate(&self, t: f64) -> Self {
        if self.is_full() {
            return self.clone();
        }
        Self::from_arcs(self.arcs.iter().map(|a| Arc {
            lo: wrap(a.lo + t),
            len: a.len,
        }))
    }

    /// Set union.
    #[must_use]
    pub fn union(&self, other: &Self) -> Self {
        let mut segs = self.segments();
        segs.extend(other.segments());
        Self::from_segments(segs)
    }

    /// Set intersection.
    #[must_use]
    pub fn intersect(&self, other: &Self) -> Self {
        let a = self.segments();
        let b = other.segments();
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if hi > lo {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_segments(out)
    }

    /// Complement in the circle.
    #[must_use]
    pub fn complement(&self) -> Self {
        let segs = self.segments();
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for (lo, hi) in segs {
            if lo > cursor {
                out.push((cursor, lo));
            }
            cursor = cursor.max(hi);
        }
        if cursor < 1.0 {
            out.push((cursor, 1.0));
        }
        Self::from_segments(out)
    }

    /// Set difference `self \ other`.
    #[must_use]
    pub fn difference(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    /// Whether the two sets share a subset of positive length.
    #[must_use]
    pub fn overlaps(&self, other: &Self) -> bool {
        !self.intersect(other).is_empty()
    }

    /// Whether `self ⊆ other` up to an absolute slack `tol` in measure.
    #[must_use]
    pub fn is_subset_of(&self, other: &Self, tol: f64) -> bool {
        self.difference(other).measure() <= tol
    }

    /// Union of the translates `self + mω` for `m` in `m_range`.
    #[must_use]
    pub fn union_of_translates(&self, omega: f64, m_range: std::ops::RangeInclusive<i64>) -> Self {
        let mut segs = Vec::new();
        for m in m_range {
            let t = wrap(m as f64 * omega);
            for a in &self.arcs {
                push_arc_segments(&mut segs, Arc { lo: wrap(a.lo + t), len: a.len });
            }
        }
        Self::from_segments(segs)
    }

    /// Circle distance from `theta` to the set (0 inside it).
    #[must_use]
    pub fn distance_to(&self, theta: f64) -> f64 {
        self.arcs
            .iter()
            .map(|a| {
                if a.contains(theta) {
                    0.0
                } else {
                    circle_dist(theta, a.lo).min(circle_dist(theta, a.hi()))
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].len >= 1.0
    }

    fn segments(&self) -> Segments {
        let mut segs = Vec::with_capacity(self.arcs.len() + 1);
        for &a in &self.arcs {
            push_arc_segments(&mut segs, a);
        }
        segs.sort_by(|x, y| x.0.total_cmp(&y.0));
        segs
    }

    fn from_segments(mut segs: Segments) -> Self {
        segs.retain(|s| s.1 > s.0);
        segs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Segments = Vec::with_capacity(segs.len());
        for (lo, hi) in segs {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        if merged.len() == 1 && merged[0].0 <= 0.0 && merged[0].1 >= 1.0 {
            return Self::full();
        }
        let wraps = merged.len() >= 2
            && merged[0].0 <= 0.0
            && merged.last().map_or(false, |s| s.1 >= 1.0);
        let mut arcs: Vec<Arc> = Vec::with_capacity(merged.len());
        if wraps {
            let first = merged.remove(0);
            let last = merged.pop().unwrap_or(first);
            for (lo, hi) in merged {
                arcs.push(Arc { lo, len: hi - lo });
            }
            arcs.push(Arc {
                lo: last.0,
                len: (1.0 - last.0) + first.1,
            });
        } else {
            for (lo, hi) in merged {
                arcs.push(Arc { lo: wrap(lo), len: hi - lo });
            }
        }
        arcs.sort_by(|x, y| x.lo.total_cmp(&y.lo));
        Self { arcs }
    }
}

fn push_arc_segments(segs: &mut Segments, arc: Arc) {
    if arc.len <= 0.0 {
        return;
    }
    if arc.len >= 1.0 {
        segs.push((0.0, 1.0));
        return;
    }
    let lo = wrap(arc.lo);
    let hi = lo + arc.len;
    if hi <= 1.0 {
        segs.push((lo, hi));
    } else {
        segs.push((lo, 1.0));
        segs.push((0.0, hi - 1.0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn circle_dist_examples() {
        assert!((circle_dist(0.1, 0.9) - 0.2).abs() < 1e-15);
        assert_eq!(circle_dist(0.3, 0.3), 0.0);
        assert_eq!(circle_dist(0.0, 0.5), 0.5);
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap(1.0), 0.0);
        assert_eq!(wrap(-0.25), 0.75);
        assert_eq!(wrap(-1e-300), 0.0);
    }

    #[test]
    fn wrapping_arc_is_one_arc() {
        let s = CircleSet::arc(0.9, 0.2);
        assert_eq!(s.n_arcs(), 1);
        assert!((s.measure() - 0.2).abs() < 1e-15);
        assert!(s.contains(0.05));
        assert!(s.contains(0.95));
        assert!(!s.contains(0.5));
    }

    #[test]
    fn complement_of_empty_is_full() {
        assert_eq!(CircleSet::empty().complement(), CircleSet::full());
        assert!(CircleSet::full().complement().is_empty());
    }

    #[test]
    fn translates_of_small_arc_are_disjoint() {
        let s = CircleSet::arc(0.1, 0.01);
        let t = s.translate(0.5);
        assert!(!s.overlaps(&t));
        assert!((s.union(&t).measure() - 0.02).abs() < 1e-15);
    }

    fn arb_set() -> impl Strategy<Value = CircleSet> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..0.3), 0..8)
            .prop_map(|v| CircleSet::from_arcs(v.into_iter().map(|(lo, len)| Arc::new(lo, len))))
    }

    proptest! {
        #[test]
        fn inclusion_exclusion(a in arb_set(), b in arb_set()) {
            let lhs = a.union(&b).measure() + a.intersect(&b).measure();
            let rhs = a.measure() + b.measure();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn complement_measure(a in arb_set()) {
            prop_assert!((a.measure() + a.complement().measure() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn translate_preserves_measure(a in arb_set(), t in -3.0f64..3.0) {
            prop_assert!((a.translate(t).measure() - a.measure()).abs() < 1e-14);
        }

        #[test]
        fn translate_composes(a in arb_set(), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
            let lhs = a.translate(t2).translate(t1);
            let rhs = a.translate(wrap(t1 + t2));
            prop_assert_eq!(lhs.n_arcs(), rhs.n_arcs());
            for (x, y) in lhs.arcs().iter().zip(rhs.arcs()) {
                prop_assert!(circle_dist(x.lo, y.lo) <= 4.0 * f64::EPSILON);
                prop_assert!((x.len - y.len).abs() <= 4.0 * f64::EPSILON);
            }
        }

        #[test]
        fn normalized_arcs_are_disjoint(a in arb_set()) {
            let arcs = a.arcs();
            let total: f64 = arcs.iter().map(|x| x.len).sum();
            prop_assert!(total <= 1.0 + 1e-12);
            for i in 0..arcs.len() {
                for j in 0..arcs.len() {
                    if i != j {
                        let x = CircleSet::from_arcs([arcs[i]]);
                        let y = CircleSet::from_arcs([arcs[j]]);
                        prop_assert!(x.intersect(&y).measure() < 1e-12);
                    }
                }
            }
        }

        #[test]
        fn circle_dist_range(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let d = circle_dist(a, b);
            prop_assert!((0.0..=0.5).contains(&d));
            prop_assert!((circle_dist(b, a) - d).abs() < 1e-12);
        }
    }
}
