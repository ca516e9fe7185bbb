//! Consistency of matrix products with fiber orbits, and estimator checks.

use proptest::prelude::*;
use qpc_cocycle::{cocycle_product, lyapunov, Estimator};
use qpc_core::{CocycleParams, PotentialFn, ProjPoint, SL2Mat, GOLDEN_OMEGA};
use qpc_dynamics::iterate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn amo(lambda: f64, e: f64) -> CocycleParams {
    CocycleParams::new(lambda, e, GOLDEN_OMEGA, PotentialFn::cosine(), 0.38, 1.0).unwrap()
}

#[test]
fn product_matches_fiber_orbit_projectively() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let base = amo(100.0, 0.0);
    let (lo, hi) = base.energy_window();
    for _ in 0..1000 {
        let p = base.with_energy(rng.gen_range(lo..hi));
        let theta = rng.gen::<f64>();
        let r0 = rng.gen_range(-20.0..20.0);
        let n = rng.gen_range(1..1000usize);
        let m = cocycle_product(&p, theta, n as i64);
        let (x, y) = m.apply_unscaled(1.0, r0);
        let from_matrix = ProjPoint::new(x, y).angle_fraction();
        let from_orbit = iterate(&p, theta, ProjPoint::from_value(r0), n).r[n].angle_fraction();
        let diff = (from_matrix - from_orbit).abs();
        let err = diff.min(1.0 - diff);
        assert!(err < 1e-10 * (1.0 + n as f64 / 1000.0), "n={n} err={err:e}");
    }
}

#[test]
fn exponent_is_independent_of_sample_phase() {
    // 4 and 7 equispaced samples share only θ = 0.
    let p = amo(100.0, 7.0);
    let a = lyapunov(&p, 100_000, 4, 1000, Estimator::MatrixNorm);
    let b = lyapunov(&p, 100_000, 7, 1000, Estimator::MatrixNorm);
    assert!((a.gamma - b.gamma).abs() < 1e-3 * a.gamma, "{} vs {}", a.gamma, b.gamma);
}

#[test]
fn estimators_agree_at_full_length() {
    for &e in &[-80.0, -20.0, 0.5, 36.0, 95.0] {
        let p = amo(100.0, e);
        let a = lyapunov(&p, 100_000, 8, 1000, Estimator::MatrixNorm);
        let b = lyapunov(&p, 100_000, 8, 1000, Estimator::PairedProduct);
        assert!((a.gamma - b.gamma).abs() < 1e-3 * a.gamma, "E={e}: {} vs {}", a.gamma, b.gamma);
    }
}

proptest! {
    #[test]
    fn norm_of_product_dominates_quotient(
        a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0,
        x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0,
    ) {
        prop_assume!(a.abs() > 0.1 && x.abs() > 0.1);
        let m = SL2Mat::new(a, b, c, (1.0 + b * c) / a);
        let n = SL2Mat::new(x, y, z, (1.0 + y * z) / x);
        prop_assert!(m.mul(&n).log_norm() >= m.log_norm() - n.log_norm() - 1e-9);
    }
}
