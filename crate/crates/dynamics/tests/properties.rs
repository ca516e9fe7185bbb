//! Property tests for orbits, shadowing and derivative recursions.

use proptest::prelude::*;
use qpc_core::{CocycleParams, PotentialFn, ProjPoint, GOLDEN_OMEGA};
use qpc_dynamics::{iterate, orbit_dtheta, reference_orbit, shadow_decompose};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn amo(lambda: f64, e: f64) -> CocycleParams {
    CocycleParams::new(lambda, e, GOLDEN_OMEGA, PotentialFn::cosine(), 0.38, 1.0).unwrap()
}

#[test]
fn pairing_soundness_on_random_orbits() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lambda = 100.0;
    let base = amo(lambda, 0.0);
    let (e_lo, e_hi) = base.energy_window();
    let lo = lambda.powi(-2);
    let hi = lambda.powi(2);
    let mut checked = 0;
    while checked < 10_000 {
        let p = base.with_energy(rng.gen_range(e_lo..e_hi));
        let r0 = ProjPoint::from_value(rng.gen_range(-50.0..50.0));
        let n = rng.gen_range(5..60);
        let o = iterate(&p, rng.gen::<f64>(), r0, n);
        if o.r[n].abs() < lo {
            continue;
        }
        let last = o.rho.len() - 1;
        for (i, f) in o.rho.iter().enumerate() {
            assert!(f.log_abs >= lo.ln(), "factor {i} below lambda^-2");
            if i > 0 && i < last {
                assert!(f.log_abs < hi.ln(), "interior factor {i} above lambda^2");
            }
            if f.end == f.start + 1 {
                assert!(f.log_abs.exp() > 0.5);
            }
        }
        checked += 1;
    }
}

#[test]
fn escape_from_outside_the_critical_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let lambda: f64 = 100.0;
    let base = amo(lambda, 0.0);
    let (e_lo, e_hi) = base.energy_window();
    let a = 2.0 * lambda.powf(0.75);
    for _ in 0..20_000 {
        let p = base.with_energy(rng.gen_range(e_lo..e_hi));
        let theta = rng.gen::<f64>();
        // Expansion outside the critical set.
        if p.v(theta).abs() > a {
            let mag = lambda.powf(-0.75) * (1.0 + rng.gen::<f64>() * 100.0);
            let r0 = if rng.gen::<bool>() { mag } else { -mag };
            let r1 = ProjPoint::from_value(r0).step(p.v(theta)).abs();
            assert!(r1 > lambda.powf(0.75));
        }
        // A tiny slope is thrown far out.
        let r0 = rng.gen_range(-1.0..1.0) * lambda.powi(-2);
        let r1 = ProjPoint::from_value(r0).step(p.v(theta)).abs();
        assert!(r1 > lambda * lambda / 2.0);
    }
}

#[test]
fn distinct_orbits_collapse() {
    let p = amo(100.0, 0.0);
    for &theta0 in &[0.11, 0.37, 0.73] {
        let a = iterate(&p, theta0, ProjPoint::from_value(1.3), 201);
        let b = iterate(&p, theta0, ProjPoint::from_value(-0.4), 201);
        let gap = |k: usize| (a.r[k].to_f64() - b.r[k].to_f64()).abs();
        assert!(gap(200).min(gap(201)) < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shadowing_reproduces_direct_iteration(theta0 in 0.0f64..1.0, k in 0usize..=30, s_exp in 0.75f64..1.5, neg in any::<bool>()) {
        let p = amo(100.0, 0.0);
        let s0 = if neg { -p.lp(s_exp) } else { p.lp(s_exp) };
        if let Ok(d) = shadow_decompose(&p, theta0, k) {
            let direct = iterate(&p, theta0, ProjPoint::from_value(s0), k + 1).r[k + 1].to_f64();
            let got = d.predict(s0).to_f64();
            prop_assert!(((got - direct) / direct).abs() < 1e-8, "k={} got {} direct {}", k, got, direct);
        }
    }

    #[test]
    fn theta_derivative_matches_finite_difference(theta0 in 0.0f64..1.0, k in 1usize..=15) {
        let p = amo(100.0, 0.0);
        let (_, r) = reference_orbit(&p, theta0, k);
        // Skip orbits where a slope near zero makes the finite difference ill-conditioned.
        prop_assume!((1..k).all(|j| r[j].abs() > 1e-2));
        let delta = 1e-7;
        let rk = |t: f64| reference_orbit(&p, t, k).1[k].to_f64();
        let fd = (rk(theta0 + delta) - rk(theta0 - delta)) / (2.0 * delta);
        let got = orbit_dtheta(&p, theta0, k).unwrap();
        prop_assert!(((got - fd) / fd).abs() < 1e-4, "k={} got {} fd {}", k, got, fd);
    }
}
