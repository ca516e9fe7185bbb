//! The probe on the almost Mathieu cocycle: branch shapes at large coupling,
//! agreement with the potential and with direct orbits, and entry times.

use qpc_core::{wrap, CocycleParams, ProjPoint};
use qpc_dynamics::iterate;
use qpc_geometry::{
    base_scale_report, critical_set, entry_time, phi, probe, BaseScale, BaseSchedule, Branch, CriticalSet,
    GeometryError, ProbeResult, Shape,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const K0: u64 = 4;
const M0: u64 = 16;

fn toy_scale(lambda: f64, e: f64) -> (CocycleParams, CriticalSet, BaseScale) {
    let p = CocycleParams::almost_mathieu(lambda, e);
    let j0 = critical_set(&p, 1e-13).unwrap();
    let b = base_scale_report(&p, &j0, BaseSchedule::Toy { k0: K0, m0: M0 });
    (p, j0, b)
}

fn toy_probe(lambda: f64, e: f64) -> Result<ProbeResult, GeometryError> {
    let (p, _, b) = toy_scale(lambda, e);
    probe(&p, &b.i0, M0 as usize, K0 as usize, 2000, 1e-13)
}

fn assert_opposite_branches(r: &ProbeResult) {
    assert_eq!((r.shape, r.branch), (Shape::TwoIntervals, Branch::BranchI));
    let s = &r.deriv_stats;
    assert_eq!(s.slope_signs.len(), 2);
    assert_eq!(s.slope_signs[0], -s.slope_signs[1]);
    for &(a, b) in &s.endpoint_values {
        assert!(a * b < 0.0 && (a.abs() - r.eps).abs() <= 1e-9 * r.eps, "{a} {b}");
    }
}

#[test]
fn interior_energies_at_large_coupling_give_opposite_branches() {
    for e in [-33_150_000.0, 2_550_000.0, 58_650_000.0] {
        let r = toy_probe(1e8, e).unwrap();
        assert_opposite_branches(&r);
        // The arcs are far below the float spacing near θ and come from the
        // closed form around the poles.
        assert_eq!(r.deriv_stats.pole_resolved, vec![true, true]);
        assert!(r.arcs.iter().all(|a| a.len > 0.0 && a.len < 1e-20), "{:?}", r.arcs);
    }
}

#[test]
fn resonant_energy_gives_opposite_branches() {
    let (_, _, b) = toy_scale(1e8, 73_950_000.0);
    assert!(b.resonant && b.nu0 > 0);
    assert_opposite_branches(&toy_probe(1e8, 73_950_000.0).unwrap());
}

#[test]
fn extra_arcs_near_the_spectrum_edge_are_reported() {
    match toy_probe(1e8, 99_450_000.0) {
        Err(GeometryError::UnresolvedShape { n_arcs, .. }) => assert_eq!(n_arcs, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn energies_off_the_spectrum_stop() {
    // Below and above the spectrum, and inside the widest gap, at λ = 100.
    for e in [-150.0, -37.0, 150.0] {
        let r = toy_probe(100.0, e).unwrap();
        assert_eq!((r.shape, r.branch), (Shape::Empty, Branch::Stop), "E = {e}");
        assert!(r.j_next.is_empty());
    }
}

#[test]
fn arcs_respect_the_mean_value_bound() {
    // A monotone arc whose image is [−ε, ε] has length at most 2ε/min|φ′|.
    for e in [-33_150_000.0, 2_550_000.0, 73_950_000.0] {
        let r = toy_probe(1e8, e).unwrap();
        let bound = 2.0 * r.eps / r.deriv_stats.min_abs_deriv;
        for a in &r.arcs {
            assert!(a.len <= bound * (1.0 + 1e-9), "{} > {bound}", a.len);
        }
    }
}

#[test]
fn one_step_probe_follows_the_potential() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = 4;
    for lambda in [100.0, 1e4] {
        let base = CocycleParams::almost_mathieu(lambda, 0.0);
        let (lo, hi) = base.energy_window();
        let mut checked = 0;
        while checked < 200 {
            let p = base.with_energy(rng.gen_range(lo..hi));
            let j0 = critical_set(&p, 1e-13).unwrap();
            let theta = rng.gen::<f64>();
            let start = theta - m as f64 * p.omega;
            if (0..m).any(|j| j0.set.contains(wrap(start + j as f64 * p.omega))) {
                continue;
            }
            let got = phi(&p, theta, m, 1).to_f64();
            assert!((got - p.v(theta)).abs() <= lambda.powf(-0.75), "{got} vs {}", p.v(theta));
            checked += 1;
        }
    }
}

#[test]
fn direct_orbits_track_the_probe() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (m, k) = (M0 as usize, K0 as usize);
    for e in [-33_150_000.0, 2_550_000.0, 58_650_000.0] {
        let (p, _, b) = toy_scale(1e8, e);
        let bound = 10.0 * p.lp(-(4.0 / 3.0) * m as f64);
        let start = b.i0.translate(-(m as f64) * p.omega);
        for _ in 0..200 {
            let arc = start.arcs()[rng.gen_range(0..start.n_arcs())];
            let theta0 = arc.at(rng.gen::<f64>());
            let r0 = if rng.gen::<bool>() { p.lp(0.75) } else { -p.lp(0.75) };
            let direct = iterate(&p, theta0, ProjPoint::from_value(r0), m + k).r[m + k];
            let probe = phi(&p, wrap(theta0 + m as f64 * p.omega), m, k);
            let gap = (direct.to_f64() - probe.to_f64()).abs();
            // The two computations see base points that differ by rounding
            // of θ0 + Mω, so agreement is up to a few ulps of φ on top of
            // the contraction bound.
            let noise = 64.0 * f64::EPSILON * probe.abs();
            assert!(gap <= bound + noise, "θ0 = {theta0}: gap {gap:e}");
        }
    }
}

#[test]
fn probe_start_points_enter_after_m0_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for e in [-33_150_000.0, 2_550_000.0, 73_950_000.0] {
        let (p, _, b) = toy_scale(1e8, e);
        let removed = b.i0.union_of_translates(p.omega, 0..=b.nu0 as i64);
        let start = b.i0.translate(-(M0 as f64) * p.omega);
        for _ in 0..200 {
            let arc = start.arcs()[rng.gen_range(0..start.n_arcs())];
            let theta0 = arc.at(rng.gen::<f64>());
            assert!(!removed.contains(theta0));
            assert_eq!(entry_time(theta0, &b.i0, p.omega, 10 * M0 as usize), Some(M0 as usize));
        }
    }
}

proptest::proptest! {
    #[test]
    fn critical_set_is_the_sublevel_set(lambda in 20.0f64..2000.0, s in 0.01f64..0.99, theta in 0.0f64..1.0) {
        let p = CocycleParams::almost_mathieu(lambda, 0.0);
        let (lo, hi) = p.energy_window();
        let p = p.with_energy(lo + s * (hi - lo));
        let j = critical_set(&p, 1e-13).unwrap();
        let a = 2.0 * p.lp(0.75);
        // Membership is decided away from the endpoints, where it is stable under rounding.
        let margin = (p.v(theta).abs() - a).abs();
        proptest::prop_assume!(margin > 1e-6 * a);
        proptest::prop_assert_eq!(j.set.contains(theta), p.v(theta).abs() <= a);
        proptest::prop_assert!((1..=2).contains(&j.set.n_arcs()));
    }
}
