//! Transfer matrices and their products along the rotation.

use qpc_core::{wrap, CocycleParams, SL2Mat};

const LN_2: f64 = std::f64::consts::LN_2;
/// Entries are rescaled by a power of two once their magnitude leaves
/// `[2^{-RESCALE_BITS}, 2^{RESCALE_BITS}]`; the check runs every step.
const RESCALE_BITS: i32 = 32;

/// `A_E(θ) = [[0, 1], [−1, λf(θ) − E]]` with `log_scale = 0`.
#[must_use]
pub fn transfer_matrix(params: &CocycleParams, theta: f64) -> SL2Mat {
    SL2Mat::new(0.0, 1.0, -1.0, params.v(theta))
}

/// `A^n_E(θ) = A_E(θ + (n−1)ω)⋯A_E(θ)` for `n ≥ 0`, and
/// `A^{−n}_E(θ) = (A^n_E(θ − nω))^{−1}` for negative exponents.
///
/// The result is renormalized so that its largest entry has magnitude one.
#[must_use]
pub fn cocycle_product(params: &CocycleParams, theta: f64, n: i64) -> SL2Mat {
    if n < 0 {
        let m = n.unsigned_abs();
        let start = wrap(theta - (m as f64 * params.omega).rem_euclid(1.0));
        return forward_product(params, start, m).inverse();
    }
    forward_product(params, theta, n.unsigned_abs())
}

fn forward_product(params: &CocycleParams, theta: f64, n: u64) -> SL2Mat {
    // Rows of the running product; left multiplication by A(θ_j) maps
    // (row0, row1) to (row1, v·row1 − row0).
    let (mut a, mut b, mut c, mut d) = (1.0f64, 0.0f64, 0.0f64, 1.0f64);
    let mut exp2: i64 = 0;
    let mut t = wrap(theta);
    for _ in 0..n {
        let v = params.v(t);
        let (na, nb) = (c, d);
        let (nc, nd) = (v * c - a, v * d - b);
        a = na;
        b = nb;
        c = nc;
        d = nd;
        let m = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        if !(f64_pow2(-RESCALE_BITS)..=f64_pow2(RESCALE_BITS)).contains(&m) {
            let e = exponent_of(m);
            let s = f64_pow2(-e);
            a *= s;
            b *= s;
            c *= s;
            d *= s;
            exp2 += i64::from(e);
        }
        t = wrap(t + params.omega);
    }
    SL2Mat {
        a,
        b,
        c,
        d,
        log_scale: exp2 as f64 * LN_2,
    }
    .renormalized()
}

/// The binary exponent `e` with `2^e ≤ m < 2^{e+1}` for finite positive `m`.
fn exponent_of(m: f64) -> i32 {
    m.log2().floor() as i32
}

fn f64_pow2(e: i32) -> f64 {
    2f64.powi(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qpc_core::{PotentialFn, GOLDEN_OMEGA};

    fn amo(lambda: f64, e: f64) -> CocycleParams {
        CocycleParams::new(lambda, e, GOLDEN_OMEGA, PotentialFn::cosine(), 0.38, 1.0).unwrap()
    }

    #[test]
    fn transfer_matrix_entries() {
        let p = amo(10.0, 0.0);
        let m = transfer_matrix(&p, 0.0);
        assert_eq!((m.a, m.b, m.c, m.d, m.log_scale), (0.0, 1.0, -1.0, 10.0, 0.0));
        for &t in &[0.1, 0.37, 0.9] {
            let m = transfer_matrix(&amo(10.0, 1.5), t);
            assert_eq!(m.unscaled_det(), 1.0);
            assert_eq!(m.trace(), amo(10.0, 1.5).v(t));
        }
    }

    #[test]
    fn zero_and_one_step() {
        let p = amo(100.0, 2.0);
        let id = cocycle_product(&p, 0.3, 0);
        assert_eq!(id, SL2Mat::identity());
        let one = cocycle_product(&p, 0.3, 1);
        let direct = transfer_matrix(&p, 0.3).renormalized();
        for (x, y) in [(one.a, direct.a), (one.b, direct.b), (one.c, direct.c), (one.d, direct.d)] {
            assert!((x - y).abs() < 1e-15);
        }
        assert!((one.log_scale - direct.log_scale).abs() < 1e-12);
    }

    #[test]
    fn short_products_have_unit_determinant() {
        let p = amo(3.0, 0.7);
        for n in [1, 2, 5, 10] {
            let m = cocycle_product(&p, 0.41, n);
            assert!((m.det() - 1.0).abs() < 1e-9, "n={n} det={}", m.det());
        }
    }

    #[test]
    fn cocycle_identity() {
        let p = amo(100.0, 0.0);
        let theta = 0.27;
        for (m, n) in [(3i64, 5i64), (100, 250), (1000, 700)] {
            let whole = cocycle_product(&p, theta, m + n);
            let first = cocycle_product(&p, theta, m);
            let second = cocycle_product(&p, wrap(theta + m as f64 * p.omega), n);
            let split = second.mul(&first);
            let rel = (whole.log_norm() - split.log_norm()).abs() / whole.log_norm().abs();
            assert!(rel < 1e-9 * (m + n) as f64, "m={m} n={n} rel={rel:e}");
        }
    }

    #[test]
    fn negative_power_inverts() {
        let p = amo(4.0, 0.3);
        let theta = 0.6;
        let fwd = cocycle_product(&p, theta, 7);
        let back = cocycle_product(&p, wrap(theta + 7.0 * p.omega), -7);
        let id = back.mul(&fwd);
        let s = id.log_scale.exp();
        assert!((id.a * s - 1.0).abs() < 1e-8 && (id.d * s - 1.0).abs() < 1e-8);
        assert!((id.b * s).abs() < 1e-8 && (id.c * s).abs() < 1e-8);
    }
}
