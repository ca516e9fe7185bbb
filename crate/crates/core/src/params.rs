//! The parameter bundle `(λ, E, ω, f, κ, τ)` of one cocycle instance.

use crate::error::CoreError;
use crate::potential::{validate_potential, PotentialFn, DEFAULT_D2F_FLOOR};

/// The golden-mean frequency `(√5 − 1)/2`.
pub const GOLDEN_OMEGA: f64 = 0.618_033_988_749_894_9;

/// Parameters of the cocycle `A_E(θ) = [[0, 1], [−1, λf(θ) − E]]` over the
/// rotation `θ ↦ θ + ω`, together with the Diophantine constants `(κ, τ)`
/// of `ω`: `‖qω‖ > κ/|q|^τ` for all `q ≠ 0`.
#[derive(Clone, Debug)]
pub struct CocycleParams {
    /// Coupling `λ > 0`.
    pub lambda: f64,
    /// Energy `E`.
    pub energy: f64,
    /// Frequency `ω ∈ [0, 1)`.
    pub omega: f64,
    /// Potential `f`.
    pub potential: PotentialFn,
    /// Diophantine constant `κ > 0`.
    pub kappa: f64,
    /// Diophantine exponent `τ ≥ 1`.
    pub tau: f64,
}

impl CocycleParams {
    /// Validated parameters. The potential must pass the Morse check on a
    /// 4096-point grid with the default `|f″|` floor.
    pub fn new(
        lambda: f64,
        energy: f64,
        omega: f64,
        potential: PotentialFn,
        kappa: f64,
        tau: f64,
    ) -> Result<Self, CoreError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(CoreError::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
        }
        if !energy.is_finite() {
            return Err(CoreError::InvalidParameter(format!("energy must be finite, got {energy}")));
        }
        if !(0.0..1.0).contains(&omega) {
            return Err(CoreError::InvalidParameter(format!("omega must lie in [0,1), got {omega}")));
        }
        if !(kappa > 0.0) {
            return Err(CoreError::InvalidParameter(format!("kappa must be > 0, got {kappa}")));
        }
        if !(tau >= 1.0) {
            return Err(CoreError::InvalidParameter(format!("tau must be >= 1, got {tau}")));
        }
        validate_potential(&potential, 4096, DEFAULT_D2F_FLOOR)?;
        Ok(Self {
            lambda,
            energy,
            omega,
            potential,
            kappa,
            tau,
        })
    }

    /// Almost Mathieu parameters: `f = cos 2πθ`, golden `ω`, `κ = 0.38`, `τ = 1`.
    #[must_use]
    pub fn almost_mathieu(lambda: f64, energy: f64) -> Self {
        Self::new(lambda, energy, GOLDEN_OMEGA, PotentialFn::cosine(), 0.38, 1.0)
            .expect("almost Mathieu parameters are valid for lambda > 0")
    }

    /// The same parameters at another energy.
    #[must_use]
    pub fn with_energy(&self, energy: f64) -> Self {
        Self {
            energy,
            ..self.clone()
        }
    }

    /// The same parameters at another coupling.
    #[must_use]
    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    /// `v(θ) = λf(θ) − E`, the trace of `A_E(θ)`.
    #[inline]
    #[must_use]
    pub fn v(&self, theta: f64) -> f64 {
        self.lambda * self.potential.f(theta) - self.energy
    }

    /// `v′(θ) = λf′(θ)`.
    #[inline]
    #[must_use]
    pub fn dv(&self, theta: f64) -> f64 {
        self.lambda * self.potential.df(theta)
    }

    /// `v″(θ) = λf″(θ)`.
    #[inline]
    #[must_use]
    pub fn d2v(&self, theta: f64) -> f64 {
        self.lambda * self.potential.d2f(theta)
    }

    /// `λ^p`.
    #[inline]
    #[must_use]
    pub fn lp(&self, p: f64) -> f64 {
        self.lambda.powf(p)
    }

    /// The energy window `(λf_min − 2λ^{3/4}, λf_max + 2λ^{3/4})` outside
    /// which every fiber step expands.
    #[must_use]
    pub fn energy_window(&self) -> (f64, f64) {
        let a = 2.0 * self.lp(0.75);
        (
            self.lambda * self.potential.f_min() - a,
            self.lambda * self.potential.f_max() + a,
        )
    }

    /// Whether the energy lies in the open window of [`Self::energy_window`].
    #[must_use]
    pub fn energy_in_window(&self) -> bool {
        let (lo, hi) = self.energy_window();
        self.energy > lo && self.energy < hi
    }
}
