//! Integrated density of states and gap detection.

use qpc_cocycle::gap_label;
use qpc_core::CocycleParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::sturm_count;
use crate::error::OperatorError;
use crate::truncation::{build_truncation, TridiagonalTruncation};

/// Largest `|k|` tried when labelling a gap.
pub const LABEL_K_MAX: u32 = 30;
/// Tolerance on `‖ids − kω‖` when labelling a gap.
pub const LABEL_TOL: f64 = 1e-3;

/// Eigenvalue counts of a fixed family of truncations, for repeated
/// evaluation of the density of states at many energies.
#[derive(Clone, Debug)]
pub struct IdsEvaluator {
    truncations: Vec<TridiagonalTruncation>,
    n: usize,
}

impl IdsEvaluator {
    /// Truncations of size `n` at the phases `s/theta_samples`.
    ///
    /// # Panics
    /// If `n < 2` or `theta_samples == 0`.
    #[must_use]
    pub fn new(params: &CocycleParams, n: usize, theta_samples: usize) -> Self {
        assert!(theta_samples > 0, "at least one phase sample is required");
        let truncations = (0..theta_samples)
            .map(|s| build_truncation(params, s as f64 / theta_samples as f64, n))
            .collect();
        Self { truncations, n }
    }

    /// Truncation size.
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of phase samples.
    #[must_use]
    pub fn theta_samples(&self) -> usize {
        self.truncations.len()
    }

    /// Mean of `#{eigenvalues ≤ e}/n` over the phase samples.
    #[must_use]
    pub fn at(&self, e: f64) -> f64 {
        let total: usize = self.truncations.iter().map(|t| sturm_count(t, e)).sum();
        total as f64 / (self.n * self.truncations.len()) as f64
    }

    /// [`IdsEvaluator::at`] on every energy, in parallel, in input order.
    #[must_use]
    pub fn at_many(&self, energies: &[f64]) -> Vec<f64> {
        energies.par_iter().map(|&e| self.at(e)).collect()
    }
}

/// Integrated density of states `k(E)` estimated from `theta_samples`
/// truncations of size `n`.
///
/// # Panics
/// If `n < 100`.
#[must_use]
pub fn ids(params: &CocycleParams, e: f64, n: usize, theta_samples: usize) -> f64 {
    assert!(n >= 100, "truncation size must be at least 100");
    IdsEvaluator::new(params, n, theta_samples).at(e)
}

/// Insert midpoints until adjacent density-of-states values differ by at
/// most `max_jump`, or the grid holds `max_points` energies, or the spacing
/// falls below `min_spacing`. Returns the grid and the values on it.
#[must_use]
pub fn refine_grid(
    evaluator: &IdsEvaluator,
    grid: &[f64],
    max_jump: f64,
    min_spacing: f64,
    max_points: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut energies = grid.to_vec();
    let mut values = evaluator.at_many(&energies);
    loop {
        let inserts: Vec<f64> = energies
            .windows(2)
            .zip(values.windows(2))
            .filter(|(e, v)| v[1] - v[0] > max_jump && e[1] - e[0] > 2.0 * min_spacing)
            .map(|(e, _)| 0.5 * (e[0] + e[1]))
            .collect();
        if inserts.is_empty() || energies.len() + inserts.len() > max_points {
            return (energies, values);
        }
        let new_values = evaluator.at_many(&inserts);
        let mut merged: Vec<(f64, f64)> = energies
            .into_iter()
            .zip(values)
            .chain(inserts.into_iter().zip(new_values))
            .collect();
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        (energies, values) = merged.into_iter().unzip();
    }
}

/// A finite union of closed energy intervals, sorted and disjoint.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergySet {
    /// `(lo, hi)` pairs in increasing order.
    pub intervals: Vec<(f64, f64)>,
}

impl EnergySet {
    /// Sort and merge overlapping intervals.
    #[must_use]
    pub fn from_intervals(mut intervals: Vec<(f64, f64)>) -> Self {
        intervals.retain(|(a, b)| b >= a);
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        Self { intervals: out }
    }

    /// Membership.
    #[must_use]
    pub fn contains(&self, e: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= e && e <= b)
    }

    /// Distance from `e` to the nearest interval endpoint.
    #[must_use]
    pub fn distance_to_boundary(&self, e: f64) -> f64 {
        self.intervals
            .iter()
            .flat_map(|&(a, b)| [(e - a).abs(), (e - b).abs()])
            .fold(f64::INFINITY, f64::min)
    }

    /// Total length.
    #[must_use]
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }
}

/// A spectral gap located between two grid energies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    /// Last grid energy before the density of states leaves the plateau.
    pub lo: f64,
    /// First grid energy where it is still on the plateau, from the right.
    pub hi: f64,
    /// Plateau value of the density of states.
    pub ids: f64,
    /// Smallest `|k|` with `ids ≈ {kω}`, if any.
    pub label: Option<i64>,
}

impl Gap {
    /// `hi − lo`.
    #[must_use]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Gaps found on an energy grid, and the complementary cover of the spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// Coupling `λ`.
    pub lambda: f64,
    /// Frequency `ω`.
    pub omega: f64,
    /// Gaps, sorted and disjoint.
    pub gaps: Vec<Gap>,
    /// Energies between the outer plateaus, minus the gaps, padded by `margin`.
    pub spectrum_cover: EnergySet,
    /// Padding applied to the cover.
    pub margin: f64,
    /// Truncation size.
    pub n: usize,
    /// Phase samples.
    pub theta_samples: usize,
    /// Minimum reported gap width.
    pub min_width: f64,
    /// Flatness threshold `1/n` on the density of states.
    pub flat_tol: f64,
    /// Labelling tolerance.
    pub label_tol: f64,
}

impl GapReport {
    /// Gaps ordered by decreasing width.
    #[must_use]
    pub fn widest(&self) -> Vec<Gap> {
        let mut g = self.gaps.clone();
        g.sort_by(|a, b| b.width().total_cmp(&a.width()));
        g
    }
}

/// Detect gaps as plateaus of the density of states on a sorted grid.
pub fn detect_gaps(
    params: &CocycleParams,
    e_grid: &[f64],
    n: usize,
    theta_samples: usize,
    min_width: f64,
) -> Result<GapReport, OperatorError> {
    let evaluator = IdsEvaluator::new(params, n, theta_samples);
    let values = evaluator.at_many(e_grid);
    gaps_from_values(params, &evaluator, e_grid, &values, min_width)
}

/// [`detect_gaps`] on precomputed density-of-states values.
pub fn gaps_from_values(
    params: &CocycleParams,
    evaluator: &IdsEvaluator,
    e_grid: &[f64],
    values: &[f64],
    min_width: f64,
) -> Result<GapReport, OperatorError> {
    let m = e_grid.len();
    if m < 2 || values.len() != m {
        return Err(OperatorError::InvalidParameter("grid needs at least two energies".into()));
    }
    if e_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(OperatorError::InvalidParameter("energy grid must be strictly increasing".into()));
    }
    let n = evaluator.n();
    let flat = 1.0 / n as f64;
    for (e, v) in e_grid.windows(2).zip(values.windows(2)) {
        let jump = v[1] - v[0];
        if jump > 10.0 * flat {
            return Err(OperatorError::GridTooCoarse {
                e_lo: e[0],
                e_hi: e[1],
                jump,
            });
        }
    }
    let mut gaps = Vec::new();
    let mut lower = e_grid[0];
    let mut upper = e_grid[m - 1];
    let mut i = 0;
    let mut j = 0;
    while i + 1 < m {
        j = j.max(i);
        while j + 1 < m && values[j + 1] - values[i] < flat {
            j += 1;
        }
        if j > i {
            let plateau = 0.5 * (values[i] + values[j]);
            if i == 0 && values[i] < flat {
                lower = e_grid[j];
            } else if j == m - 1 && values[j] > 1.0 - flat {
                upper = e_grid[i];
            } else if e_grid[j] - e_grid[i] >= min_width {
                gaps.push(Gap {
                    lo: e_grid[i],
                    hi: e_grid[j],
                    ids: plateau,
                    label: gap_label(plateau / 2.0, params.omega, LABEL_K_MAX, LABEL_TOL),
                });
            }
            i = j;
        } else {
            i += 1;
        }
    }
    let margin = 2.0 / n as f64;
    let mut pieces = Vec::with_capacity(gaps.len() + 1);
    let mut a = lower;
    for g in &gaps {
        pieces.push((a - margin, g.lo + margin));
        a = g.hi;
    }
    pieces.push((a - margin, upper + margin));
    Ok(GapReport {
        lambda: params.lambda,
        omega: params.omega,
        gaps,
        spectrum_cover: EnergySet::from_intervals(pieces),
        margin,
        n,
        theta_samples: evaluator.theta_samples(),
        min_width,
        flat_tol: flat,
        label_tol: LABEL_TOL,
    })
}
