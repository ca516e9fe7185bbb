//! The operator `(H_θ u)_j = −(u_{j+1} + u_{j−1}) + λf(θ + (j−1)ω)·u_j` on
//! finite windows with Dirichlet boundary conditions.
//!
//! Eigenvalues come from Sturm-sequence bisection, which also yields the
//! eigenvalue counts behind the integrated density of states. Gaps are read
//! off as plateaus of the density of states; eigenvectors near gap edges are
//! built from a twisted factorization so their exponentially small tails keep
//! full relative accuracy.

pub mod eigen;
pub mod error;
pub mod gaps;
pub mod truncation;

pub use eigen::{eigenvalues, gap_edge_eigenfunction, kth_eigenvalue, sturm_count, EdgeEigenfunction};
pub use error::OperatorError;
pub use gaps::{detect_gaps, gaps_from_values, ids, refine_grid, EnergySet, Gap, GapReport, IdsEvaluator};
pub use truncation::{build_truncation, TridiagonalTruncation};
