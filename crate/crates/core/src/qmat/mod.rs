//! Dense Hermitian linear algebra and validated quantum objects.

mod hermitian;
pub mod io;
mod measurement;
pub mod random;
mod state;

pub use hermitian::{matrix_log, trace_norm, CMatrix, Eigen, HermitianMatrix, C64};
pub use measurement::Povm;
pub use state::{trace_distance, DensityMatrix, ExtendedReal, ProbabilityVector};

/// Eigenvalues above `-PSD_TOLERANCE` count as nonnegative.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Probabilities above `-PROB_TOLERANCE` count as nonnegative.
pub const PROB_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Entrywise tolerance for `Σ M_i = 1`.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-9;
