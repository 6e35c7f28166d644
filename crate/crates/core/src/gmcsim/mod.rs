//! Simulation of the regularized log-correlated field on [0, 1) and deterministic
//! checks of the cone construction, Girsanov shifts and intermittency invariance.

mod checks;
mod conical;
mod covariance;
mod io;
mod sampler;

pub use checks::{girsanov_check, intermittency_invariance_check};
pub use conical::{conical_intensity, rho_intersection, ConicalIntensity, PositivityReport, POSITIVITY_GRID};
pub use covariance::{
    build_covariance, covariance_matrix, regularized_log_cov, CovarianceGrid, Factor, FactorDiagnostics, MAX_CLIPPED,
    MAX_JITTER,
};
pub use io::{read_binary, read_csv, write_binary, write_csv, BINARY_HEADER};
pub use sampler::{grid_second_moment, sample_total_mass, GridMeta, MassSampleSet, CHUNK};
