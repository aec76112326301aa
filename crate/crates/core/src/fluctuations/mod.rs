//! Linearised Gaussian fluctuations: Lyapunov covariance, magnon reduction,
//! fidelity, mutual information and negativity.

mod gaussian;
mod lyapunov;
mod report;

pub use gaussian::{
    check_physical, entropy_function, gaussian_fidelity, logarithmic_negativity,
    mutual_information, partial_transpose_min_eigenvalue, reduce_to_magnons,
    single_mode_symplectic_eigenvalue, symplectic_eigenvalues, symplectic_form,
    symplectic_spectrum_direct, two_mode_symplectic_eigenvalues, TwoModeCM, PHYSICAL_TOL,
};
pub use lyapunov::{solve_lyapunov, CovarianceMatrix};
pub use report::{
    analyze_fluctuations, fluctuation_rows, fluctuation_scan, stable_reports, FluctuationReport,
    FluctuationRow, Pairing,
};
