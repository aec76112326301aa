//! Parameters, state representations, equations of motion and the
//! linearized drift/diffusion matrices of the dimer.

pub(crate) mod equations;
mod linear;
pub(crate) mod params;
mod state;

pub use equations::{amplitude_phase_rhs, eom_rhs, PolarDerivative};
pub use linear::{diffusion_matrix, drift_matrix, parity_matrix, Matrix8};
pub use params::{drive_amplitude, Dimer, SystemParams, Tunneling, HBAR};
pub use state::{FieldState, PolarState, QuadratureVector, Side};
