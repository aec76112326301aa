//! Time-domain integration, quenches and relaxation times.

mod csd;
mod integrator;
mod quench;
mod trajectory;

pub use csd::{csd_exponent_fit, fit_scan, log_offsets, run_csd_scan, CsdFit, CsdPoint, CsdScan};
pub use integrator::{dopri5, DenseStep, IntegrationStats, IntegratorOptions};
pub use quench::{relaxation_time, simulate_quench, QuenchProtocol, QuenchStart, RelaxationResult};
pub use trajectory::{integrate, Sampling, Segment, Trajectory};
