//! Driven-dissipative cavity–magnon dimer.
//!
//! Two microwave cavities, each holding a Kerr-nonlinear magnon mode, are
//! coupled by photon tunneling and driven homogeneously. This crate finds
//! every steady state of the semiclassical equations, traces their branches
//! through saddle-node folds, integrates quench dynamics, and evaluates the
//! linearized Gaussian fluctuations (covariance, fidelity, mutual
//! information) around stable states.
//!
//! Frequencies are configured as `ν = ω/2π` in Hz and converted once to
//! angular units by [`model::SystemParams::derived`].

pub mod bifurcation;
pub mod dynamics;
pub mod error;
pub mod fluctuations;
pub mod model;
pub mod stats;
pub mod steady;

pub use error::{DimerError, Result};
pub use model::{Dimer, FieldState, QuadratureVector, SystemParams, Tunneling};
