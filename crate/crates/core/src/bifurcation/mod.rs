//! Branch continuation, saddle-node and Hopf detection, and the
//! power–tunneling phase diagram.

mod continuation;
mod folds;
mod phase;

pub use continuation::{
    continue_branch, BranchCurve, BranchSample, Sector, StepControl, Termination,
};
pub use folds::{
    detect_hopf, detect_saddle_node, hopf_crossings, Fold, HopfCrossing, BRANCH_POINT_Z,
    FOLD_EIGEN_TOL_REL,
};
pub use phase::{
    phase_point, power_for_omega, region_of, sweep_phase_diagram, symmetric_fold_powers,
    BistableBoundary, PhaseDiagram, PhasePoint, Region,
};
