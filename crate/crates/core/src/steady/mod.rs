//! Steady states: analytic on the symmetric subspace, multistart Newton in
//! general, plus stability and branch classification.

mod cubic;
mod effective;
mod fixed_point;
mod multistart;
mod newton;

pub use cubic::solve_cubic_positive_roots;
pub use effective::{
    asymmetric_cubic_coefficients, bistability_criterion, cubic_relative_residuals,
    AsymmetricEffectiveParams, BistabilityCriterion, SymmetricEffectiveParams,
};
pub use fixed_point::{
    classify, population_imbalance, spectrum, stability_of, BranchClass, FixedPoint, Stability,
    SYMMETRY_TOL,
};
pub use multistart::{
    default_seeds, find_all_fixed_points, stable_of_class, symmetric_roots, symmetric_state,
    symmetric_steady_states, MultistartOptions,
};
pub use newton::{damped_newton, NewtonOptions, NewtonOutcome};
