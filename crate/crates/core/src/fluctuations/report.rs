use rayon::prelude::*;

use super::gaussian::{
    gaussian_fidelity, logarithmic_negativity, mutual_information, reduce_to_magnons,
    two_mode_symplectic_eigenvalues, TwoModeCM,
};
use super::lyapunov::{solve_lyapunov, CovarianceMatrix};
use crate::error::Result;
use crate::model::{diffusion_matrix, drift_matrix, Dimer, SystemParams};
use crate::steady::{find_all_fixed_points, BranchClass, FixedPoint, MultistartOptions};

/// Gaussian fluctuation summary of one stable fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationReport {
    pub covariance: CovarianceMatrix,
    pub lyapunov_residual: f64,
    pub magnons: TwoModeCM,
    /// Fidelity between the left and right magnon states.
    pub fidelity: f64,
    pub mutual_information: f64,
    pub log_negativity: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
}

impl FluctuationReport {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

/// Solves the Lyapunov equation at `fp` and evaluates the magnon measures.
pub fn analyze_fluctuations(fp: &FixedPoint, d: &Dimer) -> Result<FluctuationReport> {
    let a = drift_matrix(&fp.state, d);
    let dm = diffusion_matrix(d);
    let covariance = solve_lyapunov(&a, &dm)?;
    let magnons = reduce_to_magnons(&covariance);
    let (nu_plus, nu_minus) = two_mode_symplectic_eigenvalues(&magnons)?;
    Ok(FluctuationReport {
        lyapunov_residual: covariance.lyapunov_residual(&a, &dm),
        fidelity: gaussian_fidelity(&magnons.alpha, &magnons.gamma)?,
        mutual_information: mutual_information(&magnons)?,
        log_negativity: logarithmic_negativity(&magnons)?,
        nu_plus,
        nu_minus,
        covariance,
        magnons,
    })
}

/// Which magnon states a fidelity row compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Left vs right magnon of the same fixed point.
    Within,
    /// Left magnon of one fixed point vs right magnon of another.
    Cross,
}

impl Pairing {
    pub fn label(self) -> &'static str {
        match self {
            Pairing::Within => "within",
            Pairing::Cross => "cross",
        }
    }
}

/// One fidelity comparison at a given power. Per-state quantities are set
/// only for `Within` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationRow {
    pub p_d: f64,
    pub class_a: BranchClass,
    pub class_b: BranchClass,
    pub pairing: Pairing,
    pub fidelity: f64,
    pub infidelity: f64,
    pub mutual_information: Option<f64>,
    pub log_negativity: Option<f64>,
    pub nu_plus: Option<f64>,
    pub nu_minus: Option<f64>,
    pub lyapunov_residual: Option<f64>,
}

/// Stable states at one power with their fluctuation reports.
pub fn stable_reports(
    d: &Dimer,
    solver: &MultistartOptions,
) -> Result<Vec<(FixedPoint, FluctuationReport)>> {
    find_all_fixed_points(d, None, solver)?
        .into_iter()
        .filter(|f| f.is_stable())
        .map(|f| {
            let r = analyze_fluctuations(&f, d)?;
            Ok((f, r))
        })
        .collect()
}

/// Within-state rows for every stable state, then cross-state rows for
/// every ordered pair of distinct stable states.
pub fn fluctuation_rows(
    p_d: f64,
    reports: &[(FixedPoint, FluctuationReport)],
) -> Result<Vec<FluctuationRow>> {
    let mut rows = Vec::new();
    for (fp, r) in reports {
        rows.push(FluctuationRow {
            p_d,
            class_a: fp.branch_class,
            class_b: fp.branch_class,
            pairing: Pairing::Within,
            fidelity: r.fidelity,
            infidelity: r.infidelity(),
            mutual_information: Some(r.mutual_information),
            log_negativity: Some(r.log_negativity),
            nu_plus: Some(r.nu_plus),
            nu_minus: Some(r.nu_minus),
            lyapunov_residual: Some(r.lyapunov_residual),
        });
    }
    for (i, (fa, ra)) in reports.iter().enumerate() {
        for (j, (fb, rb)) in reports.iter().enumerate() {
            if i == j {
                continue;
            }
            let f = gaussian_fidelity(&ra.magnons.alpha, &rb.magnons.gamma)?;
            rows.push(FluctuationRow {
                p_d,
                class_a: fa.branch_class,
                class_b: fb.branch_class,
                pairing: Pairing::Cross,
                fidelity: f,
                infidelity: 1.0 - f,
                mutual_information: None,
                log_negativity: None,
                nu_plus: None,
                nu_minus: None,
                lyapunov_residual: None,
            });
        }
    }
    Ok(rows)
}

/// Fluctuation rows over a list of powers, computed in parallel and returned
/// in power order.
pub fn fluctuation_scan(
    params: &SystemParams,
    powers: &[f64],
    solver: &MultistartOptions,
) -> Result<Vec<FluctuationRow>> {
    let per_power: Vec<Result<Vec<FluctuationRow>>> = powers
        .par_iter()
        .map(|&p| {
            let d = params.with_power(p).derived()?;
            fluctuation_rows(p, &stable_reports(&d, solver)?)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_power {
        out.extend(r?);
    }
    Ok(out)
}
