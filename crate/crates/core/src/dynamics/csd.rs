use rayon::prelude::*;

use super::quench::{simulate_quench, QuenchProtocol, QuenchStart};
use crate::error::{DimerError, Result};
use crate::model::SystemParams;
use crate::stats::{linear_fit, LinearFit};
use crate::steady::{BranchClass, MultistartOptions};

/// Power-law fit `τ ∝ δ^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsdFit {
    pub exponent: f64,
    pub stderr: f64,
    pub r2: f64,
    pub n: usize,
}

impl From<LinearFit> for CsdFit {
    fn from(f: LinearFit) -> Self {
        CsdFit {
            exponent: f.slope,
            stderr: f.slope_stderr,
            r2: f.r2,
            n: f.n,
        }
    }
}

/// Least-squares slope of `ln τ` against `ln δ` for `(δ, τ)` pairs with
/// `δ = |P_final − P_c|`.
pub fn csd_exponent_fit(points: &[(f64, f64)]) -> Result<CsdFit> {
    if points.len() < 5 {
        return Err(DimerError::InsufficientData(format!(
            "{} points; at least 5 are needed",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|&(d, t)| !(d > 0.0 && t > 0.0 && d.is_finite() && t.is_finite()))
    {
        return Err(DimerError::Domain(
            "offsets and relaxation times must be positive".into(),
        ));
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(0.0, f64::max);
    if hi / lo < 10.0 {
        return Err(DimerError::InsufficientData(format!(
            "offsets span {:.2} decades; widen the scan to at least one",
            (hi / lo).log10()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    Ok(linear_fit(&xs, &ys)?.into())
}

/// `n` offsets spaced logarithmically over `[lo, hi]`, largest first.
pub fn log_offsets(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n)
        .map(|i| (hi.ln() + (lo.ln() - hi.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Quenches toward one side of a saddle-node at `p_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsdScan {
    pub p_c: f64,
    /// Pre-quench power, on the side where `start` exists.
    pub p_init: f64,
    pub start: BranchClass,
    /// Relative offsets `δ/P_c`; the final power is `P_c (1 + sign·δ)`.
    pub offsets: Vec<f64>,
    /// +1 to quench above `p_c`, −1 below.
    pub sign: f64,
    pub template: QuenchProtocol,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsdPoint {
    pub p_final: f64,
    /// `|P_final − P_c|`, W.
    pub delta: f64,
    pub tau: f64,
    pub converged: bool,
    pub final_class: Option<BranchClass>,
}

/// Runs every quench of the scan in parallel, preserving offset order.
pub fn run_csd_scan(
    scan: &CsdScan,
    params: &SystemParams,
    solver: &MultistartOptions,
) -> Result<Vec<CsdPoint>> {
    scan.offsets
        .par_iter()
        .map(|&off| {
            let p_final = scan.p_c * (1.0 + scan.sign * off);
            let proto = QuenchProtocol {
                p_init: scan.p_init,
                p_final,
                start: QuenchStart::Branch(scan.start),
                ..scan.template.clone()
            };
            let (_, r) = simulate_quench(&proto, params, solver)?;
            Ok(CsdPoint {
                p_final,
                delta: (p_final - scan.p_c).abs(),
                tau: r.tau,
                converged: r.converged,
                final_class: r.final_fp.map(|f| f.branch_class),
            })
        })
        .collect()
}

/// Fit over the converged points of a scan.
pub fn fit_scan(points: &[CsdPoint]) -> Result<CsdFit> {
    let pairs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.converged)
        .map(|p| (p.delta, p.tau))
        .collect();
    csd_exponent_fit(&pairs)
}
