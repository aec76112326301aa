//! Saddle-node and Hopf detection along a continued branch.

use nalgebra::DVector;
use num_complex::Complex64;

use super::continuation::{BranchCurve, BranchSample, Sector};
use crate::steady::FixedPoint;

/// A turning point of a branch in `P_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fold {
    pub p_d: f64,
    pub point: FixedPoint,
    /// Smallest drift eigenvalue modulus at the refined point.
    pub min_abs_eigenvalue: f64,
    /// Index of the last sample before the turn.
    pub index: usize,
}

/// Eigenvalue modulus below which a tangent turn counts as a saddle-node.
pub const FOLD_EIGEN_TOL_REL: f64 = 1e-3;

/// `|Z|` below which a turning point of an asymmetric branch is taken to lie
/// on the symmetric subspace.
pub const BRANCH_POINT_Z: f64 = 1e-3;

/// Verified saddle-nodes along the curve.
pub fn detect_saddle_node(curve: &BranchCurve) -> Vec<Fold> {
    locate_folds(curve).folds
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Turns {
    pub folds: Vec<Fold>,
    pub branch_points: Vec<Fold>,
    pub anomalies: Vec<Fold>,
}

/// Refines every sign change of `dP_d/ds` by bisection on the tangent and
/// sorts the results into saddle-nodes, symmetric branch points and
/// uncorroborated anomalies.
pub(crate) fn locate_folds(curve: &BranchCurve) -> Turns {
    let mut turns = Turns::default();
    for (i, w) in curve.samples.windows(2).enumerate() {
        if w[0].dp_ds * w[1].dp_ds >= 0.0 {
            continue;
        }
        let refined = refine(curve, &w[0], &w[1]).unwrap_or_else(|| {
            if w[0].dp_ds.abs() < w[1].dp_ds.abs() {
                w[0].clone()
            } else {
                w[1].clone()
            }
        });
        let min_abs = refined
            .point
            .eigenvalues
            .iter()
            .map(|e| e.norm())
            .fold(f64::INFINITY, f64::min);
        let fold = Fold {
            p_d: refined.p_d,
            point: refined.point,
            min_abs_eigenvalue: min_abs,
            index: i,
        };
        if min_abs >= FOLD_EIGEN_TOL_REL * curve.ctx.base.kappa_a {
            turns.anomalies.push(fold);
        } else if curve.sector == Sector::Full && fold.point.imbalance_z.abs() < BRANCH_POINT_Z {
            turns.branch_points.push(fold);
        } else {
            turns.folds.push(fold);
        }
    }
    turns
}

/// Bisection in arclength between two samples on the sign of `dΩ/ds`.
fn refine(curve: &BranchCurve, a: &BranchSample, b: &BranchSample) -> Option<BranchSample> {
    let ctx = &curve.ctx;
    let t0 = &a.tangent;
    let h_total = t0.dot(&(&b.y - &a.y));
    if !(h_total > 0.0) {
        return None;
    }
    let solve = |h: f64| -> Option<(DVector<f64>, DVector<f64>)> {
        let guess = &a.y + (&b.y - &a.y) * (h / h_total);
        let (y, _) = ctx.correct(&guess, t0, t0.dot(&a.y) + h)?;
        let t = ctx.tangent(&y, t0)?;
        Some((y, t))
    };
    let sign_a = a.dp_ds.signum();
    let (mut lo, mut hi) = (0.0, h_total);
    let mut best: Option<(DVector<f64>, DVector<f64>)> = None;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let (y, t) = solve(mid)?;
        let n = t.len() - 1;
        if t[n].signum() == sign_a {
            lo = mid;
        } else {
            hi = mid;
        }
        best = Some((y, t));
        if hi - lo < 1e-15 * (1.0 + h_total) {
            break;
        }
    }
    let (y, t) = best?;
    Some(ctx.sample(y, t))
}

/// A complex-conjugate eigenvalue pair crossing the imaginary axis.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfCrossing {
    /// Index of the last sample before the crossing.
    pub index: usize,
    /// Parameter value interpolated linearly to the crossing.
    pub param: f64,
    /// `|Im λ|` of the crossing pair.
    pub frequency: f64,
}

fn oscillatory_growth(eigs: &[Complex64], im_tol: f64) -> Option<(f64, f64)> {
    eigs.iter()
        .filter(|e| e.im.abs() > im_tol)
        .map(|e| (e.re, e.im.abs()))
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
}

/// Scans a sequence of spectra for sign changes of the largest real part
/// among eigenvalues with `|Im| > im_tol`.
pub fn hopf_crossings(
    params: &[f64],
    spectra: &[Vec<Complex64>],
    im_tol: f64,
) -> Vec<HopfCrossing> {
    let mut out = Vec::new();
    for i in 0..params.len().min(spectra.len()).saturating_sub(1) {
        let (Some((r0, w0)), Some((r1, w1))) = (
            oscillatory_growth(&spectra[i], im_tol),
            oscillatory_growth(&spectra[i + 1], im_tol),
        ) else {
            continue;
        };
        if (r0 < 0.0) != (r1 < 0.0) {
            let frac = r0 / (r0 - r1);
            out.push(HopfCrossing {
                index: i,
                param: params[i] + frac * (params[i + 1] - params[i]),
                frequency: w0 + frac * (w1 - w0),
            });
        }
    }
    out
}

/// Hopf points along a branch: the power (interpolated) and the nearest sample.
pub fn detect_hopf(curve: &BranchCurve) -> Vec<(f64, FixedPoint)> {
    let im_tol = FOLD_EIGEN_TOL_REL * curve.ctx.base.kappa_a;
    let powers = curve.powers();
    let spectra: Vec<Vec<Complex64>> = curve
        .samples
        .iter()
        .map(|s| s.point.eigenvalues.clone())
        .collect();
    hopf_crossings(&powers, &spectra, im_tol)
        .into_iter()
        .map(|c| {
            let a = &curve.samples[c.index];
            let b = &curve.samples[c.index + 1];
            let near = if (c.param - a.p_d).abs() <= (c.param - b.p_d).abs() {
                a
            } else {
                b
            };
            (c.param, near.point.clone())
        })
        .collect()
}
