//! Pseudo-arclength continuation of steady states in the drive power.
//!
//! The continuation parameter is the drive amplitude `Ω`, which is monotone in
//! `P_d`, so turning points in `Ω` and in `P_d` coincide. Unknowns are scaled
//! to O(1) before the arclength is measured.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};

use super::folds::{locate_folds, Fold};
use crate::error::{DimerError, Result};
use crate::model::equations::rhs_quadratures;
use crate::model::{drift_matrix, drive_amplitude, Dimer, QuadratureVector, Side, SystemParams};
use crate::steady::{classify, symmetric_steady_states, BranchClass, FixedPoint};

/// Subspace the branch is followed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// All eight quadratures.
    Full,
    /// Left = right; four unknowns. Keeps symmetric branches from switching
    /// onto asymmetric ones at pitchfork points.
    Symmetric,
}

impl Sector {
    pub fn dim(self) -> usize {
        match self {
            Sector::Full => 8,
            Sector::Symmetric => 4,
        }
    }

    fn restrict(self, q: &QuadratureVector) -> DVector<f64> {
        DVector::from_iterator(self.dim(), q.0.iter().copied().take(self.dim()))
    }

    fn embed(self, x: &[f64]) -> QuadratureVector {
        let mut q = [0.0; 8];
        match self {
            Sector::Full => q.copy_from_slice(&x[..8]),
            Sector::Symmetric => {
                q[..4].copy_from_slice(&x[..4]);
                q[4..].copy_from_slice(&x[..4]);
            }
        }
        QuadratureVector(q)
    }

    fn residual(self, x: &[f64], d: &Dimer) -> DVector<f64> {
        let q = self.embed(x);
        let mut f = [0.0; 8];
        rhs_quadratures(&q.0, d, &mut f);
        DVector::from_iterator(self.dim(), f.iter().copied().take(self.dim()))
    }

    fn jacobian(self, x: &[f64], d: &Dimer) -> DMatrix<f64> {
        let a = drift_matrix(&self.embed(x).to_field(), d);
        match self {
            Sector::Full => DMatrix::from_iterator(8, 8, a.iter().copied()),
            Sector::Symmetric => {
                let s = a.fixed_view::<4, 4>(0, 0) + a.fixed_view::<4, 4>(0, 4);
                DMatrix::from_iterator(4, 4, s.iter().copied())
            }
        }
    }

    /// `∂F/∂Ω`: the drive enters only the magnon X quadratures.
    fn drive_derivative(self) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v[2] = SQRT_2;
        if self == Sector::Full {
            v[6] = SQRT_2;
        }
        v
    }
}

/// Step-size and termination controls, in scaled arclength units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    pub max_corrector_iter: usize,
    /// Corrector convergence on `‖F‖ / Ω_scale`.
    pub tol: f64,
    /// Minimum cosine between consecutive secants; sharper turns are retried
    /// with a smaller step.
    pub min_cos: f64,
    /// Asymmetric branches stop once `|Z|` falls below this or changes sign
    /// (merged into the symmetric subspace).
    pub z_floor: f64,
    /// Stability band relative to `κ_a`.
    pub eps_stab_rel: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            h_init: 5e-3,
            h_min: 1e-9,
            h_max: 2e-2,
            max_steps: 20_000,
            max_corrector_iter: 12,
            tol: 1e-11,
            min_cos: 0.97,
            z_floor: 1e-5,
            eps_stab_rel: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchSample {
    pub p_d: f64,
    pub point: FixedPoint,
    /// `dΩ/ds` along the oriented curve (same sign as `dP_d/ds`).
    pub dp_ds: f64,
    pub(crate) y: DVector<f64>,
    pub(crate) tangent: DVector<f64>,
}

/// Why a continuation direction ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    RangeBoundary,
    MergedWithSymmetric,
    MaxSteps,
    /// Corrector failed at the minimum step; carries the last converged power.
    Truncated {
        p_d: f64,
        reason: String,
    },
}

#[derive(Debug, Clone)]
pub struct BranchCurve {
    /// Samples ordered along the curve; the first one is the far end of the
    /// initially decreasing-power direction.
    pub samples: Vec<BranchSample>,
    pub branch_class: BranchClass,
    pub fold_points: Vec<Fold>,
    /// Turning points on the symmetric subspace where an asymmetric branch
    /// meets the symmetric one.
    pub branch_points: Vec<Fold>,
    /// Tangent turns that a near-zero real eigenvalue did not corroborate.
    pub anomalies: Vec<Fold>,
    pub termination: [Termination; 2],
    pub sector: Sector,
    pub(crate) ctx: Context,
}

impl BranchCurve {
    pub fn powers(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.p_d).collect()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Context {
    pub base: Dimer,
    pub sector: Sector,
    /// `Ω = omega_unit · √P_d`.
    pub omega_unit: f64,
    pub x_scale: f64,
    pub omega_scale: f64,
    pub ctl: StepControl,
}

impl Context {
    pub fn dimer_at(&self, y: &DVector<f64>) -> Dimer {
        self.base.with_omega(y[y.len() - 1] * self.omega_scale)
    }

    pub fn power_of(&self, y: &DVector<f64>) -> f64 {
        let w = y[y.len() - 1] * self.omega_scale / self.omega_unit;
        w * w
    }

    fn unscaled_x(&self, y: &DVector<f64>) -> Vec<f64> {
        y.iter()
            .take(self.sector.dim())
            .map(|v| v * self.x_scale)
            .collect()
    }

    fn scaled_residual(&self, y: &DVector<f64>) -> DVector<f64> {
        self.sector.residual(&self.unscaled_x(y), &self.dimer_at(y)) / self.omega_scale
    }

    /// `[∂G/∂x̂ | ∂G/∂Ω̂]` with `G = F/Ω_scale`.
    fn scaled_jacobian(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.sector.dim();
        let jx = self.sector.jacobian(&self.unscaled_x(y), &self.dimer_at(y))
            * (self.x_scale / self.omega_scale);
        let mut m = DMatrix::zeros(n, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&jx);
        m.set_column(n, &self.sector.drive_derivative());
        m
    }

    /// Newton on `G(y) = 0` plus one linear constraint `c·y = target`.
    pub fn correct(
        &self,
        guess: &DVector<f64>,
        c: &DVector<f64>,
        target: f64,
    ) -> Option<(DVector<f64>, usize)> {
        let n = self.sector.dim();
        let mut y = guess.clone();
        for it in 1..=self.ctl.max_corrector_iter {
            let g = self.scaled_residual(&y);
            let mut m = DMatrix::zeros(n + 1, n + 1);
            m.view_mut((0, 0), (n, n + 1))
                .copy_from(&self.scaled_jacobian(&y));
            m.set_row(n, &c.transpose());
            let mut rhs = DVector::zeros(n + 1);
            rhs.rows_mut(0, n).copy_from(&(-&g));
            rhs[n] = target - c.dot(&y);
            let dy = m.lu().solve(&rhs)?;
            y += &dy;
            if !y.iter().all(|v| v.is_finite()) {
                return None;
            }
            if dy.norm() < 1e-12 * (1.0 + y.norm())
                && self.scaled_residual(&y).norm() < self.ctl.tol
            {
                return Some((y, it));
            }
        }
        let ok = self.scaled_residual(&y).norm() < self.ctl.tol;
        ok.then_some((y, self.ctl.max_corrector_iter))
    }

    /// Unit tangent of the solution curve at `y`, oriented along `reference`.
    pub fn tangent(&self, y: &DVector<f64>, reference: &DVector<f64>) -> Option<DVector<f64>> {
        let n = self.sector.dim();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n + 1))
            .copy_from(&self.scaled_jacobian(y));
        m.set_row(n, &reference.transpose());
        let mut rhs = DVector::zeros(n + 1);
        rhs[n] = 1.0;
        let t = m.lu().solve(&rhs)?;
        let norm = t.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return None;
        }
        let t = t / norm;
        Some(if t.dot(reference) < 0.0 { -t } else { t })
    }

    pub fn sample(&self, y: DVector<f64>, tangent: DVector<f64>) -> BranchSample {
        let d = self.dimer_at(&y);
        let state = self.sector.embed(&self.unscaled_x(&y)).to_field();
        let eps = self.ctl.eps_stab_rel * d.kappa_a;
        let mut point = FixedPoint::analyze(state, &d, eps);
        let siblings = symmetric_steady_states(&d, eps).unwrap_or_default();
        let (class, ambiguous) = classify(&point, &siblings, &d);
        point.branch_class = class;
        point.ambiguous = ambiguous;
        BranchSample {
            p_d: self.power_of(&y),
            point,
            dp_ds: tangent[tangent.len() - 1],
            y,
            tangent,
        }
    }
}

/// Follows the branch through `start` over `p_range` (W), rounding folds.
///
/// `params.p_d` is the power at which `start` is a steady state. Symmetric
/// starts are continued inside the symmetric subspace.
pub fn continue_branch(
    start: &FixedPoint,
    params: &SystemParams,
    p_range: (f64, f64),
    ctl: &StepControl,
) -> Result<BranchCurve> {
    let (p_lo, p_hi) = p_range;
    if !(p_lo >= 0.0 && p_hi > p_lo) {
        return Err(DimerError::Domain(format!(
            "invalid power range [{p_lo}, {p_hi}]"
        )));
    }
    if !(params.p_d >= p_lo && params.p_d <= p_hi) {
        return Err(DimerError::Domain(
            "start power lies outside the continuation range".into(),
        ));
    }
    let base = params.derived()?;
    let omega_unit = drive_amplitude(&params.with_power(1.0))?;
    let sector = if start.is_symmetric() {
        Sector::Symmetric
    } else {
        Sector::Full
    };
    let q0 = start.state.to_quadratures();
    let x_scale = if base.kerr != 0.0 {
        (base.kappa_a / base.kerr.abs()).sqrt()
    } else {
        q0.norm().max(1.0)
    };
    let ctx = Context {
        base,
        sector,
        omega_unit,
        x_scale,
        omega_scale: omega_unit * p_hi.sqrt(),
        ctl: *ctl,
    };

    let n = sector.dim();
    let mut y0 = DVector::zeros(n + 1);
    y0.rows_mut(0, n)
        .copy_from(&(sector.restrict(&q0) / x_scale));
    y0[n] = base.omega / ctx.omega_scale;
    let e_omega = DVector::from_fn(n + 1, |i, _| if i == n { 1.0 } else { 0.0 });
    let (y0, _) = ctx
        .correct(&y0, &e_omega, y0[n])
        .ok_or_else(|| DimerError::Solver("start point is not a steady state".into()))?;
    let t_up = ctx
        .tangent(&y0, &e_omega)
        .ok_or_else(|| DimerError::Solver("singular tangent at start point".into()))?;

    let omega_bounds = (
        omega_unit * p_lo.sqrt() / ctx.omega_scale,
        omega_unit * p_hi.sqrt() / ctx.omega_scale,
    );
    let (down, term_down) = trace(&ctx, &y0, -&t_up, omega_bounds);
    let (up, term_up) = trace(&ctx, &y0, t_up.clone(), omega_bounds);

    let mut samples: Vec<BranchSample> = down
        .into_iter()
        .rev()
        .map(|(y, t)| ctx.sample(y, -t))
        .collect();
    samples.push(ctx.sample(y0.clone(), t_up));
    samples.extend(up.into_iter().map(|(y, t)| ctx.sample(y, t)));

    let mut curve = BranchCurve {
        samples,
        branch_class: start.branch_class,
        fold_points: Vec::new(),
        branch_points: Vec::new(),
        anomalies: Vec::new(),
        termination: [term_down, term_up],
        sector,
        ctx,
    };
    let turns = locate_folds(&curve);
    curve.fold_points = turns.folds;
    curve.branch_points = turns.branch_points;
    curve.anomalies = turns.anomalies;
    Ok(curve)
}

type Point = (DVector<f64>, DVector<f64>);

fn trace(
    ctx: &Context,
    y0: &DVector<f64>,
    t0: DVector<f64>,
    bounds: (f64, f64),
) -> (Vec<Point>, Termination) {
    let ctl = &ctx.ctl;
    let n = ctx.sector.dim();
    let mut out: Vec<Point> = Vec::new();
    let mut y = y0.clone();
    let mut t = t0;
    let mut h = ctl.h_init;
    for _ in 0..ctl.max_steps {
        let pred = &y + &t * h;
        let target = t.dot(&pred);
        let accepted = ctx.correct(&pred, &t, target).and_then(|(yn, iters)| {
            let secant = &yn - &y;
            let cos = secant.dot(&t) / secant.norm().max(f64::MIN_POSITIVE);
            let tn = ctx.tangent(&yn, &t)?;
            (cos >= ctl.min_cos && tn.dot(&t) >= ctl.min_cos).then_some((yn, tn, iters))
        });
        let Some((yn, tn, iters)) = accepted else {
            if h <= ctl.h_min {
                return (
                    out,
                    Termination::Truncated {
                        p_d: ctx.power_of(&y),
                        reason: "corrector failed at minimum step".into(),
                    },
                );
            }
            h = (h * 0.5).max(ctl.h_min);
            continue;
        };

        let w = yn[n];
        if w < bounds.0 || w > bounds.1 {
            let edge = if w < bounds.0 { bounds.0 } else { bounds.1 };
            let e = DVector::from_fn(n + 1, |i, _| if i == n { 1.0 } else { 0.0 });
            // Land exactly on the range boundary.
            let frac = (edge - y[n]) / (yn[n] - y[n]);
            let guess = &y + (&yn - &y) * frac;
            if let Some((yb, _)) = ctx.correct(&guess, &e, edge) {
                if let Some(tb) = ctx.tangent(&yb, &t) {
                    out.push((yb, tb));
                }
            }
            return (out, Termination::RangeBoundary);
        }
        if ctx.sector == Sector::Full {
            let z = |v: &DVector<f64>| {
                let s = ctx.sector.embed(&ctx.unscaled_x(v)).to_field();
                let (l, r) = (s.n_m(Side::Left), s.n_m(Side::Right));
                (l - r) / (l + r)
            };
            let (z_old, z_new) = (z(&y), z(&yn));
            // The branch crosses into its own mirror image through a pitchfork.
            if z_new.abs() < ctl.z_floor || z_new.signum() != z_old.signum() {
                out.push((yn, tn));
                return (out, Termination::MergedWithSymmetric);
            }
        }
        y = yn;
        t = tn;
        out.push((y.clone(), t.clone()));
        if iters <= 3 {
            h = (h * 1.5).min(ctl.h_max);
        } else if iters > 6 {
            h = (h * 0.7).max(ctl.h_min);
        }
    }
    (out, Termination::MaxSteps)
}
