use std::ops::ControlFlow;

use super::integrator::{dopri5, DenseStep, IntegratorOptions};
use super::trajectory::{rhs_fn, Segment, Trajectory};
use crate::error::{DimerError, Result};
use crate::model::equations::rhs_quadratures;
use crate::model::{FieldState, QuadratureVector, SystemParams};
use crate::steady::{find_all_fixed_points, BranchClass, FixedPoint, MultistartOptions};

/// Pre-quench initial condition.
#[derive(Debug, Clone, PartialEq)]
pub enum QuenchStart {
    /// The stable fixed point of this class at `P_init`.
    Branch(BranchClass),
    /// An arbitrary state, relaxed for `t_settle` at `P_init`.
    State(FieldState),
}

/// Instantaneous drive-power step. Times are in seconds; the quench happens
/// at `t = 0` and settling runs over `[−t_settle, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchProtocol {
    pub p_init: f64,
    pub p_final: f64,
    pub start: QuenchStart,
    pub t_settle: f64,
    pub t_max: f64,
    /// Relative radius of the convergence ball around the target.
    pub eps_rel: f64,
    /// Time the state must stay inside the ball before the run stops.
    pub dwell: f64,
    /// Spacing of recorded samples.
    pub record_dt: f64,
    /// Required `‖rhs‖ / Ω` at the quench instant.
    pub settle_tol: f64,
    pub integrator: IntegratorOptions,
}

impl QuenchProtocol {
    /// Defaults expressed in units of `1/κ_a` (angular `κ_a`, rad/s).
    pub fn new(p_init: f64, p_final: f64, start: QuenchStart, kappa_a: f64) -> Self {
        QuenchProtocol {
            p_init,
            p_final,
            start,
            t_settle: 200.0 / kappa_a,
            t_max: 1e5 / kappa_a,
            eps_rel: 1e-4,
            dwell: 10.0 / kappa_a,
            record_dt: 0.05 / kappa_a,
            settle_tol: 1e-6,
            integrator: IntegratorOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        let pos = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(DimerError::param(name, "must be positive"))
            }
        };
        pos("P_init", self.p_init)?;
        pos("P_final", self.p_final)?;
        pos("t_max", self.t_max)?;
        pos("eps_rel", self.eps_rel)?;
        pos("dwell", self.dwell)?;
        pos("record_dt", self.record_dt)?;
        pos("settle_tol", self.settle_tol)?;
        if !(self.t_settle >= 0.0) {
            return Err(DimerError::param("t_settle", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationResult {
    /// Time from the quench until the state enters, for good, the ball around
    /// `final_fp`. Lower bound `t_max` when not converged.
    pub tau: f64,
    pub final_fp: Option<FixedPoint>,
    pub converged: bool,
    /// `‖rhs‖ / Ω` at the quench instant.
    pub settle_residual: f64,
}

fn inside(q: &[f64; 8], target: &QuadratureVector, eps_rel: f64) -> bool {
    QuadratureVector(*q).distance(target) <= eps_rel * target.norm()
}

/// Records dense samples on a fixed grid.
struct Recorder {
    dt: f64,
    next: f64,
}

impl Recorder {
    fn take(&mut self, traj: &mut Trajectory, s: &DenseStep<'_, 8>) {
        while self.next <= s.t1() {
            traj.push(self.next, &s.eval(self.next));
            self.next += self.dt;
        }
    }
}

/// Settles at `P_init`, steps the drive to `P_final` and integrates until the
/// state has stayed within `eps_rel` of a stable post-quench fixed point for
/// the dwell window.
pub fn simulate_quench(
    protocol: &QuenchProtocol,
    params_base: &SystemParams,
    solver: &MultistartOptions,
) -> Result<(Trajectory, RelaxationResult)> {
    protocol.validate()?;
    let d_init = params_base.with_power(protocol.p_init).derived()?;
    let d_final = params_base.with_power(protocol.p_final).derived()?;

    let initial = match &protocol.start {
        QuenchStart::State(s) => *s,
        QuenchStart::Branch(class) => {
            let fps = find_all_fixed_points(&d_init, None, solver)?;
            fps.into_iter()
                .find(|f| f.is_stable() && f.branch_class == *class)
                .ok_or_else(|| {
                    DimerError::Solver(format!(
                        "no stable {class} state at P_init = {} W",
                        protocol.p_init
                    ))
                })?
                .state
        }
    };
    let targets: Vec<FixedPoint> = find_all_fixed_points(&d_final, None, solver)?
        .into_iter()
        .filter(|f| f.is_stable())
        .collect();
    let target_q: Vec<QuadratureVector> =
        targets.iter().map(|f| f.state.to_quadratures()).collect();

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        segments: vec![
            Segment {
                t_start: -protocol.t_settle,
                dimer: d_init,
                p_d: Some(protocol.p_init),
            },
            Segment {
                t_start: 0.0,
                dimer: d_final,
                p_d: Some(protocol.p_final),
            },
        ],
    };

    let q_init = initial.to_quadratures().0;
    let mut rec = Recorder {
        dt: protocol.record_dt,
        next: -protocol.t_settle,
    };
    let mut q_quench = q_init;
    if protocol.t_settle > 0.0 {
        let (_, q, _) = dopri5(
            rhs_fn(d_init),
            -protocol.t_settle,
            q_init,
            0.0,
            &protocol.integrator,
            |s| {
                rec.take(&mut traj, s);
                ControlFlow::Continue(())
            },
        )?;
        q_quench = q;
    }
    let mut f = [0.0; 8];
    rhs_quadratures(&q_quench, &d_init, &mut f);
    let settle_residual = QuadratureVector(f).norm() / d_init.omega.max(f64::MIN_POSITIVE);
    if !(settle_residual <= protocol.settle_tol) {
        return Err(DimerError::Solver(format!(
            "pre-quench state not settled: residual {settle_residual:e} exceeds {:e}",
            protocol.settle_tol
        )));
    }
    if traj.times.last() != Some(&0.0) {
        traj.push(0.0, &q_quench);
    }
    rec.next = rec.next.max(protocol.record_dt);

    // Index of the target currently containing the state and the entry time.
    let mut current: Option<(usize, f64)> = target_q
        .iter()
        .position(|t| inside(&q_quench, t, protocol.eps_rel))
        .map(|i| (i, 0.0));
    let mut done = false;
    let opts = IntegratorOptions {
        atol: protocol.integrator.atol.or_else(|| {
            let scale = target_q
                .iter()
                .map(|t| t.norm())
                .fold(QuadratureVector(q_quench).norm(), f64::max);
            Some(protocol.integrator.rtol * scale / 8f64.sqrt())
        }),
        ..protocol.integrator
    };
    let (t_end, q_end, _) = dopri5(rhs_fn(d_final), 0.0, q_quench, protocol.t_max, &opts, |s| {
        rec.take(&mut traj, s);
        let hit = target_q
            .iter()
            .position(|t| inside(s.y1, t, protocol.eps_rel));
        match (current, hit) {
            (Some((i, _)), Some(j)) if i == j => {}
            (_, Some(j)) => {
                // Locate the entry inside this step by bisection on the interpolant.
                let (mut lo, mut hi) = (s.t0, s.t1());
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    if inside(&s.eval(mid), &target_q[j], protocol.eps_rel) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                current = Some((j, hi));
            }
            (_, None) => current = None,
        }
        if let Some((_, t_in)) = current {
            if s.t1() - t_in >= protocol.dwell {
                done = true;
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    traj.push(t_end, &q_end);

    let result = match (done, current) {
        (true, Some((i, t_in))) => RelaxationResult {
            tau: t_in,
            final_fp: Some(targets[i].clone()),
            converged: true,
            settle_residual,
        },
        _ => RelaxationResult {
            tau: protocol.t_max,
            final_fp: None,
            converged: false,
            settle_residual,
        },
    };
    Ok((traj, result))
}

/// First time at or after `t_from` from which every recorded sample lies
/// within `eps_rel` of `target`.
pub fn relaxation_time(
    traj: &Trajectory,
    target: &FixedPoint,
    eps_rel: f64,
    t_from: f64,
) -> Result<f64> {
    let tq = target.state.to_quadratures();
    let mut entry: Option<f64> = None;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        if *t < t_from {
            continue;
        }
        if inside(&s.to_quadratures().0, &tq, eps_rel) {
            entry.get_or_insert(*t);
        } else {
            entry = None;
        }
    }
    entry
        .map(|t| t - t_from)
        .ok_or_else(|| DimerError::Solver("trajectory does not end inside the target ball".into()))
}
