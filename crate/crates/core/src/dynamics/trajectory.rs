use std::ops::ControlFlow;

use super::integrator::{dopri5, IntegrationStats, IntegratorOptions};
use crate::error::{DimerError, Result};
use crate::model::equations::rhs_quadratures;
use crate::model::{Dimer, FieldState, QuadratureVector};

/// A stretch of time during which one parameter set was in force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub dimer: Dimer,
    /// Drive power, W, when known.
    pub p_d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample times, s, strictly increasing.
    pub times: Vec<f64>,
    pub states: Vec<FieldState>,
    pub segments: Vec<Segment>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &FieldState)> {
        Some((*self.times.last()?, self.states.last()?))
    }

    pub(crate) fn push(&mut self, t: f64, q: &[f64; 8]) {
        if self.times.last().is_some_and(|&last| t <= last) {
            return;
        }
        self.times.push(t);
        self.states.push(QuadratureVector(*q).to_field());
    }
}

/// Where trajectory samples are taken.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// Every accepted integrator step.
    Steps,
    /// The given times, interpolated from the dense output.
    Times(Vec<f64>),
    /// `n` equally spaced points including both ends.
    Uniform(usize),
}

pub(crate) fn rhs_fn(d: Dimer) -> impl FnMut(f64, &[f64; 8], &mut [f64; 8]) {
    move |_, y, dy| rhs_quadratures(y, &d, dy)
}

/// Integrates the semiclassical equations over `t_span` (s).
pub fn integrate(
    initial: &FieldState,
    d: &Dimer,
    t_span: (f64, f64),
    opts: &IntegratorOptions,
    sampling: &Sampling,
) -> Result<(Trajectory, IntegrationStats)> {
    if !initial.is_finite() {
        return Err(DimerError::NonFinite("initial state"));
    }
    let (t0, t1) = t_span;
    if !(t1 > t0) {
        return Err(DimerError::Domain(format!("empty time span [{t0}, {t1}]")));
    }
    let times: Vec<f64> = match sampling {
        Sampling::Steps => Vec::new(),
        Sampling::Times(ts) => {
            if ts.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(DimerError::Domain(
                    "sample times must be strictly increasing".into(),
                ));
            }
            ts.clone()
        }
        Sampling::Uniform(n) => {
            let n = (*n).max(2);
            (0..n)
                .map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
                .collect()
        }
    };
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        segments: vec![Segment {
            t_start: t0,
            dimer: *d,
            p_d: None,
        }],
    };
    let q0 = initial.to_quadratures().0;
    let mut next = 0;
    while next < times.len() && times[next] < t0 {
        next += 1;
    }
    if matches!(sampling, Sampling::Steps) || times.get(next) == Some(&t0) {
        traj.push(t0, &q0);
        if !matches!(sampling, Sampling::Steps) {
            next += 1;
        }
    }
    let steps = matches!(sampling, Sampling::Steps);
    let (_, _, stats) = dopri5(rhs_fn(*d), t0, q0, t1, opts, |s| {
        if steps {
            traj.push(s.t1(), s.y1);
        } else {
            while next < times.len() && times[next] <= s.t1() {
                traj.push(times[next], &s.eval(times[next]));
                next += 1;
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok((traj, stats))
}
