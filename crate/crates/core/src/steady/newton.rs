//! Damped Newton iteration on the 8-dimensional steady-state problem.

use nalgebra::SVector;

use crate::model::equations::rhs_quadratures;
use crate::model::{drift_matrix, Dimer, QuadratureVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Backtracking halvings allowed per iteration.
    pub max_halvings: usize,
    /// Convergence when `‖rhs‖ < rel_tol · Ω`.
    pub rel_tol: f64,
    /// Absolute residual floor, used when `Ω = 0`.
    pub abs_floor: f64,
    /// Iterates farther than this from the origin are abandoned.
    pub max_norm: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 200,
            max_halvings: 30,
            rel_tol: 1e-10,
            abs_floor: 1e-30,
            max_norm: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOutcome {
    pub point: QuadratureVector,
    pub residual: f64,
    pub iterations: usize,
}

pub(crate) fn residual(q: &[f64; 8], d: &Dimer) -> ([f64; 8], f64) {
    let mut f = [0.0; 8];
    rhs_quadratures(q, d, &mut f);
    let n = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    (f, n)
}

/// Returns `None` when the iteration stalls, diverges or exceeds `max_iter`.
pub fn damped_newton(
    start: &QuadratureVector,
    d: &Dimer,
    opts: &NewtonOptions,
) -> Option<NewtonOutcome> {
    let tol = (opts.rel_tol * d.omega).max(opts.abs_floor);
    let mut q = start.0;
    let (mut f, mut norm) = residual(&q, d);
    if !norm.is_finite() {
        return None;
    }
    let mut it = 0;
    while norm >= tol {
        if it >= opts.max_iter {
            return None;
        }
        it += 1;
        let jac = drift_matrix(&QuadratureVector(q).to_field(), d);
        let rhs = -SVector::<f64, 8>::from(f);
        let step = jac.lu().solve(&rhs)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let mut trial = q;
            for i in 0..8 {
                trial[i] += lambda * step[i];
            }
            let (ft, nt) = residual(&trial, d);
            if nt.is_finite() && nt <= (1.0 - 1e-4 * lambda) * norm {
                q = trial;
                f = ft;
                norm = nt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return None;
        }
        if QuadratureVector(q).norm() > opts.max_norm {
            return None;
        }
    }
    // Polish: undamped steps kept only while they reduce the residual.
    for _ in 0..2 {
        let jac = drift_matrix(&QuadratureVector(q).to_field(), d);
        let Some(step) = jac.lu().solve(&(-SVector::<f64, 8>::from(f))) else {
            break;
        };
        let mut trial = q;
        for i in 0..8 {
            trial[i] += step[i];
        }
        let (ft, nt) = residual(&trial, d);
        if nt < norm {
            q = trial;
            f = ft;
            norm = nt;
        } else {
            break;
        }
    }
    Some(NewtonOutcome {
        point: QuadratureVector(q),
        residual: norm,
        iterations: it,
    })
}
