//! Real non-negative roots of cubic polynomials.

use crate::error::{DimerError, Result};

/// All real roots `x ≥ 0` of `c3 x³ + c2 x² + c1 x + c0`, each polished by one
/// Newton step, deduplicated at relative tolerance 1e−9 and sorted ascending.
///
/// Leading zero coefficients fall through to the quadratic and linear cases.
pub fn solve_cubic_positive_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Result<Vec<f64>> {
    let coeffs = [c3, c2, c1, c0];
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(DimerError::NonFinite("cubic coefficients"));
    }
    if coeffs.iter().all(|&c| c == 0.0) {
        return Err(DimerError::Domain("all cubic coefficients are zero".into()));
    }
    let mut roots = real_roots(c3, c2, c1, c0);
    for r in roots.iter_mut() {
        *r = newton_polish(&coeffs, *r);
    }
    roots.retain(|&r| r >= 0.0);
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last() {
            Some(&l) if (r - l).abs() <= 1e-9 * r.abs().max(l.abs()) => {}
            _ => out.push(r),
        }
    }
    Ok(out)
}

fn eval(c: &[f64; 4], x: f64) -> (f64, f64) {
    let p = ((c[0] * x + c[1]) * x + c[2]) * x + c[3];
    let dp = (3.0 * c[0] * x + 2.0 * c[1]) * x + c[2];
    (p, dp)
}

fn newton_polish(c: &[f64; 4], x: f64) -> f64 {
    let (p, dp) = eval(c, x);
    if dp != 0.0 && dp.is_finite() {
        let next = x - p / dp;
        // Keep the step only if it does not worsen the residual (double roots).
        if next.is_finite() && eval(c, next).0.abs() <= p.abs() {
            return next;
        }
    }
    x
}

fn real_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c3 == 0.0 {
        return quadratic_roots(c2, c1, c0);
    }
    if c0 == 0.0 {
        let mut r = quadratic_roots(c3, c2, c1);
        r.push(0.0);
        return r;
    }
    // Rescale x = s·y so the monic coefficients are O(1).
    let (b, c, d) = (c2 / c3, c1 / c3, c0 / c3);
    let s = [b.abs(), c.abs().sqrt(), d.abs().cbrt()]
        .into_iter()
        .fold(0.0f64, f64::max);
    let (b, c, d) = (b / s, c / (s * s), d / (s * s * s));

    // Depressed cubic y = t − b/3: t³ + p t + q = 0.
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let ys: Vec<f64> = if disc > 0.0 {
        let sq = disc.sqrt();
        // Cancellation-free form of the single real root.
        let u = (-q / 2.0 - q.signum() * sq).cbrt();
        let t = if u != 0.0 { u - p / (3.0 * u) } else { 0.0 };
        vec![t + shift]
    } else if p == 0.0 {
        vec![shift]
    } else {
        let r = (-p / 3.0).sqrt();
        let arg = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| 2.0 * r * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect()
    };
    let poly = [1.0, b, c, d];
    ys.into_iter()
        .map(|y| s * newton_polish(&poly, y))
        .collect()
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let qq = -0.5 * (b + b.signum() * sq);
    if qq == 0.0 {
        return vec![0.0];
    }
    vec![qq / a, c / qq]
}
