//! Dormand–Prince 5(4) with Hairer's continuous extension.

use std::ops::ControlFlow;

use crate::error::{DimerError, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    /// Absolute tolerance; `None` scales `rtol` by the initial state norm.
    pub atol: Option<f64>,
    /// First trial step; `None` picks one from the derivative.
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-9,
            atol: None,
            h_init: None,
            max_steps: 50_000_000,
        }
    }
}

/// One accepted step with its interpolant.
pub struct DenseStep<'a, const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: &'a [f64; N],
    pub y1: &'a [f64; N],
    r: [[f64; N]; 4],
}

impl<const N: usize> DenseStep<'_, N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// State at `t` in `[t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = self.y0[i]
                + th * (self.r[0][i]
                    + th1 * (self.r[1][i] + th * (self.r[2][i] + th1 * self.r[3][i])));
        }
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn weighted_rms<const N: usize>(
    e: &[f64; N],
    y0: &[f64; N],
    y1: &[f64; N],
    rtol: f64,
    atol: f64,
) -> f64 {
    let s: f64 = (0..N)
        .map(|i| {
            let sc = atol + rtol * y0[i].abs().max(y1[i].abs());
            (e[i] / sc).powi(2)
        })
        .sum();
    (s / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, handing every accepted step
/// to `observer`. Returns the last time and state reached (earlier than
/// `t_end` when the observer breaks).
pub fn dopri5<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &IntegratorOptions,
    mut observer: O,
) -> Result<(f64, [f64; N], IntegrationStats)>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]),
    O: FnMut(&DenseStep<'_, N>) -> ControlFlow<()>,
{
    if !(opts.rtol > 0.0) {
        return Err(DimerError::Domain("rtol must be positive".into()));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(DimerError::NonFinite("initial state"));
    }
    let mut stats = IntegrationStats {
        accepted: 0,
        rejected: 0,
        evaluations: 0,
    };
    let span = t_end - t0;
    if span <= 0.0 {
        return Ok((t0, y0, stats));
    }
    let norm0 = (y0.iter().map(|v| v * v).sum::<f64>() / N as f64).sqrt();
    let atol = opts.atol.unwrap_or(opts.rtol * norm0.max(1e-300));
    let rtol = opts.rtol;

    let mut t = t0;
    let mut y = y0;
    let mut k1 = [0.0; N];
    f(t, &y, &mut k1);
    stats.evaluations += 1;

    let mut h = match opts.h_init {
        Some(h) => h,
        None => {
            let d0 = weighted_rms(&y, &y, &y, rtol, atol);
            let d1 = weighted_rms(&k1, &y, &y, rtol, atol);
            let h0 = if d0 < 1e-5 || d1 < 1e-5 {
                1e-6 * span
            } else {
                0.01 * d0 / d1
            };
            h0.min(span)
        }
    };
    let h_floor = 1e-14 * t0.abs().max(t_end.abs()).max(span);
    let mut facold: f64 = 1e-4;
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        ([0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N], [0.0; N]);
    let mut tmp = [0.0; N];
    let mut y1 = [0.0; N];
    let mut last_reject = false;

    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(DimerError::Integration {
                t,
                reason: "step budget exhausted".into(),
            });
        }
        if h < h_floor {
            return Err(DimerError::Integration {
                t,
                reason: format!("step size underflow (h = {h:e})"),
            });
        }
        let h_eff = h.min(t_end - t);

        for i in 0..N {
            tmp[i] = y[i] + h_eff * A21 * k1[i];
        }
        f(t + C2 * h_eff, &tmp, &mut k2);
        for i in 0..N {
            tmp[i] = y[i] + h_eff * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h_eff, &tmp, &mut k3);
        for i in 0..N {
            tmp[i] = y[i] + h_eff * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h_eff, &tmp, &mut k4);
        for i in 0..N {
            tmp[i] = y[i] + h_eff * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h_eff, &tmp, &mut k5);
        for i in 0..N {
            tmp[i] = y[i]
                + h_eff * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h_eff, &tmp, &mut k6);
        for i in 0..N {
            y1[i] = y[i]
                + h_eff * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t + h_eff, &y1, &mut k7);
        stats.evaluations += 6;

        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = h_eff
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        if y1.iter().any(|v| !v.is_finite()) {
            stats.rejected += 1;
            h = 0.1 * h_eff;
            last_reject = true;
            continue;
        }
        let e = weighted_rms(&err, &y, &y1, rtol, atol);

        // PI step control (β = 0.04).
        let fac11 = e.powf(0.17);
        let fac = (fac11 / facold.powf(0.04) / 0.9).clamp(0.1, 5.0);
        if e <= 1.0 {
            facold = e.max(1e-4);
            let mut r = [[0.0; N]; 4];
            for i in 0..N {
                let ydiff = y1[i] - y[i];
                let bspl = h_eff * k1[i] - ydiff;
                r[0][i] = ydiff;
                r[1][i] = bspl;
                r[2][i] = ydiff - h_eff * k7[i] - bspl;
                r[3][i] = h_eff
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = DenseStep {
                t0: t,
                h: h_eff,
                y0: &y,
                y1: &y1,
                r,
            };
            let flow = observer(&step);
            stats.accepted += 1;
            t = if h_eff == t_end - t { t_end } else { t + h_eff };
            y = y1;
            k1 = k7;
            let mut h_new = h_eff / fac;
            if last_reject {
                h_new = h_new.min(h_eff);
            }
            last_reject = false;
            h = h_new;
            if flow.is_break() {
                break;
            }
        } else {
            stats.rejected += 1;
            h = h_eff / (fac11 / 0.9).min(5.0);
            last_reject = true;
        }
    }
    Ok((t, y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let opts = IntegratorOptions {
            rtol: 1e-10,
            atol: Some(1e-14),
            ..Default::default()
        };
        let (t, y, _) = dopri5(
            |_, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = -2.0 * y[0],
            0.0,
            [1.0],
            3.0,
            &opts,
            |_| ControlFlow::Continue(()),
        )
        .unwrap();
        assert_eq!(t, 3.0);
        assert!((y[0] - (-6.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn dense_output_tracks_harmonic_oscillator() {
        let opts = IntegratorOptions {
            rtol: 1e-10,
            atol: Some(1e-12),
            ..Default::default()
        };
        let mut worst: f64 = 0.0;
        dopri5(
            |_, y: &[f64; 2], dy: &mut [f64; 2]| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            [1.0, 0.0],
            10.0,
            &opts,
            |s| {
                for k in 1..4 {
                    let t = s.t0 + s.h * k as f64 / 4.0;
                    let y = s.eval(t);
                    worst = worst
                        .max((y[0] - t.cos()).abs())
                        .max((y[1] + t.sin()).abs());
                }
                ControlFlow::Continue(())
            },
        )
        .unwrap();
        assert!(worst < 1e-8, "dense error {worst}");
    }

    #[test]
    fn observer_can_stop_early() {
        let (t, _, stats) = dopri5(
            |_, _: &[f64; 1], dy: &mut [f64; 1]| dy[0] = 1.0,
            0.0,
            [0.0],
            100.0,
            &IntegratorOptions::default(),
            |s| {
                if s.t1() > 1.0 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        )
        .unwrap();
        assert!(t < 100.0 && t > 1.0);
        assert!(stats.accepted >= 1);
    }

    #[test]
    fn finite_time_blowup_reports_underflow() {
        let r = dopri5(
            |_, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = y[0] * y[0],
            0.0,
            [1.0],
            2.0,
            &IntegratorOptions::default(),
            |_| ControlFlow::Continue(()),
        );
        assert!(matches!(r, Err(DimerError::Integration { .. })));
    }

    #[test]
    fn rejects_nonfinite_start() {
        let r = dopri5(
            |_, _: &[f64; 1], dy: &mut [f64; 1]| dy[0] = 0.0,
            0.0,
            [f64::NAN],
            1.0,
            &IntegratorOptions::default(),
            |_| ControlFlow::Continue(()),
        );
        assert!(r.is_err());
    }
}
