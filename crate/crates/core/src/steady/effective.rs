//! Effective single-resonator parameters obtained by eliminating the
//! photon fields, on the symmetric subspace and in general.

use num_complex::Complex64;

use crate::error::{DimerError, Result};
use crate::model::{Dimer, FieldState, Side};

/// Effective detuning and loss of one magnon after adiabatic elimination of
/// its cavity on the symmetric subspace (`Δψ = 0`, equal amplitudes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricEffectiveParams {
    /// Δ_0 = Δ_m − η (Δ_a − J), rad/s.
    pub delta0: f64,
    /// κ_0 = κ_m + η κ_a, rad/s.
    pub kappa0: f64,
    /// η = g² / (κ_a² + (Δ_a − J)²).
    pub eta: f64,
}

impl SymmetricEffectiveParams {
    pub fn new(d: &Dimer) -> Self {
        let da = d.delta_a - d.j;
        let eta = d.g * d.g / (d.kappa_a * d.kappa_a + da * da);
        SymmetricEffectiveParams {
            delta0: d.delta_m - eta * da,
            kappa0: d.kappa_m + eta * d.kappa_a,
            eta,
        }
    }

    /// Coefficients `[c3, c2, c1, c0]` of
    /// `4K² n³ + 4KΔ_0 n² + (Δ_0² + κ_0²) n − Ω² = 0`.
    pub fn cubic(&self, d: &Dimer) -> [f64; 4] {
        cubic_coefficients(d.kerr, self.delta0, self.kappa0, d.omega)
    }

    /// Magnon amplitude on the symmetric subspace for occupation `n_m`.
    pub fn magnon_amplitude(&self, d: &Dimer, n_m: f64) -> Complex64 {
        Complex64::new(d.omega, 0.0) / Complex64::new(self.kappa0, self.delta0 + 2.0 * d.kerr * n_m)
    }

    /// Photon amplitude slaved to the magnon on the symmetric subspace.
    pub fn cavity_amplitude(&self, d: &Dimer, m: Complex64) -> Complex64 {
        Complex64::new(0.0, -d.g) * m / Complex64::new(d.kappa_a, d.delta_a - d.j)
    }
}

pub(crate) fn cubic_coefficients(kerr: f64, delta: f64, kappa: f64, omega: f64) -> [f64; 4] {
    [
        4.0 * kerr * kerr,
        4.0 * kerr * delta,
        delta * delta + kappa * kappa,
        -omega * omega,
    ]
}

/// Margin `Δ_0² − 3κ_0²` together with the fold condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BistabilityCriterion {
    pub margin: f64,
    pub delta0: f64,
    pub kappa0: f64,
    /// `margin > 0` and `K Δ_0 < 0`: the symmetric cubic has an S-shaped
    /// response with a finite window of three positive roots.
    pub bistable: bool,
}

pub fn bistability_criterion(d: &Dimer) -> BistabilityCriterion {
    let e = SymmetricEffectiveParams::new(d);
    let margin = e.delta0 * e.delta0 - 3.0 * e.kappa0 * e.kappa0;
    BistabilityCriterion {
        margin,
        delta0: e.delta0,
        kappa0: e.kappa0,
        bistable: margin > 0.0 && d.kerr * e.delta0 < 0.0,
    }
}

/// Effective parameters of the general (asymmetric) steady-state cubics. They
/// depend on the photon phase difference `Δψ = ψ_R − ψ_L` and the photon
/// amplitude ratio `f = |a_R| / |a_L|` of the state itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetricEffectiveParams {
    pub dpsi: f64,
    pub f: f64,
    /// Δ̃_L, Δ̃_R.
    pub delta_tilde: [f64; 2],
    /// κ_L, κ_R.
    pub kappa: [f64; 2],
    pub eta: [f64; 2],
    /// Δ̃_{m_i} = Δ_m − η_i Δ̃_i.
    pub delta_tilde_m: [f64; 2],
    /// κ̃_{m_i} = κ_m + η_i κ_i.
    pub kappa_tilde_m: [f64; 2],
}

impl AsymmetricEffectiveParams {
    pub fn from_state(state: &FieldState, d: &Dimer) -> Result<Self> {
        let (al, ar) = (state.a_l, state.a_r);
        if al.norm() == 0.0 || ar.norm() == 0.0 {
            return Err(DimerError::Domain(
                "effective parameters need non-zero photon amplitudes on both sides".into(),
            ));
        }
        let f = ar.norm() / al.norm();
        let dpsi = (ar * al.conj()).arg();
        let (c, s) = (dpsi.cos(), dpsi.sin());
        let delta_tilde = [d.delta_a - d.j * f * c, d.delta_a - d.j * c / f];
        let kappa = [d.kappa_a + d.j * f * s, d.kappa_a - d.j * s / f];
        let mut eta = [0.0; 2];
        let mut delta_tilde_m = [0.0; 2];
        let mut kappa_tilde_m = [0.0; 2];
        for i in 0..2 {
            eta[i] = d.g * d.g / (kappa[i] * kappa[i] + delta_tilde[i] * delta_tilde[i]);
            delta_tilde_m[i] = d.delta_m - eta[i] * delta_tilde[i];
            kappa_tilde_m[i] = d.kappa_m + eta[i] * kappa[i];
        }
        Ok(AsymmetricEffectiveParams {
            dpsi,
            f,
            delta_tilde,
            kappa,
            eta,
            delta_tilde_m,
            kappa_tilde_m,
        })
    }

    pub fn cubic(&self, d: &Dimer, side: Side) -> [f64; 4] {
        let i = side_index(side);
        cubic_coefficients(
            d.kerr,
            self.delta_tilde_m[i],
            self.kappa_tilde_m[i],
            d.omega,
        )
    }
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

/// Coupled cubic coefficients for both sides, evaluated self-consistently
/// at `state`.
pub fn asymmetric_cubic_coefficients(state: &FieldState, d: &Dimer) -> Result<[[f64; 4]; 2]> {
    let e = AsymmetricEffectiveParams::from_state(state, d)?;
    Ok([e.cubic(d, Side::Left), e.cubic(d, Side::Right)])
}

/// Relative residual of each side's cubic at the state's own occupations:
/// `|p(n)|` divided by the sum of the absolute values of its terms.
pub fn cubic_relative_residuals(state: &FieldState, d: &Dimer) -> Result<[f64; 2]> {
    let coeffs = asymmetric_cubic_coefficients(state, d)?;
    let mut out = [0.0; 2];
    for (i, side) in [Side::Left, Side::Right].into_iter().enumerate() {
        let n = state.n_m(side);
        let c = coeffs[i];
        let terms = [c[0] * n * n * n, c[1] * n * n, c[2] * n, c[3]];
        let sum: f64 = terms.iter().sum();
        let mag: f64 = terms.iter().map(|t| t.abs()).sum();
        out[i] = if mag > 0.0 { sum.abs() / mag } else { 0.0 };
    }
    Ok(out)
}
