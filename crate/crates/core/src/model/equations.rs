use num_complex::Complex64;

use super::params::Dimer;
use super::state::{FieldState, PolarState};
use crate::error::{DimerError, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Semiclassical Langevin right-hand side in the rotating frame of the drive:
///
/// ```text
/// ȧ_i = −(iΔ_a + κ_a) a_i − i g m_i + i J a_ī
/// ṁ_i = −(iΔ_m + κ_m) m_i − i g a_i − 2iK |m_i|² m_i + Ω
/// ```
pub fn eom_rhs(state: &FieldState, dimer: &Dimer) -> Result<FieldState> {
    if !state.is_finite() {
        return Err(DimerError::NonFinite("field state"));
    }
    Ok(rhs_unchecked(state, dimer))
}

#[inline]
pub(crate) fn rhs_unchecked(s: &FieldState, d: &Dimer) -> FieldState {
    let cav = Complex64::new(d.kappa_a, d.delta_a);
    let mag = Complex64::new(d.kappa_m, d.delta_m);
    let drive = Complex64::new(d.omega, 0.0);
    let kerr = |m: Complex64| I * (2.0 * d.kerr * m.norm_sqr()) * m;
    FieldState {
        a_l: -cav * s.a_l - I * d.g * s.m_l + I * d.j * s.a_r,
        a_r: -cav * s.a_r - I * d.g * s.m_r + I * d.j * s.a_l,
        m_l: -mag * s.m_l - I * d.g * s.a_l - kerr(s.m_l) + drive,
        m_r: -mag * s.m_r - I * d.g * s.a_r - kerr(s.m_r) + drive,
    }
}

/// Quadrature-coordinate form of [`eom_rhs`], used by all solvers.
#[inline]
pub(crate) fn rhs_quadratures(q: &[f64; 8], d: &Dimer, out: &mut [f64; 8]) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = FieldState {
        a_l: Complex64::new(h * q[0], h * q[1]),
        m_l: Complex64::new(h * q[2], h * q[3]),
        a_r: Complex64::new(h * q[4], h * q[5]),
        m_r: Complex64::new(h * q[6], h * q[7]),
    };
    let r = rhs_unchecked(&s, d);
    let k = std::f64::consts::SQRT_2;
    *out = [
        k * r.a_l.re,
        k * r.a_l.im,
        k * r.m_l.re,
        k * r.m_l.im,
        k * r.a_r.re,
        k * r.a_r.im,
        k * r.m_r.re,
        k * r.m_r.im,
    ];
}

/// Time derivatives of occupations and phases, index 0 = left, 1 = right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarDerivative {
    pub dn_a: [f64; 2],
    pub dn_m: [f64; 2],
    pub dpsi: [f64; 2],
    pub dphi: [f64; 2],
}

/// Amplitude–phase equations obtained from [`eom_rhs`] with
/// `a_i = √n_{a_i} e^{iψ_i}`, `m_i = √n_{m_i} e^{iφ_i}`.
///
/// Occupations evolve as `ṅ = 2 Re(ā ȧ)`, so the population equations carry
/// an overall factor 2 relative to the phase equations.
pub fn amplitude_phase_rhs(state: &PolarState, dimer: &Dimer) -> Result<PolarDerivative> {
    state.require_positive()?;
    let d = dimer;
    let mut out = PolarDerivative {
        dn_a: [0.0; 2],
        dn_m: [0.0; 2],
        dpsi: [0.0; 2],
        dphi: [0.0; 2],
    };
    for i in 0..2 {
        let o = 1 - i;
        let (na, nm, nao) = (state.n_a[i], state.n_m[i], state.n_a[o]);
        let (psi, phi, psio) = (state.psi[i], state.phi[i], state.psi[o]);
        let am = (na * nm).sqrt();
        let aa = (na * nao).sqrt();
        // Kerr-shifted magnon detuning Δ'_m = Δ_m + 2K n_m.
        let delta_m_eff = d.delta_m + 2.0 * d.kerr * nm;

        out.dn_a[i] =
            2.0 * (-d.kappa_a * na - d.g * am * (psi - phi).sin() - d.j * aa * (psio - psi).sin());
        out.dn_m[i] = 2.0
            * (-d.kappa_m * nm + d.g * am * (psi - phi).sin() + d.omega * nm.sqrt() * phi.cos());
        out.dpsi[i] = -d.delta_a - d.g * (nm / na).sqrt() * (psi - phi).cos()
            + d.j * (nao / na).sqrt() * (psio - psi).cos();
        out.dphi[i] = -delta_m_eff
            - d.g * (na / nm).sqrt() * (psi - phi).cos()
            - d.omega / nm.sqrt() * phi.sin();
    }
    Ok(out)
}
