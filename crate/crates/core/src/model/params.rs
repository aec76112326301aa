use std::f64::consts::TAU;

use crate::error::{DimerError, Result};

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Photon tunneling rate, either relative to the cavity linewidth or absolute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tunneling {
    /// `J / κ_a` (dimensionless).
    RelativeToKappaA(f64),
    /// `J / 2π` in Hz.
    Absolute(f64),
}

/// Physical constants and drive settings of the dimer.
///
/// All frequencies are `ν = ω/2π` values in Hz; the drive power is in W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub nu_a: f64,
    pub nu_m: f64,
    pub nu_d: f64,
    pub kappa_a: f64,
    pub kappa_m: f64,
    pub g: f64,
    pub j: Tunneling,
    pub k: f64,
    pub p_d: f64,
}

impl SystemParams {
    /// The parameter set quoted for the four-attractor demonstration:
    /// `ω_a/2π = 10 GHz`, `κ_a/2π = κ_m/2π = 1 MHz`, `Δ_a/2π = Δ_m/2π = −11 MHz`,
    /// `K/2π = 9 nHz`, `g/2π = 7 MHz`, `J = 0.8 κ_a`, `P_d = 30 mW`.
    pub fn reference() -> Self {
        let nu_a = 10.0e9;
        let nu_d = nu_a + 11.0e6;
        SystemParams {
            nu_a,
            nu_m: nu_d - 11.0e6,
            nu_d,
            kappa_a: 1.0e6,
            kappa_m: 1.0e6,
            g: 7.0e6,
            j: Tunneling::RelativeToKappaA(0.8),
            k: 9.0e-9,
            p_d: 30.0e-3,
        }
    }

    pub fn with_power(mut self, p_d: f64) -> Self {
        self.p_d = p_d;
        self
    }

    pub fn with_tunneling(mut self, j: Tunneling) -> Self {
        self.j = j;
        self
    }

    /// Tunneling rate `J/2π` in Hz.
    pub fn j_hz(&self) -> f64 {
        match self.j {
            Tunneling::RelativeToKappaA(r) => r * self.kappa_a,
            Tunneling::Absolute(hz) => hz,
        }
    }

    /// Cavity detuning `Δ_a/2π = ν_a − ν_d` in Hz.
    pub fn delta_a_hz(&self) -> f64 {
        self.nu_a - self.nu_d
    }

    /// Magnon detuning `Δ_m/2π = ν_m − ν_d` in Hz.
    pub fn delta_m_hz(&self) -> f64 {
        self.nu_m - self.nu_d
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("nu_a", self.nu_a),
            ("nu_m", self.nu_m),
            ("nu_d", self.nu_d),
            ("kappa_a", self.kappa_a),
            ("kappa_m", self.kappa_m),
            ("g", self.g),
            ("J", self.j_hz()),
            ("K", self.k),
            ("P_d", self.p_d),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(DimerError::param(name, "must be finite"));
            }
        }
        if self.nu_d <= 0.0 {
            return Err(DimerError::param(
                "nu_d",
                "drive frequency must be positive",
            ));
        }
        if self.kappa_a <= 0.0 {
            return Err(DimerError::param("kappa_a", "must be positive"));
        }
        if self.kappa_m <= 0.0 {
            return Err(DimerError::param("kappa_m", "must be positive"));
        }
        if self.g < 0.0 {
            return Err(DimerError::param("g", "must be non-negative"));
        }
        if self.j_hz() < 0.0 {
            return Err(DimerError::param("J", "must be non-negative"));
        }
        if self.p_d < 0.0 {
            return Err(DimerError::param("P_d", "must be non-negative"));
        }
        Ok(())
    }

    /// Validates and converts to angular units.
    pub fn derived(&self) -> Result<Dimer> {
        self.validate()?;
        Ok(Dimer {
            delta_a: TAU * self.delta_a_hz(),
            delta_m: TAU * self.delta_m_hz(),
            kappa_a: TAU * self.kappa_a,
            kappa_m: TAU * self.kappa_m,
            g: TAU * self.g,
            j: TAU * self.j_hz(),
            kerr: TAU * self.k,
            omega: drive_amplitude(self)?,
        })
    }
}

/// Drive amplitude `Ω = √(2 κ_m P_d / ħ ω_d)` in s⁻¹.
pub fn drive_amplitude(params: &SystemParams) -> Result<f64> {
    if !(params.nu_d > 0.0) {
        return Err(DimerError::param(
            "nu_d",
            "drive frequency must be positive",
        ));
    }
    if !(params.p_d >= 0.0) {
        return Err(DimerError::param("P_d", "must be non-negative"));
    }
    let kappa_m = TAU * params.kappa_m;
    let omega_d = TAU * params.nu_d;
    Ok((2.0 * kappa_m * params.p_d / (HBAR * omega_d)).sqrt())
}

/// Angular-unit parameter record used by every solver. All rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimer {
    pub delta_a: f64,
    pub delta_m: f64,
    pub kappa_a: f64,
    pub kappa_m: f64,
    pub g: f64,
    pub j: f64,
    pub kerr: f64,
    /// Cached drive amplitude Ω.
    pub omega: f64,
}

impl Dimer {
    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    /// `dΩ/dP_d` at power `p_d` (Ω ∝ √P_d).
    pub fn omega_per_power(&self, p_d: f64) -> f64 {
        if p_d > 0.0 {
            0.5 * self.omega / p_d
        } else {
            f64::INFINITY
        }
    }
}
