use std::f64::consts::SQRT_2;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{DimerError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Complex mode amplitudes of the dimer (square roots of excitation numbers).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldState {
    pub a_l: Complex64,
    pub a_r: Complex64,
    pub m_l: Complex64,
    pub m_r: Complex64,
}

impl FieldState {
    pub const VACUUM: FieldState = FieldState {
        a_l: Complex64::new(0.0, 0.0),
        a_r: Complex64::new(0.0, 0.0),
        m_l: Complex64::new(0.0, 0.0),
        m_r: Complex64::new(0.0, 0.0),
    };

    pub fn cavity(&self, side: Side) -> Complex64 {
        match side {
            Side::Left => self.a_l,
            Side::Right => self.a_r,
        }
    }

    pub fn magnon(&self, side: Side) -> Complex64 {
        match side {
            Side::Left => self.m_l,
            Side::Right => self.m_r,
        }
    }

    pub fn n_a(&self, side: Side) -> f64 {
        self.cavity(side).norm_sqr()
    }

    pub fn n_m(&self, side: Side) -> f64 {
        self.magnon(side).norm_sqr()
    }

    /// L↔R exchange.
    pub fn parity(&self) -> FieldState {
        FieldState {
            a_l: self.a_r,
            a_r: self.a_l,
            m_l: self.m_r,
            m_r: self.m_l,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.a_l, self.a_r, self.m_l, self.m_r]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn to_quadratures(&self) -> QuadratureVector {
        let s = SQRT_2;
        QuadratureVector([
            s * self.a_l.re,
            s * self.a_l.im,
            s * self.m_l.re,
            s * self.m_l.im,
            s * self.a_r.re,
            s * self.a_r.im,
            s * self.m_r.re,
            s * self.m_r.im,
        ])
    }

    pub fn to_polar(&self) -> PolarState {
        PolarState {
            n_a: [self.a_l.norm_sqr(), self.a_r.norm_sqr()],
            n_m: [self.m_l.norm_sqr(), self.m_r.norm_sqr()],
            psi: [self.a_l.arg(), self.a_r.arg()],
            phi: [self.m_l.arg(), self.m_r.arg()],
        }
    }
}

/// Occupation/phase form, index 0 = left, 1 = right. Phases in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarState {
    pub n_a: [f64; 2],
    pub n_m: [f64; 2],
    pub psi: [f64; 2],
    pub phi: [f64; 2],
}

impl PolarState {
    pub fn to_field(&self) -> FieldState {
        let amp = |n: f64, th: f64| Complex64::from_polar(n.max(0.0).sqrt(), th);
        FieldState {
            a_l: amp(self.n_a[0], self.psi[0]),
            a_r: amp(self.n_a[1], self.psi[1]),
            m_l: amp(self.n_m[0], self.phi[0]),
            m_r: amp(self.n_m[1], self.phi[1]),
        }
    }

    pub(crate) fn require_positive(&self) -> Result<()> {
        let all = self.n_a.iter().chain(self.n_m.iter());
        if all.clone().any(|n| !n.is_finite()) {
            return Err(DimerError::NonFinite("polar state"));
        }
        if all.clone().any(|&n| n <= 0.0) {
            return Err(DimerError::Domain(
                "polar form is singular at zero amplitude; use the Cartesian equations".into(),
            ));
        }
        Ok(())
    }
}

/// Real quadratures `(X_aL, Y_aL, X_mL, Y_mL, X_aR, Y_aR, X_mR, Y_mR)` with
/// `X = √2 Re`, `Y = √2 Im`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadratureVector(pub [f64; 8]);

impl QuadratureVector {
    pub const LEN: usize = 8;

    pub fn to_field(&self) -> FieldState {
        let s = 1.0 / SQRT_2;
        let q = &self.0;
        FieldState {
            a_l: Complex64::new(s * q[0], s * q[1]),
            m_l: Complex64::new(s * q[2], s * q[3]),
            a_r: Complex64::new(s * q[4], s * q[5]),
            m_r: Complex64::new(s * q[6], s * q[7]),
        }
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &QuadratureVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn parity(&self) -> QuadratureVector {
        let q = &self.0;
        QuadratureVector([q[4], q[5], q[6], q[7], q[0], q[1], q[2], q[3]])
    }
}

impl Index<usize> for QuadratureVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for QuadratureVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}
