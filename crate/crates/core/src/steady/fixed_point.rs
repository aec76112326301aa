use std::fmt;

use num_complex::Complex64;

use super::effective::SymmetricEffectiveParams;
use crate::error::{DimerError, Result};
use crate::model::{drift_matrix, Dimer, FieldState, Side};

/// Linear stability from the drift-matrix spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchClass {
    SymLow,
    SymMid,
    SymHigh,
    AsymLowHigh,
    AsymHighLow,
    Other,
}

impl BranchClass {
    pub fn is_symmetric(self) -> bool {
        matches!(
            self,
            BranchClass::SymLow | BranchClass::SymMid | BranchClass::SymHigh
        )
    }

    pub fn is_asymmetric(self) -> bool {
        matches!(self, BranchClass::AsymLowHigh | BranchClass::AsymHighLow)
    }

    pub fn label(self) -> &'static str {
        match self {
            BranchClass::SymLow => "SymLow",
            BranchClass::SymMid => "SymMid",
            BranchClass::SymHigh => "SymHigh",
            BranchClass::AsymLowHigh => "AsymLowHigh",
            BranchClass::AsymHighLow => "AsymHighLow",
            BranchClass::Other => "Other",
        }
    }

    pub fn parity(self) -> BranchClass {
        match self {
            BranchClass::AsymLowHigh => BranchClass::AsymHighLow,
            BranchClass::AsymHighLow => BranchClass::AsymLowHigh,
            c => c,
        }
    }
}

impl fmt::Display for BranchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Threshold below which `|Z|` and photon-field mismatch count as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-6;

/// A steady state with its drift spectrum and classification.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub state: FieldState,
    /// Drift-matrix eigenvalues sorted by decreasing real part.
    pub eigenvalues: Vec<Complex64>,
    pub stability: Stability,
    pub branch_class: BranchClass,
    /// Signed imbalance `(n_mL − n_mR)/(n_mL + n_mR)`; 0 for the vacuum.
    pub imbalance_z: f64,
    /// Set when the classification was ambiguous (near-degenerate roots).
    pub ambiguous: bool,
}

impl FixedPoint {
    /// Computes the spectrum and stability; the class is left as `Other`
    /// until [`classify`] runs with the sibling set.
    pub fn analyze(state: FieldState, d: &Dimer, eps_stab: f64) -> FixedPoint {
        let eigenvalues = spectrum(&state, d);
        let stability = stability_of(&eigenvalues, eps_stab);
        let imbalance_z = population_imbalance(&state).unwrap_or(0.0);
        FixedPoint {
            state,
            eigenvalues,
            stability,
            branch_class: BranchClass::Other,
            imbalance_z,
            ambiguous: false,
        }
    }

    pub fn max_re(&self) -> f64 {
        self.eigenvalues
            .first()
            .map(|e| e.re)
            .unwrap_or(f64::NEG_INFINITY)
    }

    pub fn is_stable(&self) -> bool {
        self.stability == Stability::Stable
    }

    pub fn n_m(&self) -> (f64, f64) {
        (self.state.n_m(Side::Left), self.state.n_m(Side::Right))
    }

    pub fn n_a(&self) -> (f64, f64) {
        (self.state.n_a(Side::Left), self.state.n_a(Side::Right))
    }

    pub fn is_symmetric(&self) -> bool {
        is_symmetric_state(&self.state)
    }

    pub fn parity(&self) -> FixedPoint {
        FixedPoint {
            state: self.state.parity(),
            eigenvalues: self.eigenvalues.clone(),
            stability: self.stability,
            branch_class: self.branch_class.parity(),
            imbalance_z: -self.imbalance_z,
            ambiguous: self.ambiguous,
        }
    }
}

/// Drift-matrix eigenvalues, sorted by decreasing real part.
pub fn spectrum(state: &FieldState, d: &Dimer) -> Vec<Complex64> {
    let a = drift_matrix(state, d);
    let mut ev: Vec<Complex64> = a.complex_eigenvalues().iter().copied().collect();
    sort_spectrum(&mut ev);
    ev
}

pub(crate) fn sort_spectrum(ev: &mut [Complex64]) {
    ev.sort_by(|x, y| {
        y.re.partial_cmp(&x.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(y.im.partial_cmp(&x.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

pub fn stability_of(eigenvalues: &[Complex64], eps_stab: f64) -> Stability {
    let max_re = eigenvalues
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re < -eps_stab {
        Stability::Stable
    } else if max_re > eps_stab {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

/// Signed magnon population imbalance `Z = (n_mL − n_mR)/(n_mL + n_mR)`.
pub fn population_imbalance(state: &FieldState) -> Result<f64> {
    let (l, r) = (state.n_m(Side::Left), state.n_m(Side::Right));
    if l + r <= 0.0 {
        return Err(DimerError::Domain(
            "imbalance undefined: both magnon modes empty".into(),
        ));
    }
    Ok((l - r) / (l + r))
}

pub(crate) fn is_symmetric_state(s: &FieldState) -> bool {
    let close = |x: Complex64, y: Complex64| (x - y).norm() <= SYMMETRY_TOL * (x.norm() + y.norm());
    let z = population_imbalance(s).unwrap_or(0.0);
    z.abs() < SYMMETRY_TOL && close(s.a_l, s.a_r) && close(s.m_l, s.m_r)
}

/// Assigns the branch class of `fp` given every fixed point coexisting with it.
///
/// Symmetric states are ranked among the coexisting symmetric roots (low,
/// middle, high). A lone symmetric root is low or high according to the side
/// of the cubic's inflection point it sits on. Asymmetric states are labelled
/// by the sign of `Z` (positive = left-heavy).
pub fn classify(fp: &FixedPoint, siblings: &[FixedPoint], d: &Dimer) -> (BranchClass, bool) {
    if !fp.is_symmetric() {
        let z = fp.imbalance_z;
        return if z > 0.0 {
            (BranchClass::AsymHighLow, false)
        } else if z < 0.0 {
            (BranchClass::AsymLowHigh, false)
        } else {
            (BranchClass::Other, true)
        };
    }
    let n = fp.state.n_m(Side::Left);
    let mut sym: Vec<f64> = siblings
        .iter()
        .filter(|s| s.is_symmetric())
        .map(|s| s.state.n_m(Side::Left))
        .collect();
    if !sym.iter().any(|&x| near(x, n)) {
        sym.push(n);
    }
    sym.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sym.dedup_by(|a, b| near(*a, *b));
    let degenerate = sym.windows(2).any(|w| (w[1] - w[0]) <= 1e-6 * w[1].abs());
    if degenerate {
        return (BranchClass::Other, true);
    }
    match sym.len() {
        1 => {
            if d.kerr == 0.0 {
                return (BranchClass::SymLow, false);
            }
            let e = SymmetricEffectiveParams::new(d);
            let inflection = -e.delta0 / (3.0 * d.kerr);
            if n <= inflection {
                (BranchClass::SymLow, false)
            } else {
                (BranchClass::SymHigh, false)
            }
        }
        3 => {
            let rank = sym.iter().position(|&x| near(x, n)).unwrap_or(1);
            let class = [
                BranchClass::SymLow,
                BranchClass::SymMid,
                BranchClass::SymHigh,
            ][rank];
            (class, false)
        }
        _ => (BranchClass::Other, true),
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
