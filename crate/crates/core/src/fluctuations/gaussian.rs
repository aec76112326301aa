//! Single- and two-mode Gaussian state measures in the vacuum = `I/2`
//! convention.

use nalgebra::{DMatrix, Matrix2, Matrix4};

use super::lyapunov::CovarianceMatrix;
use crate::error::{DimerError, Result};

/// Slack allowed below the uncertainty bound `ν ≥ 1/2`.
pub const PHYSICAL_TOL: f64 = 1e-10;

/// Block-diagonal `⊕ ((0, 1), (−1, 0))` for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        t[(2 * k, 2 * k + 1)] = 1.0;
        t[(2 * k + 1, 2 * k)] = -1.0;
    }
    t
}

/// Reduced covariance of two modes, `((α, β), (βᵀ, γ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCM {
    pub alpha: Matrix2<f64>,
    pub beta: Matrix2<f64>,
    pub gamma: Matrix2<f64>,
}

impl TwoModeCM {
    pub fn from_matrix(m: &Matrix4<f64>) -> Self {
        TwoModeCM {
            alpha: m.fixed_view::<2, 2>(0, 0).into_owned(),
            beta: m.fixed_view::<2, 2>(0, 2).into_owned(),
            gamma: m.fixed_view::<2, 2>(2, 2).into_owned(),
        }
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.alpha);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.beta);
        m.fixed_view_mut::<2, 2>(2, 0)
            .copy_from(&self.beta.transpose());
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.gamma);
        m
    }

    /// `det α + det γ + 2 det β`.
    pub fn seralian(&self) -> f64 {
        self.alpha.determinant() + self.gamma.determinant() + 2.0 * self.beta.determinant()
    }
}

/// Left magnon `(X_mL, Y_mL)` and right magnon `(X_mR, Y_mR)` blocks.
pub fn reduce_to_magnons(v: &CovarianceMatrix) -> TwoModeCM {
    let m = &v.0;
    TwoModeCM {
        alpha: m.fixed_view::<2, 2>(2, 2).into_owned(),
        beta: m.fixed_view::<2, 2>(2, 6).into_owned(),
        gamma: m.fixed_view::<2, 2>(6, 6).into_owned(),
    }
}

fn check_single(m: &Matrix2<f64>, what: &'static str) -> Result<f64> {
    let det = m.determinant();
    if !det.is_finite() {
        return Err(DimerError::NonFinite(what));
    }
    if det < 0.0 || m[(0, 0)] <= 0.0 {
        return Err(DimerError::Domain(format!(
            "{what}: covariance is not positive definite"
        )));
    }
    let nu = det.sqrt();
    if nu < 0.5 - PHYSICAL_TOL {
        return Err(DimerError::Domain(format!(
            "{what}: symplectic eigenvalue {nu} below 1/2"
        )));
    }
    Ok(nu)
}

/// `ν = √det` of a single-mode covariance.
pub fn single_mode_symplectic_eigenvalue(m: &Matrix2<f64>) -> Result<f64> {
    let det = m.determinant();
    if !(det >= 0.0) {
        return Err(DimerError::Domain(format!("negative determinant {det}")));
    }
    Ok(det.sqrt())
}

fn nu_pm(seralian: f64, det: f64) -> Result<(f64, f64)> {
    if !(det >= 0.0) {
        return Err(DimerError::Domain(format!("negative determinant {det}")));
    }
    let disc = seralian * seralian - 4.0 * det;
    let slack = 1e-12 * seralian * seralian;
    if disc < -slack {
        return Err(DimerError::Domain("complex symplectic spectrum".into()));
    }
    let root = disc.max(0.0).sqrt();
    let plus = ((seralian + root) / 2.0).sqrt();
    // ν₊ν₋ = √det avoids cancellation in the smaller eigenvalue.
    let minus = if plus > 0.0 { det.sqrt() / plus } else { 0.0 };
    Ok((plus, minus))
}

/// `(ν₊, ν₋)` of a two-mode covariance, from the seralian.
pub fn two_mode_symplectic_eigenvalues(tm: &TwoModeCM) -> Result<(f64, f64)> {
    nu_pm(tm.seralian(), tm.to_matrix().determinant())
}

/// Symplectic eigenvalues of a 2×2 or 4×4 covariance, descending.
pub fn symplectic_eigenvalues(cm: &DMatrix<f64>) -> Result<Vec<f64>> {
    match (cm.nrows(), cm.ncols()) {
        (2, 2) => Ok(vec![single_mode_symplectic_eigenvalue(
            &Matrix2::from_iterator(cm.iter().copied()),
        )?]),
        (4, 4) => {
            let (p, m) = two_mode_symplectic_eigenvalues(&TwoModeCM::from_matrix(
                &Matrix4::from_iterator(cm.iter().copied()),
            ))?;
            Ok(vec![p, m])
        }
        (r, c) => Err(DimerError::Domain(format!(
            "expected a 2×2 or 4×4 covariance, got {r}×{c}"
        ))),
    }
}

/// Symplectic spectrum from the eigenvalues `±iν` of `T V`, any even size.
pub fn symplectic_spectrum_direct(cm: &DMatrix<f64>) -> Vec<f64> {
    let modes = cm.nrows() / 2;
    let tv = symplectic_form(modes) * cm;
    let mut nus: Vec<f64> = tv
        .complex_eigenvalues()
        .iter()
        .filter(|e| e.im > 0.0)
        .map(|e| e.im)
        .collect();
    nus.sort_by(|a, b| b.partial_cmp(a).unwrap());
    nus
}

/// Checks positivity and the uncertainty bound of a two-mode covariance.
pub fn check_physical(tm: &TwoModeCM) -> Result<()> {
    check_single(&tm.alpha, "alpha")?;
    check_single(&tm.gamma, "gamma")?;
    if tm.to_matrix().cholesky().is_none() {
        return Err(DimerError::Domain(
            "two-mode covariance is not positive definite".into(),
        ));
    }
    // The eigenvalues of T·V stay well conditioned when ν₊ ≈ ν₋, unlike the
    // seralian closed form.
    let m = tm.to_matrix();
    let minus = symplectic_spectrum_direct(&DMatrix::from_iterator(4, 4, m.iter().copied()))
        .last()
        .copied()
        .unwrap_or(0.0);
    if minus < 0.5 - PHYSICAL_TOL {
        return Err(DimerError::Domain(format!(
            "symplectic eigenvalue {minus} below 1/2"
        )));
    }
    Ok(())
}

/// Overlap fidelity of two zero-mean single-mode Gaussian states,
/// `F = 1 / (√(δ + Λ) − √Λ)` with `δ = det(α + γ)` and
/// `Λ = 4 (det α − 1/4)(det γ − 1/4)`.
pub fn gaussian_fidelity(alpha: &Matrix2<f64>, gamma: &Matrix2<f64>) -> Result<f64> {
    check_single(alpha, "alpha")?;
    check_single(gamma, "gamma")?;
    let delta = (alpha + gamma).determinant();
    let lambda = (4.0 * (alpha.determinant() - 0.25) * (gamma.determinant() - 0.25)).max(0.0);
    // Rationalised form of 1/(√(δ+Λ) − √Λ).
    let f = ((delta + lambda).sqrt() + lambda.sqrt()) / delta;
    if !f.is_finite() || f < -1e-12 || f > 1.0 + 1e-12 {
        return Err(DimerError::Domain(format!("fidelity {f} outside [0, 1]")));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// `(x + ½) ln(x + ½) − (x − ½) ln(x − ½)`, with the `x = ½` limit.
pub fn entropy_function(x: f64) -> f64 {
    let p = x + 0.5;
    let m = x - 0.5;
    let mterm = if m > 0.0 { m * m.ln() } else { 0.0 };
    p * p.ln() - mterm
}

/// `I = f(ν_α) + f(ν_γ) − f(ν₊) − f(ν₋)`.
pub fn mutual_information(tm: &TwoModeCM) -> Result<f64> {
    check_physical(tm)?;
    let na = tm.alpha.determinant().sqrt();
    let ng = tm.gamma.determinant().sqrt();
    let (p, m) = two_mode_symplectic_eigenvalues(tm)?;
    let i = entropy_function(na) + entropy_function(ng) - entropy_function(p) - entropy_function(m);
    Ok(i.max(0.0))
}

/// Smallest symplectic eigenvalue of the partial transpose.
pub fn partial_transpose_min_eigenvalue(tm: &TwoModeCM) -> Result<f64> {
    let seralian = tm.alpha.determinant() + tm.gamma.determinant() - 2.0 * tm.beta.determinant();
    Ok(nu_pm(seralian, tm.to_matrix().determinant())?.1)
}

/// `E_N = max(0, −ln 2ν̃₋)`.
pub fn logarithmic_negativity(tm: &TwoModeCM) -> Result<f64> {
    check_physical(tm)?;
    let nu = partial_transpose_min_eigenvalue(tm)?;
    Ok((-(2.0 * nu).ln()).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vacuum() -> Matrix2<f64> {
        Matrix2::identity() * 0.5
    }

    fn tmsv(r: f64) -> TwoModeCM {
        let c = (2.0 * r).cosh() / 2.0;
        let s = (2.0 * r).sinh() / 2.0;
        TwoModeCM {
            alpha: Matrix2::identity() * c,
            beta: Matrix2::new(s, 0.0, 0.0, -s),
            gamma: Matrix2::identity() * c,
        }
    }

    #[test]
    fn vacuum_vs_squeezed() {
        let r: f64 = 1.0;
        let sq = Matrix2::new((2.0 * r).exp(), 0.0, 0.0, (-2.0 * r).exp()) * 0.5;
        let f = gaussian_fidelity(&vacuum(), &sq).unwrap();
        assert!((f - 1.0 / r.cosh()).abs() < 1e-12);
    }

    #[test]
    fn vacuum_vs_thermal() {
        for nbar in [0.3, 1.0, 4.0] {
            let th = Matrix2::identity() * (2.0 * nbar + 1.0) / 2.0;
            let f = gaussian_fidelity(&vacuum(), &th).unwrap();
            assert!((f - 1.0 / (nbar + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_of_identical_mixed_states_is_one() {
        let m = Matrix2::new(1.3, 0.4, 0.4, 0.9);
        assert!((gaussian_fidelity(&m, &m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unphysical_input_rejected() {
        let m = Matrix2::identity() * 0.3;
        assert!(gaussian_fidelity(&m, &vacuum()).is_err());
        assert!(single_mode_symplectic_eigenvalue(&Matrix2::new(1.0, 2.0, 2.0, 1.0)).is_err());
    }

    #[test]
    fn thermal_symplectic_eigenvalue() {
        let th = Matrix2::identity() * 2.5;
        assert!((single_mode_symplectic_eigenvalue(&th).unwrap() - 2.5).abs() < 1e-15);
        assert!((single_mode_symplectic_eigenvalue(&vacuum()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn product_state_has_no_correlations() {
        let tm = TwoModeCM {
            alpha: Matrix2::new(1.2, 0.3, 0.3, 0.8),
            beta: Matrix2::zeros(),
            gamma: Matrix2::identity() * 1.5,
        };
        assert!(mutual_information(&tm).unwrap().abs() < 1e-12);
        assert_eq!(logarithmic_negativity(&tm).unwrap(), 0.0);
    }

    #[test]
    fn tmsv_negativity_is_twice_squeezing() {
        for r in [0.1, 0.5, 1.0] {
            let tm = tmsv(r);
            assert!((logarithmic_negativity(&tm).unwrap() - 2.0 * r).abs() < 1e-9);
            // Direct spectrum of the partially transposed matrix.
            let mut m = DMatrix::from_iterator(4, 4, tm.to_matrix().iter().copied());
            let flip =
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0]));
            m = &flip * m * &flip;
            let nu = *symplectic_spectrum_direct(&m).last().unwrap();
            assert!((-(2.0 * nu).ln() - 2.0 * r).abs() < 1e-9);
        }
    }

    #[test]
    fn squeezed_thermal_mutual_information_matches_spectrum() {
        // Standard form α = γ = a I, β = diag(c, −c): both ν equal √(a² − c²).
        let (a, c) = (2.0, 1.2);
        let tm = TwoModeCM {
            alpha: Matrix2::identity() * a,
            beta: Matrix2::new(c, 0.0, 0.0, -c),
            gamma: Matrix2::identity() * a,
        };
        let nu = (a * a - c * c).sqrt();
        let expected = 2.0 * entropy_function(a) - 2.0 * entropy_function(nu);
        assert!((mutual_information(&tm).unwrap() - expected).abs() < 1e-12);
        let direct = symplectic_spectrum_direct(&DMatrix::from_iterator(
            4,
            4,
            tm.to_matrix().iter().copied(),
        ));
        assert!((direct[0] - nu).abs() < 1e-12 && (direct[1] - nu).abs() < 1e-12);
    }

    #[test]
    fn entropy_function_limit() {
        assert_eq!(entropy_function(0.5), 0.0);
        assert!(entropy_function(0.5 + 1e-12) >= 0.0);
    }

    #[test]
    fn symplectic_form_squares_to_minus_identity() {
        for n in [1, 2, 4] {
            let t = symplectic_form(n);
            assert_eq!(&t * &t, -DMatrix::<f64>::identity(2 * n, 2 * n));
            assert_eq!(t.transpose(), -&t);
        }
    }

    fn single_mode_symplectic(theta: f64, r: f64, phi: f64) -> Matrix2<f64> {
        let rot = |a: f64| Matrix2::new(a.cos(), -a.sin(), a.sin(), a.cos());
        rot(theta) * Matrix2::new(r.exp(), 0.0, 0.0, (-r).exp()) * rot(phi)
    }

    proptest! {
        #[test]
        fn fidelity_is_symmetric_and_bounded(
            a in 0.5f64..3.0, b in 0.5f64..3.0, r1 in -1.0f64..1.0, r2 in -1.0f64..1.0, th in 0.0f64..6.3,
        ) {
            let s1 = single_mode_symplectic(th, r1, 0.3);
            let s2 = single_mode_symplectic(-th, r2, 1.1);
            let m1 = s1 * Matrix2::identity() * a * s1.transpose();
            let m2 = s2 * Matrix2::identity() * b * s2.transpose();
            let f12 = gaussian_fidelity(&m1, &m2).unwrap();
            let f21 = gaussian_fidelity(&m2, &m1).unwrap();
            prop_assert!((f12 - f21).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&f12));
        }

        #[test]
        fn mutual_information_is_local_symplectic_invariant(
            a in 0.6f64..3.0, c in 0.0f64..0.5, th1 in 0.0f64..6.3, th2 in 0.0f64..6.3, r1 in -0.8f64..0.8, r2 in -0.8f64..0.8,
        ) {
            let c = c * (a - 0.5);
            let tm = TwoModeCM {
                alpha: Matrix2::identity() * a,
                beta: Matrix2::new(c, 0.0, 0.0, -c),
                gamma: Matrix2::identity() * a,
            };
            let s1 = single_mode_symplectic(th1, r1, 0.7);
            let s2 = single_mode_symplectic(th2, r2, -0.4);
            let moved = TwoModeCM {
                alpha: s1 * tm.alpha * s1.transpose(),
                beta: s1 * tm.beta * s2.transpose(),
                gamma: s2 * tm.gamma * s2.transpose(),
            };
            let i0 = mutual_information(&tm).unwrap();
            let i1 = mutual_information(&moved).unwrap();
            prop_assert!(i0 >= 0.0);
            prop_assert!((i0 - i1).abs() < 1e-9 * (1.0 + i0));
        }
    }
}
