use nalgebra::{DMatrix, DVector};

use crate::error::{DimerError, Result};
use crate::model::{parity_matrix, Matrix8};

/// Steady-state covariance of the eight quadratures, vacuum = `I/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(pub Matrix8);

impl CovarianceMatrix {
    pub fn vacuum() -> Self {
        CovarianceMatrix(Matrix8::identity() * 0.5)
    }

    /// `‖AV + VAᵀ + D‖_F / ‖D‖_F`.
    pub fn lyapunov_residual(&self, a: &Matrix8, d: &Matrix8) -> f64 {
        let v = &self.0;
        (a * v + v * a.transpose() + d).norm() / d.norm().max(f64::MIN_POSITIVE)
    }

    /// `‖VP − PV‖_F / ‖V‖_F` for the L↔R permutation `P`.
    pub fn parity_defect(&self) -> f64 {
        let p = parity_matrix();
        (self.0 * p - p * self.0).norm() / self.0.norm()
    }
}

/// Solves `AV + VAᵀ = −D` by vectorisation: `(I⊗A + A⊗I) vec V = −vec D`.
///
/// Fails when `A` has an eigenvalue with non-negative real part.
pub fn solve_lyapunov(a: &Matrix8, d: &Matrix8) -> Result<CovarianceMatrix> {
    if a.iter().chain(d.iter()).any(|x| !x.is_finite()) {
        return Err(DimerError::NonFinite("drift or diffusion matrix"));
    }
    let max_re = a
        .complex_eigenvalues()
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(max_re < 0.0) {
        return Err(DimerError::NotHurwitz { max_re });
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let a_s = a / scale;
    let n = 8;
    let mut k = DMatrix::<f64>::zeros(n * n, n * n);
    // vec is column-major: index of V[i, j] is j * n + i.
    for j in 0..n {
        for i in 0..n {
            let row = j * n + i;
            for m in 0..n {
                k[(row, j * n + m)] += a_s[(i, m)];
                k[(row, m * n + i)] += a_s[(j, m)];
            }
        }
    }
    let rhs = DVector::from_iterator(n * n, d.iter().map(|x| -x / scale));
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| DimerError::Solver("singular Lyapunov operator".into()))?;
    let v = Matrix8::from_iterator(sol.iter().copied());
    Ok(CovarianceMatrix((v + v.transpose()) * 0.5))
}
