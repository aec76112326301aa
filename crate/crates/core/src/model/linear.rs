use nalgebra::SMatrix;

use super::params::Dimer;
use super::state::FieldState;

pub type Matrix8 = SMatrix<f64, 8, 8>;

/// Drift matrix of the fluctuations linearized about `fp`, in the fixed
/// quadrature ordering. Per side the block is
///
/// ```text
/// [ −κ_a   Δ_a    0          g        ]
/// [ −Δ_a  −κ_a   −g          0        ]
/// [  0     g     −κ_m+Δ^y    Δ''−Δ^x  ]
/// [ −g     0     −Δ''−Δ^x   −κ_m−Δ^y  ]
/// ```
///
/// with `Δ'' = Δ_m + 4K|m|²` and `Δ^x + iΔ^y = 2K m²`. Tunneling couples the
/// cavity quadratures of the two sides through `±J`.
pub fn drift_matrix(fp: &FieldState, dimer: &Dimer) -> Matrix8 {
    let d = dimer;
    let mut a = Matrix8::zeros();
    for (off, m) in [(0usize, fp.m_l), (4usize, fp.m_r)] {
        let dpp = d.delta_m + 4.0 * d.kerr * m.norm_sqr();
        let dk = 2.0 * d.kerr * m * m;
        let block = [
            [-d.kappa_a, d.delta_a, 0.0, d.g],
            [-d.delta_a, -d.kappa_a, -d.g, 0.0],
            [0.0, d.g, -d.kappa_m + dk.im, dpp - dk.re],
            [-d.g, 0.0, -dpp - dk.re, -d.kappa_m - dk.im],
        ];
        for (r, row) in block.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                a[(off + r, off + c)] = *v;
            }
        }
    }
    a[(0, 5)] = -d.j;
    a[(1, 4)] = d.j;
    a[(4, 1)] = -d.j;
    a[(5, 0)] = d.j;
    a
}

/// Diffusion matrix `diag(κ_a, κ_a, κ_m, κ_m, κ_a, κ_a, κ_m, κ_m)` (vacuum inputs).
pub fn diffusion_matrix(dimer: &Dimer) -> Matrix8 {
    let (ka, km) = (dimer.kappa_a, dimer.kappa_m);
    Matrix8::from_diagonal(&nalgebra::SVector::<f64, 8>::from([
        ka, ka, km, km, ka, ka, km, km,
    ]))
}

/// Permutation swapping the left and right 4-blocks.
pub fn parity_matrix() -> Matrix8 {
    let mut p = Matrix8::zeros();
    for i in 0..4 {
        p[(i, i + 4)] = 1.0;
        p[(i + 4, i)] = 1.0;
    }
    p
}
