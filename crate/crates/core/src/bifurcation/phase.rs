//! Two-parameter (power, tunneling) sweep of the attractor structure.

use std::fmt;

use rayon::prelude::*;

use crate::error::{DimerError, Result};
use crate::model::{drive_amplitude, SystemParams, Tunneling};
use crate::steady::{
    bistability_criterion, find_all_fixed_points, symmetric_roots, MultistartOptions,
    SymmetricEffectiveParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// One stable state, symmetric.
    OneS,
    /// Two stable states, both symmetric.
    TwoS,
    /// Two symmetric and two asymmetric stable states.
    TwoSTwoAS,
    /// Anything else: no stable state, an oscillatory instability removing
    /// an attractor, or a failed cell.
    Other,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::OneS => "1S",
            Region::TwoS => "2S",
            Region::TwoSTwoAS => "2S-2AS",
            Region::Other => "other",
        }
    }

    pub fn from_label(s: &str) -> Option<Region> {
        [Region::OneS, Region::TwoS, Region::TwoSTwoAS, Region::Other]
            .into_iter()
            .find(|r| r.label() == s)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    /// Drive power, W.
    pub p_d: f64,
    /// Tunneling as a multiple of `κ_a`.
    pub j: f64,
    pub n_stable: usize,
    pub region: Region,
    /// Some fixed point loses stability through a complex pair.
    pub hopf_flag: bool,
    /// Largest `|Z|` over stable asymmetric states, 0 when there are none.
    pub max_abs_z: f64,
    /// Number of roots of the symmetric-subspace cubic.
    pub n_sym_roots: usize,
    /// False when the multistart solve failed for this cell.
    pub valid: bool,
}

/// Cells stored row by row: all powers for `j_grid[0]`, then `j_grid[1]`, ...
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    pub p_grid: Vec<f64>,
    pub j_grid: Vec<f64>,
    pub cells: Vec<PhasePoint>,
}

/// Edges of the symmetric three-root window at one tunneling value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BistableBoundary {
    pub j: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// Region of a cell from its stable-state counts.
pub fn region_of(n_sym_stable: usize, n_asym_stable: usize) -> Region {
    match (n_sym_stable, n_asym_stable) {
        (1, 0) => Region::OneS,
        (2, 0) => Region::TwoS,
        (2, 2) => Region::TwoSTwoAS,
        _ => Region::Other,
    }
}

fn check_grid(name: &str, g: &[f64]) -> Result<()> {
    if g.is_empty() {
        return Err(DimerError::Domain(format!("{name} grid is empty")));
    }
    if g.windows(2).any(|w| !(w[1] > w[0])) || g.iter().any(|x| !x.is_finite()) {
        return Err(DimerError::Domain(format!(
            "{name} grid must be finite and strictly increasing"
        )));
    }
    Ok(())
}

/// Solves one cell.
pub fn phase_point(base: &SystemParams, p_d: f64, j: f64, opts: &MultistartOptions) -> PhasePoint {
    let params = base
        .with_power(p_d)
        .with_tunneling(Tunneling::RelativeToKappaA(j));
    let invalid = PhasePoint {
        p_d,
        j,
        n_stable: 0,
        region: Region::Other,
        hopf_flag: false,
        max_abs_z: 0.0,
        n_sym_roots: 0,
        valid: false,
    };
    let Ok(d) = params.derived() else {
        return invalid;
    };
    let (Ok(fps), Ok(roots)) = (find_all_fixed_points(&d, None, opts), symmetric_roots(&d)) else {
        return invalid;
    };
    let eps = opts.eps_stab(&d);
    let im_tol = 1e-3 * d.kappa_a;
    let stable: Vec<_> = fps.iter().filter(|f| f.is_stable()).collect();
    let n_sym = stable.iter().filter(|f| f.is_symmetric()).count();
    let n_asym = stable.len() - n_sym;
    let max_abs_z = stable
        .iter()
        .filter(|f| !f.is_symmetric())
        .map(|f| f.imbalance_z.abs())
        .fold(0.0, f64::max);
    let hopf_flag = fps.iter().any(|f| {
        f.eigenvalues
            .iter()
            .any(|e| e.re > eps && e.im.abs() > im_tol)
    });
    PhasePoint {
        p_d,
        j,
        n_stable: stable.len(),
        region: region_of(n_sym, n_asym),
        hopf_flag,
        max_abs_z,
        n_sym_roots: roots.len(),
        valid: true,
    }
}

/// Runs the multistart solver on every `(P_d, J)` cell in parallel.
pub fn sweep_phase_diagram(
    base: &SystemParams,
    p_grid: &[f64],
    j_grid: &[f64],
    opts: &MultistartOptions,
) -> Result<PhaseDiagram> {
    check_grid("power", p_grid)?;
    check_grid("tunneling", j_grid)?;
    let coords: Vec<(f64, f64)> = j_grid
        .iter()
        .flat_map(|&j| p_grid.iter().map(move |&p| (p, j)))
        .collect();
    let cells = coords
        .par_iter()
        .map(|&(p, j)| phase_point(base, p, j, opts))
        .collect();
    Ok(PhaseDiagram {
        p_grid: p_grid.to_vec(),
        j_grid: j_grid.to_vec(),
        cells,
    })
}

impl PhaseDiagram {
    pub fn row(&self, j_index: usize) -> &[PhasePoint] {
        let n = self.p_grid.len();
        &self.cells[j_index * n..(j_index + 1) * n]
    }

    pub fn cell(&self, p_index: usize, j_index: usize) -> &PhasePoint {
        &self.row(j_index)[p_index]
    }

    /// Saddle-node edges of the symmetric bistable window for each `J`,
    /// bracketed by the grid and refined by bisection on the root count.
    pub fn bistable_boundaries(&self, base: &SystemParams) -> Result<Vec<BistableBoundary>> {
        let mut out = Vec::with_capacity(self.j_grid.len());
        for (jj, &j) in self.j_grid.iter().enumerate() {
            let row = self.row(jj);
            let params = base.with_tunneling(Tunneling::RelativeToKappaA(j));
            let count = |p: f64| -> Result<usize> {
                let d = params.with_power(p).derived()?;
                Ok(symmetric_roots(&d)?.len())
            };
            let mut lower = None;
            let mut upper = None;
            for w in row.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                if !(a.valid && b.valid) {
                    continue;
                }
                if a.n_sym_roots < 3 && b.n_sym_roots >= 3 && lower.is_none() {
                    lower = Some(bisect_count(&count, a.p_d, b.p_d, true)?);
                }
                if a.n_sym_roots >= 3 && b.n_sym_roots < 3 {
                    upper = Some(bisect_count(&count, a.p_d, b.p_d, false)?);
                }
            }
            out.push(BistableBoundary { j, lower, upper });
        }
        Ok(out)
    }

    /// Power extent of the four-attractor region for each `J`, summing the
    /// grid cell widths of its cells.
    pub fn tongue_widths(&self) -> Vec<(f64, f64)> {
        let p = &self.p_grid;
        let n = p.len();
        let width = |i: usize| -> f64 {
            if n < 2 {
                return 0.0;
            }
            let lo = if i == 0 {
                p[0]
            } else {
                0.5 * (p[i - 1] + p[i])
            };
            let hi = if i + 1 == n {
                p[n - 1]
            } else {
                0.5 * (p[i] + p[i + 1])
            };
            hi - lo
        };
        self.j_grid
            .iter()
            .enumerate()
            .map(|(jj, &j)| {
                let w = self
                    .row(jj)
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.region == Region::TwoSTwoAS)
                    .map(|(i, _)| width(i))
                    .fold(0.0, |acc, w| acc + w);
                (j, w)
            })
            .collect()
    }
}

/// Bisects `[a, b]` for the power where the symmetric root count crosses 3.
/// `rising` means fewer than three roots at `a`.
fn bisect_count(
    count: &dyn Fn(f64) -> Result<usize>,
    mut a: f64,
    mut b: f64,
    rising: bool,
) -> Result<f64> {
    for _ in 0..200 {
        if b - a <= 1e-12 * b.abs() {
            break;
        }
        let m = 0.5 * (a + b);
        let three = count(m)? >= 3;
        if three == rising {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Power at which the drive amplitude equals `omega`.
pub fn power_for_omega(base: &SystemParams, omega: f64) -> Result<f64> {
    let unit = drive_amplitude(&base.with_power(1.0))?;
    Ok((omega / unit).powi(2))
}

/// Powers of the two saddle-nodes of the symmetric branch, ascending, or
/// `None` when the symmetric response is single-valued.
///
/// The folds sit at the extrema of `Ω²(n)` from the symmetric cubic,
/// `n± = (−2Δ_0 ± √(Δ_0² − 3κ_0²)) / 6K`.
pub fn symmetric_fold_powers(params: &SystemParams) -> Result<Option<(f64, f64)>> {
    let d = params.derived()?;
    let crit = bistability_criterion(&d);
    if !crit.bistable {
        return Ok(None);
    }
    let [c3, c2, c1, _] = SymmetricEffectiveParams::new(&d).cubic(&d);
    let root = crit.margin.sqrt();
    let unit = drive_amplitude(&params.with_power(1.0))?;
    let power = |n: f64| ((c3 * n + c2) * n + c1) * n / (unit * unit);
    let a = power((-2.0 * crit.delta0 + root) / (6.0 * d.kerr));
    let b = power((-2.0 * crit.delta0 - root) / (6.0 * d.kerr));
    Ok(Some((a.min(b), a.max(b))))
}
