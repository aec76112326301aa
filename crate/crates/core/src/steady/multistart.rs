use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cubic::solve_cubic_positive_roots;
use super::effective::SymmetricEffectiveParams;
use super::fixed_point::{classify, BranchClass, FixedPoint};
use super::newton::{damped_newton, NewtonOptions};
use crate::error::{DimerError, Result};
use crate::model::{Dimer, FieldState, QuadratureVector, Side};

#[derive(Debug, Clone, PartialEq)]
pub struct MultistartOptions {
    /// Occupation lattice points per side.
    pub lattice: usize,
    /// Relative phase offsets between the two magnon seeds.
    pub phase_offsets: usize,
    /// Seed ceiling as a multiple of the largest symmetric root.
    pub n_max_factor: f64,
    /// Relative random perturbation applied to every lattice seed.
    pub jitter: f64,
    pub seed: u64,
    /// Stability band `ε_stab = eps_stab_rel · κ_a`.
    pub eps_stab_rel: f64,
    /// Deduplication distance relative to the amplitude scale.
    pub dedup_rel: f64,
    pub newton: NewtonOptions,
}

impl Default for MultistartOptions {
    fn default() -> Self {
        MultistartOptions {
            lattice: 9,
            phase_offsets: 4,
            n_max_factor: 4.0,
            jitter: 1e-3,
            seed: 0,
            eps_stab_rel: 1e-6,
            dedup_rel: 1e-6,
            newton: NewtonOptions::default(),
        }
    }
}

impl MultistartOptions {
    pub fn eps_stab(&self, d: &Dimer) -> f64 {
        self.eps_stab_rel * d.kappa_a
    }
}

/// Occupations `n_m` solving the symmetric-subspace cubic, ascending.
pub fn symmetric_roots(d: &Dimer) -> Result<Vec<f64>> {
    if d.omega == 0.0 {
        return Ok(vec![0.0]);
    }
    let e = SymmetricEffectiveParams::new(d);
    let [c3, c2, c1, c0] = e.cubic(d);
    solve_cubic_positive_roots(c3, c2, c1, c0)
}

/// Rebuilds the full symmetric field state from a root `n_m` of the cubic.
pub fn symmetric_state(d: &Dimer, n_m: f64) -> FieldState {
    let e = SymmetricEffectiveParams::new(d);
    let m = e.magnon_amplitude(d, n_m);
    let a = e.cavity_amplitude(d, m);
    FieldState {
        a_l: a,
        a_r: a,
        m_l: m,
        m_r: m,
    }
}

/// Steady states on the symmetric subspace, with stability from the full
/// 8×8 drift matrix.
pub fn symmetric_steady_states(d: &Dimer, eps_stab: f64) -> Result<Vec<FixedPoint>> {
    let roots = symmetric_roots(d)?;
    let mut fps: Vec<FixedPoint> = roots
        .iter()
        .map(|&n| FixedPoint::analyze(symmetric_state(d, n), d, eps_stab))
        .collect();
    classify_all(&mut fps, d);
    Ok(fps)
}

fn classify_all(fps: &mut [FixedPoint], d: &Dimer) {
    let snapshot = fps.to_vec();
    for fp in fps.iter_mut() {
        let (class, ambiguous) = classify(fp, &snapshot, d);
        fp.branch_class = class;
        fp.ambiguous = ambiguous;
    }
}

fn magnon_phase(e: &SymmetricEffectiveParams, d: &Dimer, n: f64) -> f64 {
    -(e.delta0 + 2.0 * d.kerr * n).atan2(e.kappa0)
}

fn seed_state(
    d: &Dimer,
    e: &SymmetricEffectiveParams,
    n_l: f64,
    n_r: f64,
    offset: f64,
) -> QuadratureVector {
    let m_l = Complex64::from_polar(n_l.sqrt(), magnon_phase(e, d, n_l) + 0.5 * offset);
    let m_r = Complex64::from_polar(n_r.sqrt(), magnon_phase(e, d, n_r) - 0.5 * offset);
    let slave = |m: Complex64| Complex64::new(0.0, -d.g) * m / Complex64::new(d.kappa_a, d.delta_a);
    FieldState {
        a_l: slave(m_l),
        a_r: slave(m_r),
        m_l,
        m_r,
    }
    .to_quadratures()
}

/// Default multistart seed set: an occupation lattice over `[0, n_max]` per
/// side times relative phase offsets, plus each symmetric root and
/// antisymmetric perturbations of it.
pub fn default_seeds(d: &Dimer, opts: &MultistartOptions) -> Result<Vec<QuadratureVector>> {
    let roots = symmetric_roots(d)?;
    let n_top = roots.iter().copied().fold(0.0, f64::max);
    let n_max = opts.n_max_factor * n_top;
    let e = SymmetricEffectiveParams::new(d);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut seeds = Vec::new();

    for &n in &roots {
        let base = symmetric_state(d, n);
        seeds.push(base.to_quadratures());
        for eps in [0.05, 0.2] {
            let s = FieldState {
                a_l: base.a_l * (1.0 + eps),
                a_r: base.a_r * (1.0 - eps),
                m_l: base.m_l * (1.0 + eps),
                m_r: base.m_r * (1.0 - eps),
            };
            seeds.push(s.to_quadratures());
            seeds.push(s.parity().to_quadratures());
        }
    }

    let lattice = opts.lattice.max(2);
    let occupations: Vec<f64> = (0..lattice)
        .map(|i| n_max * i as f64 / (lattice - 1) as f64)
        .collect();
    for &n_l in &occupations {
        for &n_r in &occupations {
            for k in 0..opts.phase_offsets.max(1) {
                let offset = TAU * k as f64 / opts.phase_offsets.max(1) as f64;
                let mut q = seed_state(d, &e, n_l, n_r, offset);
                if opts.jitter > 0.0 {
                    for x in q.0.iter_mut() {
                        *x *= 1.0 + opts.jitter * rng.gen_range(-1.0..1.0);
                    }
                }
                seeds.push(q);
            }
        }
    }
    Ok(seeds)
}

/// Every distinct steady state reachable from the seed set by damped Newton,
/// analysed and classified. The result is closed under L↔R exchange and is
/// sorted by class, then by left occupation.
pub fn find_all_fixed_points(
    d: &Dimer,
    seeds: Option<&[QuadratureVector]>,
    opts: &MultistartOptions,
) -> Result<Vec<FixedPoint>> {
    let seeds: Vec<QuadratureVector> = match seeds {
        Some(s) => {
            let mut all = s.to_vec();
            for n in symmetric_roots(d)? {
                all.push(symmetric_state(d, n).to_quadratures());
            }
            all
        }
        None => default_seeds(d, opts)?,
    };
    let roots = symmetric_roots(d)?;
    let n_top = roots.iter().copied().fold(0.0, f64::max);
    let scale = (2.0 * n_top).sqrt().max(1.0);
    let mut newton = opts.newton;
    if !newton.max_norm.is_finite() {
        newton.max_norm = 1e3 * scale;
    }

    let solved: Vec<Option<QuadratureVector>> = seeds
        .par_iter()
        .map(|s| damped_newton(s, d, &newton).map(|o| o.point))
        .collect();

    let tol = opts.dedup_rel * scale;
    let mut unique: Vec<QuadratureVector> = Vec::new();
    for q in solved.into_iter().flatten() {
        if !unique.iter().any(|u| u.distance(&q) < tol) {
            unique.push(q);
        }
    }
    // Exchange symmetry of the equations makes the mirror image an exact root.
    let mirrors: Vec<QuadratureVector> = unique
        .iter()
        .map(|q| q.parity())
        .filter(|p| !unique.iter().any(|u| u.distance(p) < tol))
        .collect();
    for p in mirrors {
        if !unique.iter().any(|u| u.distance(&p) < tol) {
            unique.push(p);
        }
    }
    if unique.is_empty() {
        return Err(DimerError::Solver(
            "multistart Newton found no fixed point".into(),
        ));
    }

    let eps = opts.eps_stab(d);
    let mut fps: Vec<FixedPoint> = unique
        .iter()
        .map(|q| FixedPoint::analyze(q.to_field(), d, eps))
        .collect();
    classify_all(&mut fps, d);
    fps.sort_by(|a, b| {
        a.branch_class
            .cmp(&b.branch_class)
            .then(
                a.state
                    .n_m(Side::Left)
                    .partial_cmp(&b.state.n_m(Side::Left))
                    .unwrap(),
            )
            .then(
                a.state
                    .n_m(Side::Right)
                    .partial_cmp(&b.state.n_m(Side::Right))
                    .unwrap(),
            )
    });
    Ok(fps)
}

/// Stable subset with the given class.
pub fn stable_of_class(fps: &[FixedPoint], class: BranchClass) -> Option<&FixedPoint> {
    fps.iter()
        .find(|f| f.is_stable() && f.branch_class == class)
}
