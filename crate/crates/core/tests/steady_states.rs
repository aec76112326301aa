use magdimer::dynamics::{integrate, IntegratorOptions, Sampling};
use magdimer::model::{drift_matrix, eom_rhs, Matrix8};
use magdimer::steady::{
    cubic_relative_residuals, find_all_fixed_points, BranchClass, FixedPoint, MultistartOptions,
};
use magdimer::{Dimer, QuadratureVector, SystemParams};

fn fixed_points(p_d: f64) -> (Dimer, Vec<FixedPoint>) {
    let d = SystemParams::reference().with_power(p_d).derived().unwrap();
    let fps = find_all_fixed_points(&d, None, &MultistartOptions::default()).unwrap();
    (d, fps)
}

fn rhs_q(q: &[f64; 8], d: &Dimer) -> [f64; 8] {
    eom_rhs(&QuadratureVector(*q).to_field(), d)
        .unwrap()
        .to_quadratures()
        .0
}

fn central_difference_jacobian(q: &[f64; 8], d: &Dimer) -> Matrix8 {
    let scale = QuadratureVector(*q).norm();
    let h = 1e-5 * scale;
    let mut jac = Matrix8::zeros();
    for c in 0..8 {
        let (mut up, mut dn) = (*q, *q);
        up[c] += h;
        dn[c] -= h;
        let (fu, fd) = (rhs_q(&up, d), rhs_q(&dn, d));
        for r in 0..8 {
            jac[(r, c)] = (fu[r] - fd[r]) / (2.0 * h);
        }
    }
    jac
}

#[test]
fn every_fixed_point_solves_both_side_cubics() {
    for p in [5e-3, 16e-3, 30e-3, 45e-3, 80e-3] {
        let (d, fps) = fixed_points(p);
        assert!(!fps.is_empty());
        for fp in &fps {
            let res = cubic_relative_residuals(&fp.state, &d).unwrap();
            assert!(res[0] < 1e-9 && res[1] < 1e-9, "P = {p}: {res:?}");
            let f = eom_rhs(&fp.state, &d).unwrap().to_quadratures().norm();
            assert!(f < 1e-8 * d.omega, "P = {p}: |F| = {f:e}");
        }
    }
}

#[test]
fn drift_matrix_is_the_jacobian_at_every_fixed_point() {
    let (d, fps) = fixed_points(30e-3);
    assert_eq!(fps.len(), 9);
    for fp in &fps {
        let q = fp.state.to_quadratures().0;
        let a = drift_matrix(&fp.state, &d);
        let fd = central_difference_jacobian(&q, &d);
        let floor = 1e-9 * a.amax();
        for r in 0..8 {
            for c in 0..8 {
                let err = (a[(r, c)] - fd[(r, c)]).abs();
                assert!(
                    err <= 1e-6 * a[(r, c)].abs() + floor,
                    "{}: entry ({r},{c}) {} vs {}",
                    fp.branch_class,
                    a[(r, c)],
                    fd[(r, c)]
                );
            }
        }
    }
}

#[test]
fn asymmetric_classes_follow_the_sign_of_the_imbalance() {
    let (_, fps) = fixed_points(30e-3);
    for fp in &fps {
        match fp.branch_class {
            BranchClass::AsymHighLow => assert!(fp.imbalance_z > 1e-3),
            BranchClass::AsymLowHigh => assert!(fp.imbalance_z < -1e-3),
            c => {
                assert!(c.is_symmetric(), "{c}");
                assert!(fp.imbalance_z.abs() < 1e-9);
            }
        }
        let mirror = fp.parity();
        assert!(fps.iter().any(|g| g.branch_class == mirror.branch_class
            && g.state
                .to_quadratures()
                .distance(&mirror.state.to_quadratures())
                < 1e-6 * mirror.state.to_quadratures().norm()));
    }
}

#[test]
fn stable_points_absorb_small_perturbations() {
    let (d, fps) = fixed_points(30e-3);
    let opts = IntegratorOptions::default();
    for fp in fps.iter().filter(|f| f.is_stable()) {
        let q0 = fp.state.to_quadratures();
        let kick = QuadratureVector(std::array::from_fn(|i| {
            q0.0[i] * (1.0 + 1e-3 * if i % 2 == 0 { 1.0 } else { -1.0 })
        }));
        let (traj, _) = integrate(
            &kick.to_field(),
            &d,
            (0.0, 60.0 / d.kappa_a),
            &opts,
            &Sampling::Uniform(2),
        )
        .unwrap();
        let (_, end) = traj.last().unwrap();
        let err = end.to_quadratures().distance(&q0) / q0.norm();
        assert!(err < 1e-6, "{}: {err:e}", fp.branch_class);
    }
}

#[test]
fn linear_dimer_has_a_single_stable_state() {
    let mut params = SystemParams::reference();
    params.k = 0.0;
    let d = params.derived().unwrap();
    let fps = find_all_fixed_points(&d, None, &MultistartOptions::default()).unwrap();
    assert_eq!(fps.len(), 1);
    assert!(fps[0].is_stable());
    assert!(fps[0].is_symmetric());
}

#[test]
fn jitter_seed_does_not_change_the_solution_set() {
    let d = SystemParams::reference().derived().unwrap();
    let a = find_all_fixed_points(&d, None, &MultistartOptions::default()).unwrap();
    let b = find_all_fixed_points(
        &d,
        None,
        &MultistartOptions {
            seed: 1234,
            ..MultistartOptions::default()
        },
    )
    .unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.branch_class, y.branch_class);
        let q = x.state.to_quadratures();
        assert!(q.distance(&y.state.to_quadratures()) < 1e-8 * q.norm());
    }
}
