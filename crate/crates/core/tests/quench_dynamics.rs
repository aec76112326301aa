use magdimer::bifurcation::symmetric_fold_powers;
use magdimer::dynamics::Trajectory;
use magdimer::dynamics::{
    integrate, relaxation_time, simulate_quench, IntegratorOptions, QuenchProtocol, QuenchStart,
    Sampling,
};
use magdimer::steady::{find_all_fixed_points, BranchClass, FixedPoint, MultistartOptions};
use magdimer::{FieldState, SystemParams};

fn kappa_a() -> f64 {
    SystemParams::reference().derived().unwrap().kappa_a
}

fn upper_fold() -> f64 {
    symmetric_fold_powers(&SystemParams::reference())
        .unwrap()
        .unwrap()
        .1
}

fn quench_from_low(p_final: f64) -> magdimer::dynamics::RelaxationResult {
    let pc = upper_fold();
    let proto = QuenchProtocol::new(
        0.99 * pc,
        p_final,
        QuenchStart::Branch(BranchClass::SymLow),
        kappa_a(),
    );
    let (_, r) = simulate_quench(
        &proto,
        &SystemParams::reference(),
        &MultistartOptions::default(),
    )
    .unwrap();
    r
}

#[test]
fn quench_past_the_upper_fold_jumps_to_the_high_branch() {
    let r = quench_from_low(upper_fold() * 1.01);
    assert!(r.converged);
    assert_eq!(r.final_fp.unwrap().branch_class, BranchClass::SymHigh);
    assert!(r.settle_residual < 1e-6);
}

#[test]
fn quench_inside_the_window_stays_on_the_low_branch() {
    let r = quench_from_low(upper_fold() * 0.995);
    assert!(r.converged);
    assert_eq!(r.final_fp.unwrap().branch_class, BranchClass::SymLow);
    assert!(r.tau * kappa_a() < 50.0);
}

#[test]
fn relaxation_slows_as_the_fold_is_approached() {
    let pc = upper_fold();
    let taus: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|d| {
            let r = quench_from_low(pc * (1.0 + d));
            assert!(r.converged);
            r.tau
        })
        .collect();
    assert!(taus.windows(2).all(|w| w[1] > w[0]), "{taus:?}");
    assert!(taus[3] * kappa_a() > 10.0);
}

#[test]
fn relaxation_time_is_stable_under_tighter_integration() {
    let pc = upper_fold();
    let params = SystemParams::reference();
    let run = |rtol: f64| {
        let mut proto = QuenchProtocol::new(
            0.99 * pc,
            pc * 1.001,
            QuenchStart::Branch(BranchClass::SymLow),
            kappa_a(),
        );
        proto.integrator = IntegratorOptions {
            rtol,
            ..IntegratorOptions::default()
        };
        simulate_quench(&proto, &params, &MultistartOptions::default())
            .unwrap()
            .1
            .tau
    };
    let (a, b) = (run(1e-9), run(1e-11));
    assert!((a / b - 1.0).abs() < 1e-4, "{a:e} vs {b:e}");
}

#[test]
fn mirrored_start_gives_the_mirrored_trajectory() {
    let params = SystemParams::reference().with_power(25e-3);
    let d = params.derived().unwrap();
    let fps = find_all_fixed_points(&d, None, &MultistartOptions::default()).unwrap();
    let asym = fps
        .iter()
        .find(|f| f.is_stable() && f.branch_class == BranchClass::AsymHighLow)
        .unwrap();
    let q = asym.state.to_quadratures().0;
    let start = magdimer::QuadratureVector(std::array::from_fn(|i| {
        q[i] * (1.0 + 0.05 * ((i + 1) as f64).sin())
    }))
    .to_field();
    let span = (0.0, 30.0 / d.kappa_a);
    let opts = IntegratorOptions::default();
    let samples = Sampling::Uniform(31);
    let (a, _) = integrate(&start, &d, span, &opts, &samples).unwrap();
    let (b, _) = integrate(&start.parity(), &d, span, &opts, &samples).unwrap();
    assert_eq!(a.times, b.times);
    for (x, y) in a.states.iter().zip(&b.states) {
        let (x, y) = (x.to_quadratures(), y.parity().to_quadratures());
        assert!(x.distance(&y) <= 1e-7 * x.norm());
    }
}

#[test]
fn relaxation_time_reads_the_last_ball_entry() {
    let d = SystemParams::reference().derived().unwrap();
    let near = magdimer::steady::symmetric_state(&d, 1e13);
    let target = FixedPoint::analyze(near, &d, 1e-6 * d.kappa_a);
    let far = FieldState {
        m_l: near.m_l * 2.0,
        ..near
    };
    let traj = |states: Vec<FieldState>| Trajectory {
        times: (0..states.len()).map(|i| i as f64).collect(),
        states,
        segments: Vec::new(),
    };
    let t = traj(vec![near, far, near, near]);
    assert_eq!(relaxation_time(&t, &target, 1e-6, 0.0).unwrap(), 2.0);
    assert_eq!(relaxation_time(&t, &target, 1e-6, 0.5).unwrap(), 1.5);
    assert!(relaxation_time(&traj(vec![near, far]), &target, 1e-6, 0.0).is_err());
}
