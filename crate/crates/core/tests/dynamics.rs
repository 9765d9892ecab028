mod common;

use common::{free_hamiltonian, max_abs_diff, poly_curve, shared};
use ostro::curve::{AnalyticCurve, Curve};
use ostro::duality::{AffineHamiltonianModel, NewtonConfig};
use ostro::dynamics::*;
use ostro::jetspace::{DualJetPoint, PhasePoint};
use ostro::scenarios::{JetIcs, Scenario, ScenarioParams};
use ostro::taylor::Taylor;
use proptest::prelude::*;

/// `x = cos t + b sin t + c t`, a solution of `x'''' + x'' = 0`.
fn oscillating(b: f64, c: f64) -> AnalyticCurve {
    AnalyticCurve::new(1, move |t| {
        let (s, co) = t.sin_cos();
        vec![co + &s * b + t * c]
    })
}

/// `ε₁ ẍ` for [`oscillating`].
fn oscillating_top_momentum(eps1: f64, b: f64) -> AnalyticCurve {
    AnalyticCurve::new(1, move |t| {
        let (s, co) = t.sin_cos();
        vec![(co + &s * b) * -eps1]
    })
}

fn example1(eps0: f64, eps1: f64, m: usize) -> Scenario {
    Scenario::from_registry("example1", &ScenarioParams::new(eps0, eps1, m)).unwrap()
}

fn sup(rows: &[Vec<f64>]) -> f64 {
    rows.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn condensed_residual_vanishes_on_a_critical_curve() {
    // ε₀ = −ε₁ gives x'''' + x'' = 0.
    let s = example1(-1.5, 1.5, 1);
    let gamma = CotangentCurve::new(
        shared(oscillating(0.5, 0.2)),
        shared(oscillating_top_momentum(1.5, 0.5)),
    )
    .unwrap();
    let ts = [0.3, 1.1, 2.0];
    for r in hamilton_residual_condensed(&s.hamiltonian, &gamma, &ts).unwrap() {
        assert!(max_abs_diff(&r.momentum, &[0.0]) < 1e-7, "{r:?}");
        assert!(max_abs_diff(&r.velocity, &[0.0]) < 1e-12, "{r:?}");
    }
    // A wrong momentum breaks the first line only.
    let off = CotangentCurve::new(
        shared(oscillating(0.5, 0.2)),
        shared(oscillating_top_momentum(1.0, 0.5)),
    )
    .unwrap();
    let r = &hamilton_residual_condensed(&s.hamiltonian, &off, &ts).unwrap()[0];
    assert!(r.momentum[0].abs() > 1e-2 && r.velocity[0].abs() > 1e-2);
}

#[test]
fn euler_lagrange_residual_separates_solutions() {
    let s = example1(-1.5, 1.5, 1);
    let ts = [0.2, 0.9];
    assert!(sup(&euler_lagrange_residual(&s.lagrangian, &oscillating(-0.3, 1.0), &ts).unwrap()) < 1e-7);
    // x = t³: x'''' + x'' = 6t.
    let cubic = poly_curve(vec![vec![0.0, 0.0, 0.0, 1.0]]);
    let r = euler_lagrange_residual(&s.lagrangian, &cubic, &ts).unwrap();
    assert!(r[1][0].abs() > 1.0);
}

#[test]
fn ostrogradski_momenta_closed_form() {
    let (e0, e1) = (0.7, 1.3);
    let s = example1(e0, e1, 2);
    let c = poly_curve(vec![vec![0.1, 1.0, -0.5, 0.25], vec![0.0, 0.3, 0.2, -0.1]]);
    let t = 0.6;
    let d = c.derivatives(t, 3).unwrap();
    let pt = ostrogradski_momenta(&s.lagrangian, &c, t).unwrap();
    let p1: Vec<f64> = d[2].iter().map(|v| e1 * v).collect();
    let p0: Vec<f64> = (0..2).map(|i| e0 * d[1][i] - e1 * d[3][i]).collect();
    assert!(max_abs_diff(pt.momentum(1), &p1) < 1e-10);
    assert!(max_abs_diff(pt.momentum(0), &p0) < 1e-7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn affine_action_equals_energy_action(
        xc in prop::collection::vec(-1.0f64..1.0, 4),
        pc in prop::collection::vec(-1.0f64..1.0, 3),
        q in -1.0f64..1.0,
    ) {
        let h = AffineHamiltonianModel::analytic(2, 1, |z: &[Taylor]| {
            &z[2] * &z[2] * 0.5 + &z[1] * &z[2] + z[0].cos()
        })
        .unwrap();
        let gamma = CotangentCurve::new(shared(poly_curve(vec![xc])), shared(poly_curve(vec![pc]))).unwrap();
        // Any choice of the lower momenta gives the same action.
        let section = FnSection(move |t: f64, d: &DualJetPoint| Ok(vec![vec![q * t + d.x()[0]]]));
        let quad = Quadrature::unit(40);
        let a = action_affine(&h, &gamma, &quad).unwrap();
        let b = action_energy(&h, &lift_curve_via_section(2, &gamma, &section), &quad).unwrap();
        let c = action_energy(&h, &lift_curve_via_section(2, &gamma, &ZeroSection), &quad).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        prop_assert!((a - c).abs() < 1e-12 * (1.0 + a.abs()));
    }
}

#[test]
fn rk4_converges_at_fourth_order() {
    let s = example1(-1.0, 2.0, 1);
    let ics = JetIcs::new(vec![0.5], vec![0.1], vec![-0.3], vec![0.2]).unwrap();
    let init = s.initial_state(&ics).unwrap();
    let exact = s.analytic_solution(&ics).unwrap().unwrap();
    let err = |dt: f64| {
        let traj = integrate(&s.hamiltonian, &init, &IntegratorConfig::rk4(0.0, 4.0, dt)).unwrap();
        traj.times()
            .iter()
            .zip(traj.states())
            .fold(0.0f64, |m, (t, st)| m.max((st.x()[0] - exact.eval(*t)[0]).abs()))
    };
    let (e1, e2) = (err(0.1), err(0.05));
    assert!(e2 < 1e-6);
    let ratio = e1 / e2;
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn adaptive_rk4_meets_its_tolerance() {
    let s = example1(-1.0, 2.0, 1);
    let ics = JetIcs::new(vec![0.5], vec![0.1], vec![-0.3], vec![0.2]).unwrap();
    let exact = s.analytic_solution(&ics).unwrap().unwrap();
    let cfg = IntegratorConfig {
        method: Method::Rk4Adaptive { tolerance: 1e-10 },
        ..IntegratorConfig::rk4(0.0, 3.0, 0.2)
    };
    let traj = integrate(&s.hamiltonian, &s.initial_state(&ics).unwrap(), &cfg).unwrap();
    let (t, last) = traj.last().unwrap();
    assert!((t - 3.0).abs() < 1e-12);
    assert!((last.x()[0] - exact.eval(3.0)[0]).abs() < 1e-7);
    assert_eq!(traj.method(), "rk4-step-doubling");
}

#[test]
fn stride_and_csv_layout() {
    let h = free_hamiltonian(2, 2);
    let init = PhasePoint::from_flat(2, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
    let traj = integrate(&h, &init, &IntegratorConfig::rk4(0.0, 1.0, 0.01).with_stride(10)).unwrap();
    assert_eq!(traj.len(), 11);
    assert_eq!(traj.csv_header(), "t,x1,x2,y1_1,y1_2,p0_1,p0_2,p1_1,p1_2");
    let csv = traj.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 12);
    assert!(lines.iter().all(|l| l.split(',').count() == 9));
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
    let last: Vec<f64> = lines[11].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((last[0] - 1.0).abs() < 1e-12);
    // Same run twice, same bytes.
    let again = integrate(&h, &init, &IntegratorConfig::rk4(0.0, 1.0, 0.01).with_stride(10)).unwrap();
    assert_eq!(again.to_csv(), csv);
}

#[test]
fn leaving_the_domain_keeps_the_partial_trajectory() {
    let h = AffineHamiltonianModel::analytic(1, 1, |z: &[Taylor]| &z[1] * &z[1] * 0.5)
        .unwrap()
        .with_excluded(|d| d.x()[0] > 1.0);
    let init = PhasePoint::from_flat(1, 1, &[0.0, 1.0]).unwrap();
    match integrate(&h, &init, &IntegratorConfig::rk4(0.0, 3.0, 0.1)) {
        Err(ostro::Error::Integration { time, partial, .. }) => {
            assert!(time > 0.8 && time < 1.0 + 1e-9, "{time}");
            assert!(partial.len() >= 9);
            assert!(partial.states().iter().all(|s| s.x()[0] <= 1.0));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn order_one_oscillator() {
    let h = AffineHamiltonianModel::analytic(1, 1, |z: &[Taylor]| (&z[1] * &z[1] + &z[0] * &z[0]) * 0.5).unwrap();
    let init = PhasePoint::from_flat(1, 1, &[1.0, 0.0]).unwrap();
    let traj = integrate(&h, &init, &IntegratorConfig::rk4(0.0, std::f64::consts::PI, 1e-3)).unwrap();
    let (_, last) = traj.last().unwrap();
    assert!((last.x()[0] + 1.0).abs() < 1e-10);
    let e0 = energy(&h, &init).unwrap();
    assert!((e0 - 0.5).abs() < 1e-15);
    assert!(traj
        .states()
        .iter()
        .all(|s| (energy(&h, s).unwrap() - e0).abs() < 1e-12));
}

#[test]
fn duality_audit_on_an_integrated_trajectory() {
    let s = example1(1.0, 0.5, 2);
    let ics = JetIcs::new(vec![0.1, -0.2], vec![0.3, 0.0], vec![0.0, 0.4], vec![-0.1, 0.1]).unwrap();
    let traj = integrate(
        &s.hamiltonian,
        &s.initial_state(&ics).unwrap(),
        &IntegratorConfig::rk4(0.0, 3.0, 0.005),
    )
    .unwrap();
    let pts: Vec<PhasePoint> = traj.states().iter().step_by(100).cloned().collect();
    let rep = verify_duality(
        &s.lagrangian,
        &s.hamiltonian,
        &pts,
        &traj,
        &NewtonConfig::default(),
        &TrajectoryStencil::default(),
    )
    .unwrap();
    assert!(rep.energy_gap < 1e-10 && rep.rhs_gap < 1e-9, "{rep:?}");
    assert!(rep.euler_lagrange < 1e-5, "{rep:?}");
    assert!(!rep.residual_times.is_empty());
}

#[test]
fn momentum_curves_follow_the_flow() {
    // Stencil derivatives of the sampled p1 agree with the stored rates.
    let h = free_hamiltonian(2, 1);
    let init = PhasePoint::from_flat(2, 1, &[0.0, 0.0, 1.0, 2.0]).unwrap();
    let traj = integrate(&h, &init, &IntegratorConfig::rk4(0.0, 1.0, 0.05)).unwrap();
    let c = traj.momentum_curve(1, 1, 3).unwrap();
    let t = 0.5;
    let d = c.derivatives(t, 1).unwrap();
    let idx = traj.times().iter().position(|s| (s - t).abs() < 1e-12).unwrap();
    assert!((d[1][0] - traj.rates()[idx].momentum(1)[0]).abs() < 1e-8);
}
