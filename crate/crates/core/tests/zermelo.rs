mod common;

use std::sync::Arc;

use common::{poly_curve, shared};
use ostro::curve::{AnalyticCurve, Reparametrization};
use ostro::duality::AffineHamiltonianModel;
use ostro::dynamics::{CotangentCurve, Quadrature};
use ostro::jetspace::{DualJetPoint, ExtendedJetPoint};
use ostro::scenarios::{Scenario, ScenarioParams};
use ostro::taylor::{norm_sq, Taylor};
use ostro::zermelo::*;
use proptest::prelude::*;

/// A Hamiltonian that couples every level nonlinearly.
fn coupled(k: usize, m: usize, c: f64) -> AffineHamiltonianModel {
    AffineHamiltonianModel::analytic(k, m, move |z: &[Taylor]| {
        let p = &z[k * m..];
        let mut acc = norm_sq(p) * 0.5 + z[0].sin() * c;
        for a in 1..k {
            let ya = &z[a * m..(a + 1) * m];
            acc = acc + &norm_sq(ya) * &p[0] * 0.3 + norm_sq(ya).powi(2) * (0.1 * a as f64) + &ya[0] * &z[0];
        }
        acc
    })
    .unwrap()
}

fn smoothstep() -> Arc<Reparametrization> {
    Arc::new(|u: &Taylor| u * u * (u * -2.0 + 3.0))
}

fn bump(c: f64) -> Arc<Reparametrization> {
    Arc::new(move |u: &Taylor| u + &(u * &(u * -1.0 + 1.0)) * c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_sensitivities_match_differences(
        k in 2usize..=3,
        z in prop::collection::vec(-1.0f64..1.0, 10),
        c in -1.0f64..1.0,
    ) {
        let m = 2;
        let h = coupled(k, m, c);
        let pt = ExtendedJetPoint::from_flat(k, m, &z[..(k + 1) * m]).unwrap();
        let p = [z[8], z[9]];
        let closed = zermelo_sensitivities(&h, &pt, &p).unwrap();
        let fd = reparametrization_sensitivities(&h, &pt, &p, 1e-4).unwrap();
        prop_assert_eq!(closed.len(), k);
        for (a, b) in closed.iter().zip(&fd) {
            prop_assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "{:?} vs {:?}", closed, fd);
        }
    }

    #[test]
    fn alpha_condition_is_the_second_order_sensitivity(z in prop::collection::vec(-1.0f64..1.0, 10), c in -1.0f64..1.0) {
        let h = coupled(3, 2, c);
        let pt = ExtendedJetPoint::from_flat(3, 2, &z[..8]).unwrap();
        let p = [z[8], z[9]];
        let d = DualJetPoint::new(pt.jet().clone(), p.to_vec()).unwrap();
        let fd = reparametrization_sensitivities(&h, &pt, &p, 1e-4).unwrap();
        let r2 = zermelo_residual_alpha(&h, &d, 2).unwrap();
        prop_assert!((r2 - 2.0 / 3.0 * fd[1]).abs() < 1e-6 * (1.0 + r2.abs()));
    }

    #[test]
    fn gap_is_the_integrated_defect(
        xc in prop::collection::vec(-1.0f64..1.0, 4),
        pc in prop::collection::vec(-1.0f64..1.0, 3),
        bend in -0.8f64..0.8,
    ) {
        let h = coupled(2, 1, 0.4);
        let gamma = CotangentCurve::new(shared(poly_curve(vec![xc])), shared(poly_curve(vec![pc]))).unwrap();
        let quad = Quadrature::unit(200);
        let gap = reparametrization_gap(&h, &gamma, bump(bend), &quad).unwrap();
        let defect = integrated_defect(&h, &gamma, bump(bend), &quad).unwrap();
        prop_assert!((gap - defect).abs() < 1e-7 * (1.0 + gap.abs()), "{} vs {}", gap, defect);
    }
}

#[test]
fn identity_has_no_defect() {
    let h = coupled(3, 2, 0.5);
    let pt = ExtendedJetPoint::from_flat(3, 2, &[0.1, 0.2, 0.3, -0.4, 0.5, 0.6, -0.7, 0.8]).unwrap();
    assert_eq!(
        reparametrization_defect(&h, &pt, &[1.0, -1.0], &[1.0, 0.0, 0.0]).unwrap(),
        0.0
    );
    let gamma = CotangentCurve::new(
        shared(poly_curve(vec![vec![0.0, 1.0, 0.5, 0.1], vec![1.0, 0.0, -0.2, 0.3]])),
        shared(poly_curve(vec![vec![1.0, 0.2], vec![0.0, -0.5]])),
    )
    .unwrap();
    let id: Arc<Reparametrization> = Arc::new(|u: &Taylor| u.clone());
    assert!(
        reparametrization_gap(&h, &gamma, id, &Quadrature::unit(20))
            .unwrap()
            .abs()
            < 1e-15
    );
}

#[test]
fn homogeneous_hamiltonian_is_parametrization_free() {
    // H₀ is positively homogeneous of degree one in y1, and p is orthogonal
    // to both ẋ and ẍ along the curve, so every condition holds.
    let h = AffineHamiltonianModel::analytic(2, 2, |z: &[Taylor]| {
        norm_sq(&z[2..4]).sqrt() * (norm_sq(&z[4..6]) * 0.5 + &z[0] * &z[0] + 1.0)
    })
    .unwrap();
    let x = poly_curve(vec![vec![0.0, 1.0, 0.5, 0.2], vec![0.3]]);
    let p = poly_curve(vec![vec![0.0], vec![1.0, -0.4, 0.3]]);
    let gamma = CotangentCurve::new(shared(x), shared(p)).unwrap();
    let quad = Quadrature::unit(400);
    let gap = reparametrization_gap(&h, &gamma, smoothstep(), &quad).unwrap();
    assert!(gap.abs() < 1e-7, "gap {gap}");
    let d = DualJetPoint::from_flat(2, 2, &[0.2, 0.3, 1.4, 0.0, 0.0, 0.9]).unwrap();
    assert!(zermelo_residual_primary(&h, &d).unwrap().abs() < 1e-12);
    assert_eq!(zermelo_curve_condition(&[1.4, 0.0], &[0.0, 0.9]), 0.0);

    // Degree two in y1 breaks the primary condition and the gap.
    let h2 =
        AffineHamiltonianModel::analytic(2, 2, |z: &[Taylor]| norm_sq(&z[2..4]) + norm_sq(&z[4..6]) * 0.5).unwrap();
    assert!(zermelo_residual_primary(&h2, &d).unwrap().abs() > 0.1);
    assert!(reparametrization_gap(&h2, &gamma, smoothstep(), &quad).unwrap().abs() > 1e-2);
}

#[test]
fn example1_is_not_parametrization_free() {
    // ε₀ = ε₁ = 1: x'''' = x'', with p = ε₁ ẍ along the critical curve.
    let s = Scenario::from_registry("example1", &ScenarioParams::new(1.0, 1.0, 1)).unwrap();
    let x = AnalyticCurve::new(1, |t| {
        let (sh, ch) = t.sinh_cosh();
        vec![ch + &sh * 0.5 + t * 0.2]
    });
    let p = AnalyticCurve::new(1, |t| {
        let (sh, ch) = t.sinh_cosh();
        vec![ch + &sh * 0.5]
    });
    let gamma = CotangentCurve::new(shared(x), shared(p)).unwrap();
    let gap = reparametrization_gap(&s.hamiltonian, &gamma, smoothstep(), &Quadrature::unit(400)).unwrap();
    assert!(gap.abs() > 1e-2, "gap {gap}");
    let d = DualJetPoint::from_flat(2, 1, &[0.0, 0.0, 2.0]).unwrap();
    assert!((zermelo_residual_primary(&s.hamiltonian, &d).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn argument_checks() {
    let h1 = coupled(1, 1, 0.0);
    let d1 = DualJetPoint::from_flat(1, 1, &[0.0, 1.0]).unwrap();
    assert!(zermelo_residual_primary(&h1, &d1).is_err());
    let h = coupled(3, 1, 0.0);
    let d = DualJetPoint::from_flat(3, 1, &[0.0, 1.0, 1.0, 1.0]).unwrap();
    assert!(zermelo_residual_alpha(&h, &d, 1).is_err());
    assert!(zermelo_residual_alpha(&h, &d, 3).is_err());
    assert_eq!(zermelo_conditions(&h, &d).unwrap().alpha.len(), 1);
    let gamma = CotangentCurve::new(
        shared(poly_curve(vec![vec![0.0, 1.0]])),
        shared(poly_curve(vec![vec![1.0]])),
    )
    .unwrap();
    let shift: Arc<Reparametrization> = Arc::new(|u: &Taylor| u + 0.1);
    assert!(reparametrization_gap(&coupled(2, 1, 0.0), &gamma, shift, &Quadrature::unit(10)).is_err());
}
