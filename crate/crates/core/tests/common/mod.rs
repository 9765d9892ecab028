#![allow(dead_code)]

use std::sync::Arc;

use ostro::curve::AnalyticCurve;
use ostro::duality::{AffineHamiltonianModel, LagrangianModel};
use ostro::field::VectorMap;
use ostro::jetspace::ChartTransition;
use ostro::taylor::{norm_sq, Taylor};

/// Polynomial curve with `coeffs[i][j]` the `t^j` coefficient of component `i`.
pub fn poly_curve(coeffs: Vec<Vec<f64>>) -> AnalyticCurve {
    let m = coeffs.len();
    AnalyticCurve::new(m, move |t| {
        coeffs
            .iter()
            .map(|c| c.iter().rev().fold(t.lift(0.0), |acc, cj| &acc * t + *cj))
            .collect()
    })
}

/// `x ↦ S2(S1(x))` with `S1 = (x1, x2 + a x1²)` and `S2 = (x1 + b x2², x2)`.
pub fn shear_chart(a: f64, b: f64) -> ChartTransition {
    let fwd = VectorMap::analytic(2, 2, move |z: &[Taylor]| {
        let y2 = &z[1] + &(&z[0] * &z[0]) * a;
        vec![&z[0] + &(&y2 * &y2) * b, y2]
    });
    let inv = VectorMap::analytic(2, 2, move |z: &[Taylor]| {
        let x1 = &z[0] - &(&z[1] * &z[1]) * b;
        let x2 = &z[1] - &(&x1 * &x1) * a;
        vec![x1, x2]
    });
    ChartTransition::new(fwd, inv).unwrap()
}

/// The quadratic diffeomorphism of the plane used in the chart checks.
pub fn quadratic_chart() -> ChartTransition {
    shear_chart(0.3, -0.2)
}

/// Strictly convex order-`k` Lagrangian with quartic growth in the top level
/// and couplings to every lower level.
pub fn convex_quartic(k: usize, m: usize, c: [f64; 3]) -> LagrangianModel {
    LagrangianModel::analytic(k, m, move |z: &[Taylor]| {
        let top = &z[k * m..];
        let lower = &z[..k * m];
        let r = norm_sq(top);
        let coupling = top
            .iter()
            .enumerate()
            .fold(z[0].lift(0.0), |acc, (i, v)| acc + v * &lower[i % lower.len()].sin());
        &r * (0.5 + c[0].abs()) + &(&r * &r) * (0.25 * c[1].abs() + 0.01) + coupling * c[2] + norm_sq(lower) * 0.1
    })
    .unwrap()
    .with_hyperregular(true)
}

/// `L = sum cosh(y^(k)_i) + ½|lower|² c`: convex with a closed-form conjugate
/// in the top level.
pub fn cosh_family(k: usize, m: usize, c: f64) -> LagrangianModel {
    LagrangianModel::analytic(k, m, move |z: &[Taylor]| {
        let top = &z[k * m..];
        let lower = &z[m..k * m];
        let s = top.iter().fold(z[0].lift(0.0), |acc, v| acc + v.cosh());
        s + norm_sq(lower) * c + &z[0] * &z[0] * 0.1
    })
    .unwrap()
    .with_hyperregular(true)
}

/// `H₀ = ½|p|²` for any order.
pub fn free_hamiltonian(k: usize, m: usize) -> AffineHamiltonianModel {
    AffineHamiltonianModel::analytic(k, m, move |z: &[Taylor]| norm_sq(&z[k * m..]) * 0.5).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| {
        if m.is_nan() || (x - y).is_nan() {
            f64::NAN
        } else {
            m.max((x - y).abs())
        }
    })
}

pub fn shared<C: ostro::curve::Curve + 'static>(c: C) -> Arc<dyn ostro::curve::Curve> {
    Arc::new(c)
}
