//! Coordinates on higher-order tangent and cotangent bundles, chart
//! prolongation and Liouville operators.

mod chart;
mod points;

pub use chart::{
    inhomogeneous_top, prolonged_jacobian_blocks, pull_back_momenta, transform_jet, transform_levels,
    transform_momenta, ChartTransition,
};
pub use points::{project_pi_prime, DualJetPoint, ExtendedJetPoint, JetCoordinates, JetPoint, PhasePoint};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::taylor::factorial;

/// Jets of order `k` of a curve at `t`: `y^(a) = (1/a!) d^a x/dt^a`, `a = 1..=k`.
pub fn prolong_curve(curve: &dyn Curve, k: usize, t: f64) -> Result<ExtendedJetPoint> {
    if k < 1 {
        return Err(Error::arg("prolongation order must be at least 1"));
    }
    let d = curve.derivatives(t, k)?;
    let levels = d
        .into_iter()
        .enumerate()
        .map(|(a, v)| {
            let s = 1.0 / factorial(a);
            v.into_iter().map(|c| c * s).collect()
        })
        .collect();
    ExtendedJetPoint::from_levels(levels)
}

/// `Γ^(k) f = sum_a a y^(a) · ∂f/∂y^(a-1)` at `pt`.
///
/// `f` takes the flat levels `[x, y1, .., y^(n-1)]` with `n <= k`; the point
/// must carry levels up to `k`.
pub fn liouville_apply(k: usize, f: &ScalarField, pt: &ExtendedJetPoint) -> Result<f64> {
    let m = pt.dim();
    let arity = f.arity();
    if k < 1 || arity == 0 || arity % m != 0 {
        return Err(Error::arg(format!(
            "field arity {arity} is not a positive multiple of the dimension {m}"
        )));
    }
    let n = arity / m;
    if n > k {
        return Err(Error::arg(format!(
            "field depends on level {} but Γ^({k}) only reaches level {}",
            n - 1,
            k - 1
        )));
    }
    if pt.order() < k {
        return Err(Error::arg(format!("point of order {} has no level {k}", pt.order())));
    }
    let z: Vec<f64> = (0..n).flat_map(|a| pt.level(a).to_vec()).collect();
    let v: Vec<f64> = (1..=n)
        .flat_map(|a| pt.level(a).iter().map(move |c| a as f64 * c))
        .collect();
    Ok(f.directional(&z, &v, 1))
}
