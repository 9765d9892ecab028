//! Reparametrization audit of the affine action.
//!
//! Under `t = φ(u)` the action integrand `F = k p·y^(k) − k H₀` of a curve
//! picks up a defect `D = F̃ − φ' F`, and the gap between the two actions is
//! `∫ D du`. The residual operators below are the derivatives of `D` with
//! respect to `φ', φ'', .., φ^(k)` at the identity.

use std::sync::Arc;

use crate::curve::{Curve, Reparametrization, ReparametrizedCurve};
use crate::duality::AffineHamiltonianModel;
use crate::dynamics::{action_affine, CotangentCurve, Quadrature};
use crate::error::{Error, Result};
use crate::jetspace::{prolong_curve, DualJetPoint, ExtendedJetPoint, JetPoint};
use crate::taylor::{factorial, Taylor};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn require_order(h: &AffineHamiltonianModel) -> Result<usize> {
    let k = h.order();
    if k < 2 {
        return Err(Error::arg("reparametrization conditions need order k >= 2"));
    }
    Ok(k)
}

/// `H₀ − sum_{a=1}^{k-1} a y^(a)·∂H₀/∂y^(a)`.
pub fn zermelo_residual_primary(h: &AffineHamiltonianModel, pt: &DualJetPoint) -> Result<f64> {
    let k = require_order(h)?;
    let g = h.gradient(pt)?;
    let liouville: f64 = (1..k).map(|a| a as f64 * dot(pt.jet().level(a), &g[a])).sum();
    Ok(h.value(pt)? - liouville)
}

/// `R_a = a p·y^(a) − sum_{b=1}^{a-1} b y^(b)·∂H₀/∂y^(b+k-a)`, with `y^(k)`
/// supplied by `top` when `a = k`.
fn shifted_condition(g: &[Vec<f64>], jet: &JetPoint, p: &[f64], top: &[f64], a: usize) -> f64 {
    let k = jet.order();
    let ya = if a == k { top } else { jet.level(a) };
    let shift: f64 = (1..a).map(|b| b as f64 * dot(jet.level(b), &g[b + k - a])).sum();
    a as f64 * dot(p, ya) - shift
}

/// `a p·y^(a) − Γ^(a-1)(H₀)` for `a` in `2..=k-1`.
pub fn zermelo_residual_alpha(h: &AffineHamiltonianModel, pt: &DualJetPoint, alpha: usize) -> Result<f64> {
    let k = require_order(h)?;
    if alpha < 2 || alpha + 1 > k {
        return Err(Error::arg(format!("alpha = {alpha} is outside 2..={}", k - 1)));
    }
    let g = h.gradient(pt)?;
    Ok(shifted_condition(&g, pt.jet(), pt.pk(), &[], alpha))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZermeloConditions {
    pub primary: f64,
    /// `(a, residual)` for `a = 2..k-1`; empty when `k = 2`.
    pub alpha: Vec<(usize, f64)>,
}

pub fn zermelo_conditions(h: &AffineHamiltonianModel, pt: &DualJetPoint) -> Result<ZermeloConditions> {
    let k = require_order(h)?;
    let primary = zermelo_residual_primary(h, pt)?;
    let alpha = (2..k)
        .map(|a| Ok((a, zermelo_residual_alpha(h, pt, a)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ZermeloConditions { primary, alpha })
}

/// `p·ẋ`.
pub fn zermelo_curve_condition(xdot: &[f64], p: &[f64]) -> f64 {
    dot(xdot, p)
}

/// `∂D/∂φ'` at the identity: `k [H₀ − Γ(H₀) + (k−1) p·y^(k)]`.
pub fn zermelo_sensitivity_primary(h: &AffineHamiltonianModel, pt: &DualJetPoint, top: &[f64]) -> Result<f64> {
    let k = require_order(h)?;
    if top.len() != pt.dim() {
        return Err(Error::arg("top jet level has the wrong dimension"));
    }
    let kf = k as f64;
    Ok(kf * (zermelo_residual_primary(h, pt)? + (kf - 1.0) * dot(pt.pk(), top)))
}

/// `[∂D/∂φ^(j)]_{j=1..k}` at the identity, in closed form. For `j >= 2`
/// this is `(k/j!) R_(k-j+1)`; for `k = 2` the last entry is `p·ẋ`.
pub fn zermelo_sensitivities(h: &AffineHamiltonianModel, pt: &ExtendedJetPoint, p: &[f64]) -> Result<Vec<f64>> {
    let k = require_order(h)?;
    let d = DualJetPoint::new(pt.jet().clone(), p.to_vec())?;
    let g = h.gradient(&d)?;
    let mut out = vec![zermelo_sensitivity_primary(h, &d, pt.top())?];
    for j in 2..=k {
        let r = shifted_condition(&g, pt.jet(), p, pt.top(), k - j + 1);
        out.push(k as f64 / factorial(j) * r);
    }
    Ok(out)
}

fn integrand(h: &AffineHamiltonianModel, pt: &ExtendedJetPoint, p: &[f64]) -> Result<f64> {
    let k = pt.order() as f64;
    let d = DualJetPoint::new(pt.jet().clone(), p.to_vec())?;
    Ok(k * dot(p, pt.top()) - k * h.value(&d)?)
}

/// Jets of `x ∘ φ` at `u` from the jets of `x` at `φ(u)` and
/// `phi = [φ'(u), .., φ^(k)(u)]`.
pub fn reparametrize_jet(pt: &ExtendedJetPoint, phi: &[f64]) -> Result<ExtendedJetPoint> {
    let k = pt.order();
    if phi.len() != k {
        return Err(Error::arg(format!("expected {k} derivatives of the reparametrization")));
    }
    let mut inner = vec![0.0];
    inner.extend(phi.iter().enumerate().map(|(j, v)| v / factorial(j + 1)));
    let inner = Taylor::from_coeffs(inner);
    let levels = pt.levels();
    let comps: Vec<Taylor> = (0..pt.dim())
        .map(|i| Taylor::from_coeffs(levels.iter().map(|l| l[i]).collect()).compose_shifted(&inner))
        .collect();
    ExtendedJetPoint::from_levels((0..=k).map(|j| comps.iter().map(|c| c.coeff(j)).collect()).collect())
}

/// Pointwise integrand of the reparametrization gap, `F̃(u) − φ'(u) F(φ(u))`.
pub fn reparametrization_defect(
    h: &AffineHamiltonianModel,
    pt: &ExtendedJetPoint,
    p: &[f64],
    phi: &[f64],
) -> Result<f64> {
    let moved = reparametrize_jet(pt, phi)?;
    Ok(integrand(h, &moved, p)? - phi[0] * integrand(h, pt, p)?)
}

/// `[∂D/∂φ^(j)]_{j=1..k}` at the identity by central differences of
/// [`reparametrization_defect`] with the given step.
pub fn reparametrization_sensitivities(
    h: &AffineHamiltonianModel,
    pt: &ExtendedJetPoint,
    p: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    let k = require_order(h)?;
    if !(step > 0.0) {
        return Err(Error::arg("step must be positive"));
    }
    let mut id = vec![0.0; k];
    id[0] = 1.0;
    (0..k)
        .map(|j| {
            let mut plus = id.clone();
            let mut minus = id.clone();
            plus[j] += step;
            minus[j] -= step;
            Ok(
                (reparametrization_defect(h, pt, p, &plus)? - reparametrization_defect(h, pt, p, &minus)?)
                    / (2.0 * step),
            )
        })
        .collect()
}

/// `action(γ ∘ φ) − action(γ)` over the quadrature interval, which `φ` must
/// map onto itself.
pub fn reparametrization_gap(
    h: &AffineHamiltonianModel,
    gamma: &CotangentCurve,
    phi: Arc<Reparametrization>,
    quad: &Quadrature,
) -> Result<f64> {
    let ends = [quad.a, quad.b].map(|t| phi(&Taylor::constant(t, 0)).value());
    let span = quad.b - quad.a;
    if (ends[0] - quad.a).abs() > 1e-12 * span || (ends[1] - quad.b).abs() > 1e-12 * span {
        return Err(Error::arg("reparametrization does not fix the quadrature interval"));
    }
    let x: Arc<dyn Curve> = Arc::new(ReparametrizedCurve::new(gamma.x.clone(), phi.clone()));
    let p: Arc<dyn Curve> = Arc::new(ReparametrizedCurve::new(gamma.p.clone(), phi));
    let moved = CotangentCurve::new(x, p)?;
    Ok(action_affine(h, &moved, quad)? - action_affine(h, gamma, quad)?)
}

/// `∫ D du` with the defect evaluated from the jets of `γ` and `φ`; equal
/// to [`reparametrization_gap`] up to quadrature error.
pub fn integrated_defect(
    h: &AffineHamiltonianModel,
    gamma: &CotangentCurve,
    phi: Arc<Reparametrization>,
    quad: &Quadrature,
) -> Result<f64> {
    let k = require_order(h)?;
    quad.integrate(|u| {
        let f = phi(&Taylor::variable(u, 1.0, k));
        let t = f.value();
        let derivs: Vec<f64> = (1..=k).map(|j| f.derivative(j)).collect();
        let pt = prolong_curve(gamma.x.as_ref(), k, t)?;
        reparametrization_defect(h, &pt, &gamma.momentum(t)?, &derivs)
    })
}
