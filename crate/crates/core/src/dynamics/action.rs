use std::sync::Arc;

use super::flow::energy;
use crate::curve::{Curve, SampledCurve};
use crate::duality::AffineHamiltonianModel;
use crate::error::{Error, Result};
use crate::jetspace::{prolong_curve, DualJetPoint, ExtendedJetPoint, JetPoint, PhasePoint};

/// Composite Simpson rule on `[a, b]` with an even number of intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub a: f64,
    pub b: f64,
    pub intervals: usize,
}

impl Quadrature {
    pub fn new(a: f64, b: f64, intervals: usize) -> Result<Self> {
        if intervals == 0 || intervals % 2 != 0 {
            return Err(Error::arg("simpson quadrature needs a positive even interval count"));
        }
        if !(b > a) {
            return Err(Error::arg("quadrature interval is empty"));
        }
        Ok(Quadrature { a, b, intervals })
    }

    /// `[0, 1]` with `intervals` subintervals.
    pub fn unit(intervals: usize) -> Self {
        Quadrature::new(0.0, 1.0, intervals).expect("valid unit quadrature")
    }

    pub fn integrate(&self, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        let n = self.intervals;
        let h = (self.b - self.a) / n as f64;
        let mut acc = f(self.a)? + f(self.b)?;
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(self.a + i as f64 * h)?;
        }
        Ok(acc * h / 3.0)
    }
}

/// A curve on `T*M`: base curve `x(t)` and covector curve `p(t)`.
#[derive(Clone)]
pub struct CotangentCurve {
    pub x: Arc<dyn Curve>,
    pub p: Arc<dyn Curve>,
}

impl CotangentCurve {
    pub fn new(x: Arc<dyn Curve>, p: Arc<dyn Curve>) -> Result<Self> {
        if x.dim() != p.dim() {
            return Err(Error::arg("base and covector curves have different dimensions"));
        }
        Ok(CotangentCurve { x, p })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn momentum(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.p.derivatives(t, 0)?.swap_remove(0))
    }
}

/// Jets of the curve through level `k-1` as a point of `T^(k-1)M`.
pub fn jet_of_curve(x: &dyn Curve, k: usize, t: f64) -> Result<JetPoint> {
    if k == 1 {
        let d = x.derivatives(t, 0)?;
        return JetPoint::base(d[0].clone());
    }
    let e = prolong_curve(x, k - 1, t)?;
    let (jet, top) = e.into_parts();
    let mut levels: Vec<Vec<f64>> = jet.levels().iter().map(|l| l.to_vec()).collect();
    levels.push(top);
    JetPoint::from_levels(levels)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integrand of the affine action at `t`: `p·(1/(k-1)!) x^(k) − k H₀`.
pub fn affine_integrand(h: &AffineHamiltonianModel, gamma: &CotangentCurve, t: f64) -> Result<f64> {
    let k = h.order();
    let e: ExtendedJetPoint = prolong_curve(gamma.x.as_ref(), k, t)?;
    let p = gamma.momentum(t)?;
    let pk = dot(&p, e.top()) * k as f64;
    let d = DualJetPoint::new(e.jet().clone(), p)?;
    Ok(pk - k as f64 * h.value(&d)?)
}

/// `∫ p·(1/(k-1)!) d^k x/dt^k − k H₀(x, .., p) dt`.
pub fn action_affine(h: &AffineHamiltonianModel, gamma: &CotangentCurve, quad: &Quadrature) -> Result<f64> {
    quad.integrate(|t| affine_integrand(h, gamma, t))
}

/// A curve of phase points with the time derivative of its jet levels.
pub trait PhaseCurve {
    fn state(&self, t: f64) -> Result<PhasePoint>;

    /// `d/dt` of the levels `x, y1, .., y^(k-1)`.
    fn level_rates(&self, t: f64) -> Result<Vec<Vec<f64>>>;
}

/// `∫ sum_a p_(a)·d/dt(level a) − E(Γ(t)) dt`.
pub fn action_energy(h: &AffineHamiltonianModel, gamma: &dyn PhaseCurve, quad: &Quadrature) -> Result<f64> {
    quad.integrate(|t| {
        let s = gamma.state(t)?;
        let rates = gamma.level_rates(t)?;
        let pairing: f64 = rates.iter().enumerate().map(|(a, r)| dot(s.momentum(a), r)).sum();
        Ok(pairing - energy(h, &s)?)
    })
}

/// Assigns the lower momenta `p_(0..k-2)` over a point of `T^(k*)M`.
pub trait MomentumSection {
    fn lower_momenta(&self, t: f64, pt: &DualJetPoint) -> Result<Vec<Vec<f64>>>;
}

pub struct ZeroSection;

impl MomentumSection for ZeroSection {
    fn lower_momenta(&self, _t: f64, pt: &DualJetPoint) -> Result<Vec<Vec<f64>>> {
        Ok(vec![vec![0.0; pt.dim()]; pt.order() - 1])
    }
}

/// A section given by a closure.
pub struct FnSection<F>(pub F);

impl<F> MomentumSection for FnSection<F>
where
    F: Fn(f64, &DualJetPoint) -> Result<Vec<Vec<f64>>>,
{
    fn lower_momenta(&self, t: f64, pt: &DualJetPoint) -> Result<Vec<Vec<f64>>> {
        (self.0)(t, pt)
    }
}

/// Lower momenta read off sampled curves, e.g. the `p_(a)` of an integrated
/// trajectory.
pub struct SampledSection {
    pub levels: Vec<SampledCurve>,
}

impl MomentumSection for SampledSection {
    fn lower_momenta(&self, t: f64, _pt: &DualJetPoint) -> Result<Vec<Vec<f64>>> {
        self.levels
            .iter()
            .map(|c| Ok(c.derivatives(t, 0)?.swap_remove(0)))
            .collect()
    }
}

/// `Γ = s ∘ (prolonged γ)`.
pub struct SectionLift<'a, S: MomentumSection> {
    pub order: usize,
    pub gamma: &'a CotangentCurve,
    pub section: &'a S,
}

impl<S: MomentumSection> SectionLift<'_, S> {
    pub fn dual_point(&self, t: f64) -> Result<DualJetPoint> {
        let jet = jet_of_curve(self.gamma.x.as_ref(), self.order, t)?;
        DualJetPoint::new(jet, self.gamma.momentum(t)?)
    }
}

impl<S: MomentumSection> PhaseCurve for SectionLift<'_, S> {
    fn state(&self, t: f64) -> Result<PhasePoint> {
        let d = self.dual_point(t)?;
        let mut p = self.section.lower_momenta(t, &d)?;
        if p.len() + 1 != self.order {
            return Err(Error::arg("section returned the wrong number of momentum levels"));
        }
        let (jet, pk) = d.into_parts();
        p.push(pk);
        PhasePoint::new(jet, p)
    }

    fn level_rates(&self, t: f64) -> Result<Vec<Vec<f64>>> {
        let e = prolong_curve(self.gamma.x.as_ref(), self.order, t)?;
        Ok((0..self.order)
            .map(|a| e.level(a + 1).iter().map(|v| (a + 1) as f64 * v).collect())
            .collect())
    }
}

/// Lifts `γ` through a section of the projection onto `T^(k*)M`.
pub fn lift_curve_via_section<'a, S: MomentumSection>(
    order: usize,
    gamma: &'a CotangentCurve,
    section: &'a S,
) -> SectionLift<'a, S> {
    SectionLift { order, gamma, section }
}
