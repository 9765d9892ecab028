use super::action::{jet_of_curve, CotangentCurve};
use super::flow::{energy, hamilton_rhs, lagrangian_energy, lagrangian_rhs};
use super::integrate::Trajectory;
use crate::curve::{time_derivative, Curve};
use crate::duality::{AffineHamiltonianModel, LagrangianModel, NewtonConfig};
use crate::error::{Error, Result};
use crate::jetspace::{prolong_curve, DualJetPoint, PhasePoint};
use crate::taylor::factorial;

fn sign(a: usize) -> f64 {
    if a % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Largest magnitude, NaN if any entry is NaN.
fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m: f64, x| {
        if m.is_nan() || x.is_nan() {
            f64::NAN
        } else {
            m.max(x.abs())
        }
    })
}

/// Both lines of the condensed Hamilton equation at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct CondensedResidual {
    pub t: f64,
    /// `((−1)^k/k!) p^(k) + sum_{a=0}^{k-1} ((−1)^(a+1)/a!) d^a/dt^a ∂H₀/∂y^(a)`.
    pub momentum: Vec<f64>,
    /// `(1/k!) x^(k) − ∂H₀/∂p`.
    pub velocity: Vec<f64>,
}

/// Residuals of the condensed Hamilton equation along `γ` at each time in `ts`.
pub fn hamilton_residual_condensed(
    h: &AffineHamiltonianModel,
    gamma: &CotangentCurve,
    ts: &[f64],
) -> Result<Vec<CondensedResidual>> {
    let k = h.order();
    let m = h.dim();
    let x = gamma.x.as_ref();
    let grad_at = |s: f64| -> Result<Vec<Vec<f64>>> {
        let jet = jet_of_curve(x, k, s)?;
        h.gradient(&DualJetPoint::new(jet, gamma.momentum(s)?)?)
    };
    ts.iter()
        .map(|&t| {
            let xd = x.derivatives(t, k)?;
            let g = grad_at(t)?;
            let velocity = (0..m).map(|i| xd[k][i] / factorial(k) - g[k][i]).collect();
            let pk = gamma.p.derivatives(t, k)?;
            let mut momentum: Vec<f64> = pk[k].iter().map(|v| sign(k) / factorial(k) * v).collect();
            for a in 0..k {
                let d = time_derivative(x, t, a, |s| Ok(grad_at(s)?.swap_remove(a)))?;
                let c = -sign(a) / factorial(a);
                for (r, v) in momentum.iter_mut().zip(d) {
                    *r += c * v;
                }
            }
            Ok(CondensedResidual { t, momentum, velocity })
        })
        .collect()
}

/// `sum_{a=0}^{k} ((−1)^a/a!) d^a/dt^a ∂L/∂y^(a)` along the prolonged curve.
pub fn euler_lagrange_residual(l: &LagrangianModel, x: &dyn Curve, ts: &[f64]) -> Result<Vec<Vec<f64>>> {
    let k = l.order();
    ts.iter()
        .map(|&t| {
            let mut acc = vec![0.0; l.dim()];
            for a in 0..=k {
                let d = time_derivative(x, t, a, |s| {
                    let e = prolong_curve(x, k, s)?;
                    Ok(l.gradient(&e)?.swap_remove(a))
                })?;
                let c = sign(a) / factorial(a);
                for (r, v) in acc.iter_mut().zip(d) {
                    *r += c * v;
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Momenta `p_(0..k-1)` of a curve for the Lagrangian flow:
/// `p_(k-1) = ∂L/∂y^(k)` and `a p_(a-1) = k ∂L/∂y^(a) − d/dt p_(a)`.
pub fn ostrogradski_momenta(l: &LagrangianModel, x: &dyn Curve, t: f64) -> Result<PhasePoint> {
    let k = l.order();
    fn level(l: &LagrangianModel, x: &dyn Curve, k: usize, a: usize, s: f64) -> Result<Vec<f64>> {
        let e = prolong_curve(x, k, s)?;
        let g = l.gradient(&e)?;
        if a == k - 1 {
            return Ok(g[k].clone());
        }
        let d = time_derivative(x, s, 1, |u| level(l, x, k, a + 1, u))?;
        Ok(g[a + 1]
            .iter()
            .zip(d)
            .map(|(ga, da)| (k as f64 * ga - da) / (a + 1) as f64)
            .collect())
    }
    let p = (0..k).map(|a| level(l, x, k, a, t)).collect::<Result<Vec<_>>>()?;
    let jet = jet_of_curve(x, k, t)?;
    PhasePoint::new(jet, p)
}

/// Outcome of a duality audit.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    /// `max |E_L − E_h|` over the phase samples.
    pub energy_gap: f64,
    /// `max |X_L − X_h|_inf` over the phase samples.
    pub rhs_gap: f64,
    /// `max |EL residual|_inf` along the projected trajectory.
    pub euler_lagrange: f64,
    /// Times at which the Euler-Lagrange residual was sampled.
    pub residual_times: Vec<f64>,
}

/// Stencil layout used to differentiate a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryStencil {
    /// Target spacing between stencil nodes, rounded to whole samples.
    pub spacing: f64,
    pub half_width: usize,
    /// Number of evenly spaced interior times to sample.
    pub samples: usize,
}

impl Default for TrajectoryStencil {
    fn default() -> Self {
        TrajectoryStencil {
            spacing: 0.05,
            half_width: 4,
            samples: 11,
        }
    }
}

impl TrajectoryStencil {
    /// The projected base curve and the interior times where nested stencils
    /// of total derivative order `depth` fit.
    pub fn base_curve(&self, traj: &Trajectory, depth: usize) -> Result<(crate::curve::SampledCurve, Vec<f64>)> {
        let times = traj.times();
        if times.len() < 3 {
            return Err(Error::Stencil("trajectory is too short".into()));
        }
        let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        let stride = ((self.spacing / dt).round() as usize).max(1);
        let curve = traj.level_curve(0, stride, self.half_width)?;
        let reach = (depth.max(1) * stride * self.half_width) as f64 * dt;
        let (lo, hi) = (times[0] + reach, times[times.len() - 1] - reach);
        if !(hi >= lo) {
            return Err(Error::Stencil(format!(
                "trajectory of length {} is too short for stencils reaching {reach}",
                times[times.len() - 1] - times[0]
            )));
        }
        let n = self.samples.max(1);
        // Snap to grid points so that every stencil node is a sample.
        let snap = |t: f64| times[0] + ((t - times[0]) / dt).round() * dt;
        let ts: Vec<f64> = if n == 1 || hi - lo < dt {
            vec![snap(0.5 * (lo + hi))]
        } else {
            (0..n)
                .map(|i| snap(lo + (hi - lo) * i as f64 / (n - 1) as f64))
                .filter(|t| *t >= lo - 1e-9 && *t <= hi + 1e-9)
                .collect()
        };
        Ok((curve, ts))
    }
}

/// Cross-checks a Lagrangian against a Hamiltonian that claims to be its
/// dual: energies, vector fields, and the Euler-Lagrange residual of the
/// projection of `traj`.
pub fn verify_duality(
    l: &LagrangianModel,
    h: &AffineHamiltonianModel,
    pts: &[PhasePoint],
    traj: &Trajectory,
    cfg: &NewtonConfig,
    stencil: &TrajectoryStencil,
) -> Result<DualityReport> {
    if l.order() != h.order() || l.dim() != h.dim() {
        return Err(Error::arg("Lagrangian and Hamiltonian have different shapes"));
    }
    let mut energy_gap = 0.0f64;
    let mut rhs_gap = 0.0f64;
    for pt in pts {
        energy_gap = max_abs([energy_gap, lagrangian_energy(l, pt, cfg)? - energy(h, pt)?]);
        let a = lagrangian_rhs(l, pt, cfg)?.to_flat();
        let b = hamilton_rhs(h, pt)?.to_flat();
        let gap = max_abs(a.iter().zip(&b).map(|(u, v)| u - v));
        rhs_gap = max_abs([rhs_gap, gap]);
    }
    let (curve, ts) = stencil.base_curve(traj, 2)?;
    let el = euler_lagrange_residual(l, &curve, &ts)?;
    let euler_lagrange = max_abs(el.iter().flatten().copied());
    Ok(DualityReport {
        energy_gap,
        rhs_gap,
        euler_lagrange,
        residual_times: ts,
    })
}
