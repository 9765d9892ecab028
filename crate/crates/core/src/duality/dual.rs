use std::sync::Arc;

use nalgebra::DMatrix;

use super::model::{AffineHamiltonianModel, HamiltonianOracle, LagrangianModel, LagrangianOracle};
use super::newton::{newton_solve, NewtonConfig, SearchBox};
use crate::error::{Error, Result};
use crate::jetspace::{DualJetPoint, ExtendedJetPoint, JetPoint};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn invert(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Regularity(format!("{what} is singular")))
}

/// `p = ∂L/∂y^(k)` with the base jet copied.
pub fn legendre_map(l: &LagrangianModel, pt: &ExtendedJetPoint) -> Result<DualJetPoint> {
    let g = l.gradient(pt)?;
    DualJetPoint::new(pt.jet().clone(), g[l.order()].clone())
}

/// Solves `∂L/∂y^(k)(x, .., y^(k)) = p` for `y^(k)` by damped Newton on the
/// vertical hessian.
pub fn legendre_inverse(l: &LagrangianModel, pt: &DualJetPoint, cfg: &NewtonConfig) -> Result<ExtendedJetPoint> {
    let k = l.order();
    let jet = pt.jet().clone();
    let p = pt.pk().to_vec();
    let system = |y: &[f64]| -> Result<(Vec<f64>, DMatrix<f64>)> {
        let e = ExtendedJetPoint::new(jet.clone(), y.to_vec())?;
        let grad = l.gradient(&e)?;
        let f: Vec<f64> = grad[k].iter().zip(&p).map(|(a, b)| a - b).collect();
        Ok((f, l.vertical_hessian(&e)?))
    };
    let top = newton_solve(&system, l.dim(), cfg)?;
    ExtendedJetPoint::new(jet, top)
}

/// `y^(k) = ∂H₀/∂p`.
pub fn legendre_star_map(h: &AffineHamiltonianModel, pt: &DualJetPoint) -> Result<ExtendedJetPoint> {
    let g = h.gradient(pt)?;
    ExtendedJetPoint::new(pt.jet().clone(), g[h.order()].clone())
}

/// `H₀ = p·H − L(.., H)` with `H` the inverse Legendre map.
pub struct DualHamiltonianOracle {
    lagrangian: LagrangianModel,
    cfg: NewtonConfig,
}

impl DualHamiltonianOracle {
    fn solve(&self, pt: &DualJetPoint) -> Result<ExtendedJetPoint> {
        legendre_inverse(&self.lagrangian, pt, &self.cfg)
    }
}

impl HamiltonianOracle for DualHamiltonianOracle {
    fn value(&self, pt: &DualJetPoint) -> Result<f64> {
        let e = self.solve(pt)?;
        Ok(dot(pt.pk(), e.top()) - self.lagrangian.value(&e)?)
    }

    fn gradient(&self, pt: &DualJetPoint) -> Result<Vec<Vec<f64>>> {
        let e = self.solve(pt)?;
        let k = self.lagrangian.order();
        let mut g = self.lagrangian.gradient(&e)?;
        g.truncate(k);
        for level in &mut g {
            level.iter_mut().for_each(|v| *v = -*v);
        }
        g.push(e.top().to_vec());
        Ok(g)
    }

    fn p_hessian(&self, pt: &DualJetPoint) -> Result<DMatrix<f64>> {
        let e = self.solve(pt)?;
        invert(&self.lagrangian.vertical_hessian(&e)?, "vertical hessian")
    }
}

/// The affine Hamiltonian dual to a hyperregular Lagrangian.
pub fn dual_affine_hamiltonian(l: &LagrangianModel, cfg: &NewtonConfig) -> Result<AffineHamiltonianModel> {
    cfg.validate()?;
    let oracle = DualHamiltonianOracle {
        lagrangian: l.clone(),
        cfg: cfg.clone(),
    };
    Ok(AffineHamiltonianModel::new(l.order(), l.dim(), Arc::new(oracle))?.with_hyperregular(l.is_hyperregular()))
}

/// `L = y^(k)·q − H₀(.., q)` with `q` the inverse Legendre* map.
pub struct DualLagrangianOracle {
    hamiltonian: AffineHamiltonianModel,
    cfg: NewtonConfig,
}

impl DualLagrangianOracle {
    fn solve(&self, pt: &ExtendedJetPoint) -> Result<DualJetPoint> {
        let k = self.hamiltonian.order();
        let jet: JetPoint = pt.jet().clone();
        let top = pt.top().to_vec();
        let h = &self.hamiltonian;
        let system = |q: &[f64]| -> Result<(Vec<f64>, DMatrix<f64>)> {
            let d = DualJetPoint::new(jet.clone(), q.to_vec())?;
            let grad = h.gradient(&d)?;
            let f: Vec<f64> = grad[k].iter().zip(&top).map(|(a, b)| a - b).collect();
            Ok((f, h.p_hessian(&d)?))
        };
        let q = newton_solve(&system, h.dim(), &self.cfg)?;
        DualJetPoint::new(pt.jet().clone(), q)
    }
}

impl LagrangianOracle for DualLagrangianOracle {
    fn value(&self, pt: &ExtendedJetPoint) -> Result<f64> {
        let d = self.solve(pt)?;
        Ok(dot(pt.top(), d.pk()) - self.hamiltonian.value(&d)?)
    }

    fn gradient(&self, pt: &ExtendedJetPoint) -> Result<Vec<Vec<f64>>> {
        let d = self.solve(pt)?;
        let k = self.hamiltonian.order();
        let mut g = self.hamiltonian.gradient(&d)?;
        g.truncate(k);
        for level in &mut g {
            level.iter_mut().for_each(|v| *v = -*v);
        }
        g.push(d.pk().to_vec());
        Ok(g)
    }

    fn vertical_hessian(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>> {
        let d = self.solve(pt)?;
        invert(&self.hamiltonian.p_hessian(&d)?, "hamiltonian vertical hessian")
    }
}

/// The Lagrangian dual to a hyperregular affine Hamiltonian.
pub fn dual_lagrangian(h: &AffineHamiltonianModel, cfg: &NewtonConfig) -> Result<LagrangianModel> {
    cfg.validate()?;
    let oracle = DualLagrangianOracle {
        hamiltonian: h.clone(),
        cfg: cfg.clone(),
    };
    Ok(LagrangianModel::new(h.order(), h.dim(), Arc::new(oracle))?.with_hyperregular(h.is_hyperregular()))
}

/// Maximum of `p·y − L(.., y)` over a box and where it is attained.
#[derive(Clone, Debug, PartialEq)]
pub struct FenchelResult {
    pub value: f64,
    pub argmax: Vec<f64>,
}

/// `max_y (p·y − L(.., y))` by grid search over `search`, polished by Newton.
/// A maximiser on the boundary of the box means the box is too small.
pub fn fenchel_h0(l: &LagrangianModel, pt: &DualJetPoint, search: &SearchBox) -> Result<FenchelResult> {
    search.validate()?;
    if search.dim() != l.dim() {
        return Err(Error::arg("search box dimension does not match the Lagrangian"));
    }
    let jet = pt.jet().clone();
    let p = pt.pk().to_vec();
    let objective = |y: &[f64]| -> Result<f64> {
        let e = ExtendedJetPoint::new(jet.clone(), y.to_vec())?;
        Ok(dot(&p, y) - l.value(&e)?)
    };
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    search.for_each(|y, boundary| {
        if let Ok(v) = objective(y) {
            if v.is_finite() && best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                best = Some((v, y.to_vec(), boundary));
            }
        }
    });
    let (grid_value, seed, on_boundary) =
        best.ok_or_else(|| Error::Domain("objective undefined on the whole search box".into()))?;
    if on_boundary {
        return Err(Error::BoxTooSmall { argmax: seed });
    }
    let cfg = NewtonConfig {
        initial_guess: super::newton::InitialGuess::Given(seed.clone()),
        ..NewtonConfig::default()
    };
    let k = l.order();
    let system = |y: &[f64]| -> Result<(Vec<f64>, DMatrix<f64>)> {
        let e = ExtendedJetPoint::new(jet.clone(), y.to_vec())?;
        let grad = l.gradient(&e)?;
        let f: Vec<f64> = grad[k].iter().zip(&p).map(|(a, b)| a - b).collect();
        Ok((f, l.vertical_hessian(&e)?))
    };
    let (value, argmax) = match newton_solve(&system, l.dim(), &cfg) {
        Ok(y) => {
            let v = objective(&y)?;
            if v >= grid_value {
                (v, y)
            } else {
                (grid_value, seed)
            }
        }
        Err(_) => (grid_value, seed),
    };
    if !search.contains(&argmax) {
        return Err(Error::BoxTooSmall { argmax });
    }
    Ok(FenchelResult { value, argmax })
}
