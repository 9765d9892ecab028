use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::duality::{AffineHamiltonianModel, LagrangianModel, LagrangianOracle};
use crate::error::{Error, Result};
use crate::field::VectorMap;
use crate::jetspace::{ExtendedJetPoint, JetPoint};
use crate::taylor::{dot, factorial, norm_sq, Taylor};

/// `S^i = ½ g^ij (y^l ∂²L/∂x^l∂y^j − ∂L/∂x^j)` for an order-1 Lagrangian.
pub fn semispray(l1: &LagrangianModel, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if l1.order() != 1 {
        return Err(Error::arg("the semispray is defined for order-1 Lagrangians"));
    }
    let m = l1.dim();
    if x.len() != m || y.len() != m {
        return Err(Error::arg("point has the wrong dimension"));
    }
    let pt = ExtendedJetPoint::new(JetPoint::base(x.to_vec())?, y.to_vec())?;
    let hess = l1.hessian(&pt)?;
    let grad = l1.gradient(&pt)?;
    let g = hess.view((m, m), (m, m)).into_owned();
    let mixed = hess.view((0, m), (m, m));
    let rhs = mixed.transpose() * DVector::from_column_slice(y) - DVector::from_column_slice(&grad[0]);
    let scale = g.amax().max(1.0);
    let lu = g.lu();
    if lu.determinant().abs() <= 1e-12 * scale.powi(m as i32) {
        return Err(Error::Regularity(format!(
            "vertical hessian is singular at x = {x:?}, y = {y:?}"
        )));
    }
    let s = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Regularity("vertical hessian is singular".into()))?;
    Ok(s.iter().map(|v| 0.5 * v).collect())
}

/// Data of `L^(2) = ε₀ L₁(x, y1) + ε₁ L₁(x, y2 − S(x, y1))`.
#[derive(Clone, Debug)]
pub struct LiftedLagrangianSpec {
    pub base: LagrangianModel,
    pub eps0: f64,
    pub eps1: f64,
    /// Closed-form semispray on `[x, y]`; computed from `base` when absent.
    pub semispray: Option<VectorMap>,
}

impl LiftedLagrangianSpec {
    pub fn new(base: LagrangianModel, eps0: f64, eps1: f64) -> Self {
        LiftedLagrangianSpec {
            base,
            eps0,
            eps1,
            semispray: None,
        }
    }

    pub fn with_semispray(mut self, s: VectorMap) -> Self {
        self.semispray = Some(s);
        self
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.base.order() != 1 {
            return Err(Error::arg("lifted Lagrangians start from an order-1 Lagrangian"));
        }
        if !(self.eps1 != 0.0 && self.eps1.is_finite() && self.eps0.is_finite()) {
            return Err(Error::arg("eps1 must be finite and nonzero"));
        }
        if let Some(s) = &self.semispray {
            let m = self.dim();
            if s.arity() != 2 * m || s.out_dim() != m {
                return Err(Error::arg("semispray map must send [x, y] to a vector of length m"));
            }
        }
        Ok(())
    }

    pub fn semispray_at(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        match &self.semispray {
            Some(s) => Ok(s.eval(&[x, y].concat())),
            None => semispray(&self.base, x, y),
        }
    }

    /// `∂S/∂(x, y)`, an `m × 2m` matrix.
    pub fn semispray_jacobian(&self, x: &[f64], y: &[f64]) -> Result<DMatrix<f64>> {
        let z = [x, y].concat();
        match &self.semispray {
            Some(s) => Ok(s.jacobian(&z)),
            None => {
                let m = self.dim();
                crate::duality::fd_jacobian_of(&z, |w| semispray(&self.base, &w[..m], &w[m..]))
            }
        }
    }
}

struct Lifted {
    spec: LiftedLagrangianSpec,
}

impl Lifted {
    fn base_point(x: &[f64], y: Vec<f64>) -> Result<ExtendedJetPoint> {
        ExtendedJetPoint::new(JetPoint::base(x.to_vec())?, y)
    }

    fn shifted(&self, pt: &ExtendedJetPoint) -> Result<ExtendedJetPoint> {
        let s = self.spec.semispray_at(pt.x(), pt.level(1))?;
        let z = pt.level(2).iter().zip(&s).map(|(a, b)| a - b).collect();
        Self::base_point(pt.x(), z)
    }
}

impl LagrangianOracle for Lifted {
    fn value(&self, pt: &ExtendedJetPoint) -> Result<f64> {
        let first = Self::base_point(pt.x(), pt.level(1).to_vec())?;
        Ok(self.spec.eps0 * self.spec.base.value(&first)?
            + self.spec.eps1 * self.spec.base.value(&self.shifted(pt)?)?)
    }

    fn gradient(&self, pt: &ExtendedJetPoint) -> Result<Vec<Vec<f64>>> {
        let m = pt.dim();
        let (e0, e1) = (self.spec.eps0, self.spec.eps1);
        let first = Self::base_point(pt.x(), pt.level(1).to_vec())?;
        let g1 = self.spec.base.gradient(&first)?;
        let gz = self.spec.base.gradient(&self.shifted(pt)?)?;
        let js = self.spec.semispray_jacobian(pt.x(), pt.level(1))?;
        let back = js.transpose() * DVector::from_column_slice(&gz[1]);
        let gx = (0..m).map(|i| e0 * g1[0][i] + e1 * (gz[0][i] - back[i])).collect();
        let gy1 = (0..m).map(|i| e0 * g1[1][i] - e1 * back[m + i]).collect();
        let gy2 = gz[1].iter().map(|v| e1 * v).collect();
        Ok(vec![gx, gy1, gy2])
    }

    fn vertical_hessian(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>> {
        Ok(self.spec.base.vertical_hessian(&self.shifted(pt)?)? * self.spec.eps1)
    }
}

/// The order-2 Lagrangian `ε₀ L₁(x, y1) + ε₁ L₁(x, y2 − S(x, y1))`, with
/// derivatives composed through `S` by the chain rule.
pub fn lift_lagrangian(spec: &LiftedLagrangianSpec) -> Result<LagrangianModel> {
    spec.validate()?;
    Ok(
        LagrangianModel::new(2, spec.dim(), Arc::new(Lifted { spec: spec.clone() }))?
            .with_hyperregular(spec.base.is_hyperregular()),
    )
}

struct RawDerivatives {
    raw: LagrangianModel,
}

impl RawDerivatives {
    fn raw_point(&self, pt: &ExtendedJetPoint) -> Result<ExtendedJetPoint> {
        ExtendedJetPoint::from_levels(
            pt.levels()
                .iter()
                .enumerate()
                .map(|(a, l)| l.iter().map(|v| v * factorial(a)).collect())
                .collect(),
        )
    }
}

impl LagrangianOracle for RawDerivatives {
    fn value(&self, pt: &ExtendedJetPoint) -> Result<f64> {
        Ok(self.raw.value(&self.raw_point(pt)?)? / pt.order() as f64)
    }

    fn gradient(&self, pt: &ExtendedJetPoint) -> Result<Vec<Vec<f64>>> {
        let k = pt.order() as f64;
        Ok(self
            .raw
            .gradient(&self.raw_point(pt)?)?
            .into_iter()
            .enumerate()
            .map(|(a, g)| g.into_iter().map(|v| v * factorial(a) / k).collect())
            .collect())
    }

    fn vertical_hessian(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>> {
        let k = pt.order();
        let c = factorial(k) * factorial(k) / k as f64;
        Ok(self.raw.vertical_hessian(&self.raw_point(pt)?)? * c)
    }

    fn hessian(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>> {
        let (k, m) = (pt.order(), pt.dim());
        let mut h = self.raw.hessian(&self.raw_point(pt)?)?;
        for r in 0..h.nrows() {
            for c in 0..h.ncols() {
                h[(r, c)] *= factorial(r / m) * factorial(c / m) / k as f64;
            }
        }
        Ok(h)
    }
}

/// Rewrites a Lagrangian whose arguments are plain derivatives
/// `L(x, ẋ, .., x^(k))` in jet coordinates, scaled by `1/k` so that the
/// action `∫ k L dt` matches `∫ L dt` of the original.
pub fn from_raw_derivatives(raw: &LagrangianModel) -> Result<LagrangianModel> {
    Ok(
        LagrangianModel::new(raw.order(), raw.dim(), Arc::new(RawDerivatives { raw: raw.clone() }))?
            .with_hyperregular(raw.is_hyperregular()),
    )
}

/// Potential term `V(x)` of the built-in order-1 Lagrangians.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Zero,
    /// `α·x`.
    Linear(Vec<f64>),
    /// `|x|²`.
    Spherical,
    /// `¼|x|⁴`.
    Quartic,
}

impl Potential {
    pub fn value(&self, x: &[Taylor]) -> Taylor {
        let deg = x[0].degree();
        match self {
            Potential::Zero => Taylor::constant(0.0, deg),
            Potential::Linear(a) => x
                .iter()
                .zip(a)
                .fold(Taylor::constant(0.0, deg), |acc, (xi, ai)| acc + xi * *ai),
            Potential::Spherical => norm_sq(x),
            Potential::Quartic => {
                let r = norm_sq(x);
                &r * &r * 0.25
            }
        }
    }

    pub fn gradient(&self, x: &[Taylor]) -> Vec<Taylor> {
        let deg = x[0].degree();
        match self {
            Potential::Zero => vec![Taylor::constant(0.0, deg); x.len()],
            Potential::Linear(a) => a.iter().map(|v| Taylor::constant(*v, deg)).collect(),
            Potential::Spherical => x.iter().map(|v| v * 2.0).collect(),
            Potential::Quartic => {
                let r = norm_sq(x);
                x.iter().map(|v| v * &r).collect()
            }
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Potential::Linear(a) if a.len() != dim => Err(Error::arg(format!(
                "linear potential needs {dim} coefficients, got {}",
                a.len()
            ))),
            _ => Ok(()),
        }
    }
}

/// `L₁ = ½|y|² + a·y + V(x)` on `[x, y]`.
pub fn standard_base_lagrangian(a: &[f64], potential: &Potential) -> Result<LagrangianModel> {
    let m = a.len();
    potential.validate(m)?;
    let (a, v) = (a.to_vec(), potential.clone());
    Ok(LagrangianModel::analytic(1, m, move |z: &[Taylor]| {
        let (x, y) = z.split_at(m);
        norm_sq(y) * 0.5 + linear(&a, y) + v.value(x)
    })?
    .with_hyperregular(true))
}

fn linear(a: &[f64], y: &[Taylor]) -> Taylor {
    y.iter()
        .zip(a)
        .fold(Taylor::constant(0.0, y[0].degree()), |acc, (yi, ai)| acc + yi * *ai)
}

/// `S = −½ ∇V`, the semispray of [`standard_base_lagrangian`].
pub fn standard_semispray(dim: usize, potential: &Potential) -> VectorMap {
    let v = potential.clone();
    VectorMap::analytic(2 * dim, dim, move |z: &[Taylor]| {
        v.gradient(&z[..dim]).into_iter().map(|g| g * -0.5).collect()
    })
}

/// Closed-form dual of `from_raw_derivatives(lift_lagrangian(..))` for the
/// standard base: `H₀ = ½ (p·S + ε₁ H₁(x, p/ε₁) − ε₀ L₁(x, y1))` with
/// `H₁(x, q) = ½|q − a|² − V(x)`.
pub fn standard_lifted_hamiltonian(
    eps0: f64,
    eps1: f64,
    a: &[f64],
    potential: &Potential,
) -> Result<AffineHamiltonianModel> {
    let m = a.len();
    potential.validate(m)?;
    if eps1 == 0.0 {
        return Err(Error::arg("eps1 must be nonzero"));
    }
    let (a, v) = (a.to_vec(), potential.clone());
    Ok(AffineHamiltonianModel::analytic(2, m, move |z: &[Taylor]| {
        let (x, rest) = z.split_at(m);
        let (y1, p) = rest.split_at(m);
        let s: Vec<Taylor> = v.gradient(x).into_iter().map(|g| g * -0.5).collect();
        let vx = v.value(x);
        let q: Vec<Taylor> = p.iter().zip(&a).map(|(pi, ai)| pi * (1.0 / eps1) - *ai).collect();
        let h1 = norm_sq(&q) * 0.5 - &vx;
        let l1 = norm_sq(y1) * 0.5 + linear(&a, y1) + &vx;
        (dot(p, &s) + h1 * eps1 - l1 * eps0) * 0.5
    })?
    .with_hyperregular(true))
}
