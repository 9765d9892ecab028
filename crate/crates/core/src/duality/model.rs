use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jetspace::{DualJetPoint, ExtendedJetPoint};
use crate::taylor::Taylor;

/// Value and derivatives of an order-`k` Lagrangian on `T^kM`.
pub trait LagrangianOracle: Send + Sync {
    fn value(&self, pt: &ExtendedJetPoint) -> Result<f64>;

    /// `∂L/∂y^(a)` for `a = 0..=k` (level 0 is `x`).
    fn gradient(&self, pt: &ExtendedJetPoint) -> Result<Vec<Vec<f64>>>;

    /// `g_ij = ∂²L/∂y^(k)i ∂y^(k)j`.
    fn vertical_hessian(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>>;

    /// Full hessian in the flat layout `[x, y1, .., y^(k)]`.
    fn hessian(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>> {
        let (k, m) = (pt.order(), pt.dim());
        let z = pt.to_flat();
        fd_jacobian_of(&z, |w| {
            let p = ExtendedJetPoint::from_flat(k, m, w)?;
            Ok(self.gradient(&p)?.concat())
        })
    }
}

/// Value and derivatives of a local function `H₀` on `T^(k*)M`.
pub trait HamiltonianOracle: Send + Sync {
    fn value(&self, pt: &DualJetPoint) -> Result<f64>;

    /// `∂H₀/∂y^(a)` for `a = 0..k-1`, followed by `∂H₀/∂p`.
    fn gradient(&self, pt: &DualJetPoint) -> Result<Vec<Vec<f64>>>;

    /// `h^ij = ∂²H₀/∂p_i ∂p_j`.
    fn p_hessian(&self, pt: &DualJetPoint) -> Result<DMatrix<f64>>;
}

pub(crate) fn fd_jacobian_of(z: &[f64], g: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<DMatrix<f64>> {
    let n = z.len();
    let mut cols = Vec::with_capacity(n);
    let mut w = z.to_vec();
    for j in 0..n {
        let h = crate::fd::step(1, z[j]);
        w[j] = z[j] + h;
        let gp = g(&w)?;
        w[j] = z[j] - h;
        let gm = g(&w)?;
        w[j] = z[j];
        cols.push(gp.iter().zip(&gm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    let rows = cols.first().map(Vec::len).unwrap_or(0);
    let mut out = DMatrix::zeros(rows, n);
    for (j, c) in cols.into_iter().enumerate() {
        for (i, v) in c.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

fn split_levels(flat: Vec<f64>, m: usize) -> Vec<Vec<f64>> {
    flat.chunks(m).map(<[f64]>::to_vec).collect()
}

fn symmetrize(mut h: DMatrix<f64>) -> DMatrix<f64> {
    let t = h.transpose();
    h += t;
    h *= 0.5;
    h
}

/// A Lagrangian given by a scalar field on the flat coordinates
/// `[x, y1, .., y^(k)]`.
pub struct FieldLagrangian {
    pub field: ScalarField,
    pub dim: usize,
}

impl LagrangianOracle for FieldLagrangian {
    fn value(&self, pt: &ExtendedJetPoint) -> Result<f64> {
        Ok(self.field.value(&pt.to_flat()))
    }

    fn gradient(&self, pt: &ExtendedJetPoint) -> Result<Vec<Vec<f64>>> {
        Ok(split_levels(self.field.gradient(&pt.to_flat()), self.dim))
    }

    fn vertical_hessian(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>> {
        let z = pt.to_flat();
        let top = pt.order() * self.dim..z.len();
        Ok(symmetrize(self.field.hessian_block(&z, top.clone(), top)))
    }

    fn hessian(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>> {
        Ok(symmetrize(self.field.hessian(&pt.to_flat())))
    }
}

/// A local Hamiltonian given by a scalar field on `[x, y1, .., y^(k-1), p]`.
pub struct FieldHamiltonian {
    pub field: ScalarField,
    pub dim: usize,
}

impl HamiltonianOracle for FieldHamiltonian {
    fn value(&self, pt: &DualJetPoint) -> Result<f64> {
        Ok(self.field.value(&pt.to_flat()))
    }

    fn gradient(&self, pt: &DualJetPoint) -> Result<Vec<Vec<f64>>> {
        Ok(split_levels(self.field.gradient(&pt.to_flat()), self.dim))
    }

    fn p_hessian(&self, pt: &DualJetPoint) -> Result<DMatrix<f64>> {
        let z = pt.to_flat();
        let p = pt.order() * self.dim..z.len();
        Ok(symmetrize(self.field.hessian_block(&z, p.clone(), p)))
    }
}

pub type ExtendedPredicate = dyn Fn(&ExtendedJetPoint) -> bool + Send + Sync;
pub type DualPredicate = dyn Fn(&DualJetPoint) -> bool + Send + Sync;

/// An order-`k` Lagrangian with its derivative oracle and excluded set.
#[derive(Clone)]
pub struct LagrangianModel {
    order: usize,
    dim: usize,
    oracle: Arc<dyn LagrangianOracle>,
    excluded: Option<Arc<ExtendedPredicate>>,
    hyperregular: bool,
}

impl fmt::Debug for LagrangianModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LagrangianModel")
            .field("order", &self.order)
            .field("dim", &self.dim)
            .field("hyperregular", &self.hyperregular)
            .finish()
    }
}

impl LagrangianModel {
    pub fn new(order: usize, dim: usize, oracle: Arc<dyn LagrangianOracle>) -> Result<Self> {
        if order == 0 || dim == 0 {
            return Err(Error::arg("order and dimension must be positive"));
        }
        Ok(LagrangianModel {
            order,
            dim,
            oracle,
            excluded: None,
            hyperregular: false,
        })
    }

    pub fn from_field(order: usize, dim: usize, field: ScalarField) -> Result<Self> {
        if field.arity() != (order + 1) * dim {
            return Err(Error::arg(format!(
                "a Lagrangian of order {order} in dimension {dim} takes {} coordinates, field has {}",
                (order + 1) * dim,
                field.arity()
            )));
        }
        Self::new(order, dim, Arc::new(FieldLagrangian { field, dim }))
    }

    /// Analytic closure over the flat levels `[x, y1, .., y^(k)]`.
    pub fn analytic(order: usize, dim: usize, f: impl Fn(&[Taylor]) -> Taylor + Send + Sync + 'static) -> Result<Self> {
        Self::from_field(order, dim, ScalarField::analytic((order + 1) * dim, f))
    }

    /// Plain closure, differentiated by finite differences.
    pub fn numeric(order: usize, dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::from_field(order, dim, ScalarField::numeric((order + 1) * dim, f))
    }

    pub fn with_excluded(mut self, pred: impl Fn(&ExtendedJetPoint) -> bool + Send + Sync + 'static) -> Self {
        self.excluded = Some(Arc::new(pred));
        self
    }

    pub fn with_hyperregular(mut self, flag: bool) -> Self {
        self.hyperregular = flag;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_hyperregular(&self) -> bool {
        self.hyperregular
    }

    pub fn oracle(&self) -> &Arc<dyn LagrangianOracle> {
        &self.oracle
    }

    pub fn check_point(&self, pt: &ExtendedJetPoint) -> Result<()> {
        if pt.order() != self.order || pt.dim() != self.dim {
            return Err(Error::arg(format!(
                "point of order {} / dim {} given to a Lagrangian of order {} / dim {}",
                pt.order(),
                pt.dim(),
                self.order,
                self.dim
            )));
        }
        if let Some(ex) = &self.excluded {
            if ex(pt) {
                return Err(Error::Domain(format!("{:?} is in the excluded set", pt.to_flat())));
            }
        }
        Ok(())
    }

    pub fn value(&self, pt: &ExtendedJetPoint) -> Result<f64> {
        self.check_point(pt)?;
        self.oracle.value(pt)
    }

    pub fn gradient(&self, pt: &ExtendedJetPoint) -> Result<Vec<Vec<f64>>> {
        self.check_point(pt)?;
        self.oracle.gradient(pt)
    }

    pub fn vertical_hessian(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>> {
        self.check_point(pt)?;
        let g = self.oracle.vertical_hessian(pt)?;
        if self.hyperregular && g.clone().lu().determinant() == 0.0 {
            return Err(Error::Regularity("vertical hessian is singular".into()));
        }
        Ok(g)
    }

    pub fn hessian(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>> {
        self.check_point(pt)?;
        self.oracle.hessian(pt)
    }
}

/// A local Hamiltonian `H₀` of order `k` with derivative oracle and excluded
/// set. The same shape also carries vectorial Hamiltonians.
#[derive(Clone)]
pub struct AffineHamiltonianModel {
    order: usize,
    dim: usize,
    oracle: Arc<dyn HamiltonianOracle>,
    excluded: Option<Arc<DualPredicate>>,
    hyperregular: bool,
}

impl fmt::Debug for AffineHamiltonianModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AffineHamiltonianModel")
            .field("order", &self.order)
            .field("dim", &self.dim)
            .field("hyperregular", &self.hyperregular)
            .finish()
    }
}

struct Shifted {
    inner: Arc<dyn HamiltonianOracle>,
    c: f64,
}

impl HamiltonianOracle for Shifted {
    fn value(&self, pt: &DualJetPoint) -> Result<f64> {
        Ok(self.inner.value(pt)? + self.c)
    }
    fn gradient(&self, pt: &DualJetPoint) -> Result<Vec<Vec<f64>>> {
        self.inner.gradient(pt)
    }
    fn p_hessian(&self, pt: &DualJetPoint) -> Result<DMatrix<f64>> {
        self.inner.p_hessian(pt)
    }
}

impl AffineHamiltonianModel {
    pub fn new(order: usize, dim: usize, oracle: Arc<dyn HamiltonianOracle>) -> Result<Self> {
        if order == 0 || dim == 0 {
            return Err(Error::arg("order and dimension must be positive"));
        }
        Ok(AffineHamiltonianModel {
            order,
            dim,
            oracle,
            excluded: None,
            hyperregular: false,
        })
    }

    pub fn from_field(order: usize, dim: usize, field: ScalarField) -> Result<Self> {
        if field.arity() != (order + 1) * dim {
            return Err(Error::arg(format!(
                "a Hamiltonian of order {order} in dimension {dim} takes {} coordinates, field has {}",
                (order + 1) * dim,
                field.arity()
            )));
        }
        Self::new(order, dim, Arc::new(FieldHamiltonian { field, dim }))
    }

    /// Analytic closure over the flat coordinates `[x, y1, .., y^(k-1), p]`.
    pub fn analytic(order: usize, dim: usize, f: impl Fn(&[Taylor]) -> Taylor + Send + Sync + 'static) -> Result<Self> {
        Self::from_field(order, dim, ScalarField::analytic((order + 1) * dim, f))
    }

    pub fn numeric(order: usize, dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::from_field(order, dim, ScalarField::numeric((order + 1) * dim, f))
    }

    pub fn with_excluded(mut self, pred: impl Fn(&DualJetPoint) -> bool + Send + Sync + 'static) -> Self {
        self.excluded = Some(Arc::new(pred));
        self
    }

    pub fn with_hyperregular(mut self, flag: bool) -> Self {
        self.hyperregular = flag;
        self
    }

    /// The same model with `c` added to `H₀`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.oracle = Arc::new(Shifted {
            inner: self.oracle.clone(),
            c,
        });
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_hyperregular(&self) -> bool {
        self.hyperregular
    }

    pub fn oracle(&self) -> &Arc<dyn HamiltonianOracle> {
        &self.oracle
    }

    pub fn check_point(&self, pt: &DualJetPoint) -> Result<()> {
        if pt.order() != self.order || pt.dim() != self.dim {
            return Err(Error::arg(format!(
                "point of order {} / dim {} given to a Hamiltonian of order {} / dim {}",
                pt.order(),
                pt.dim(),
                self.order,
                self.dim
            )));
        }
        if let Some(ex) = &self.excluded {
            if ex(pt) {
                return Err(Error::Domain(format!("{:?} is in the excluded set", pt.to_flat())));
            }
        }
        Ok(())
    }

    pub fn value(&self, pt: &DualJetPoint) -> Result<f64> {
        self.check_point(pt)?;
        self.oracle.value(pt)
    }

    pub fn gradient(&self, pt: &DualJetPoint) -> Result<Vec<Vec<f64>>> {
        self.check_point(pt)?;
        self.oracle.gradient(pt)
    }

    pub fn p_hessian(&self, pt: &DualJetPoint) -> Result<DMatrix<f64>> {
        self.check_point(pt)?;
        let h = self.oracle.p_hessian(pt)?;
        if self.hyperregular && h.clone().lu().determinant() == 0.0 {
            return Err(Error::Regularity("vertical hessian is singular".into()));
        }
        Ok(h)
    }
}

/// A vectorial Hamiltonian: same coordinates as an affine one, but its values
/// transform as a scalar under changes of chart.
#[derive(Clone, Debug)]
pub struct VectorialHamiltonian {
    model: AffineHamiltonianModel,
}

impl VectorialHamiltonian {
    pub fn new(model: AffineHamiltonianModel) -> Self {
        VectorialHamiltonian { model }
    }

    pub fn model(&self) -> &AffineHamiltonianModel {
        &self.model
    }

    pub fn order(&self) -> usize {
        self.model.order()
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn value(&self, pt: &DualJetPoint) -> Result<f64> {
        self.model.value(pt)
    }

    pub fn gradient(&self, pt: &DualJetPoint) -> Result<Vec<Vec<f64>>> {
        self.model.gradient(pt)
    }
}
