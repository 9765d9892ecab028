use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::model::{AffineHamiltonianModel, HamiltonianOracle, VectorialHamiltonian};
use crate::error::{Error, Result};
use crate::field::VectorMap;
use crate::jetspace::{DualJetPoint, JetPoint};

/// Components `s^i(x, y1, .., y^(k-1))` of a section of `T^kM → T^(k-1)M`.
#[derive(Clone, Debug)]
pub struct AffineSection {
    order: usize,
    dim: usize,
    map: VectorMap,
}

impl AffineSection {
    pub fn new(order: usize, dim: usize, map: VectorMap) -> Result<Self> {
        if map.arity() != order * dim || map.out_dim() != dim {
            return Err(Error::arg(format!(
                "a section of order {order} in dimension {dim} maps {} coordinates to {dim}",
                order * dim
            )));
        }
        Ok(AffineSection { order, dim, map })
    }

    pub fn zero(order: usize, dim: usize) -> Self {
        AffineSection {
            order,
            dim,
            map: VectorMap::analytic(order * dim, dim, move |z| vec![z[0].lift(0.0); dim]),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, jet: &JetPoint) -> Vec<f64> {
        self.map.eval(&jet.to_flat())
    }

    pub fn jacobian(&self, jet: &JetPoint) -> DMatrix<f64> {
        self.map.jacobian(&jet.to_flat())
    }
}

/// `base ± s·p`.
struct SectionShift {
    base: Arc<dyn HamiltonianOracle>,
    section: AffineSection,
    sign: f64,
}

impl HamiltonianOracle for SectionShift {
    fn value(&self, pt: &DualJetPoint) -> Result<f64> {
        let s = self.section.eval(pt.jet());
        let sp: f64 = s.iter().zip(pt.pk()).map(|(a, b)| a * b).sum();
        Ok(self.base.value(pt)? + self.sign * sp)
    }

    fn gradient(&self, pt: &DualJetPoint) -> Result<Vec<Vec<f64>>> {
        let mut g = self.base.gradient(pt)?;
        let m = pt.dim();
        let jt = self.section.jacobian(pt.jet()).transpose() * DVector::from_column_slice(pt.pk());
        for (a, level) in g.iter_mut().take(pt.order()).enumerate() {
            for (i, v) in level.iter_mut().enumerate() {
                *v += self.sign * jt[a * m + i];
            }
        }
        let s = self.section.eval(pt.jet());
        for (v, si) in g[pt.order()].iter_mut().zip(s) {
            *v += self.sign * si;
        }
        Ok(g)
    }

    fn p_hessian(&self, pt: &DualJetPoint) -> Result<DMatrix<f64>> {
        self.base.p_hessian(pt)
    }
}

fn check_shape(order: usize, dim: usize, s: &AffineSection) -> Result<()> {
    if s.order() != order || s.dim() != dim {
        return Err(Error::arg("section and Hamiltonian have different order or dimension"));
    }
    Ok(())
}

/// `H₀ = H + s·p`.
pub fn affine_from_vectorial(h: &VectorialHamiltonian, s: &AffineSection) -> Result<AffineHamiltonianModel> {
    check_shape(h.order(), h.dim(), s)?;
    let m = h.model();
    AffineHamiltonianModel::new(
        m.order(),
        m.dim(),
        Arc::new(SectionShift {
            base: m.oracle().clone(),
            section: s.clone(),
            sign: 1.0,
        }),
    )
    .map(|out| out.with_hyperregular(m.is_hyperregular()))
}

/// `H = H₀ − s·p`.
pub fn vectorial_from_affine(h: &AffineHamiltonianModel, s: &AffineSection) -> Result<VectorialHamiltonian> {
    check_shape(h.order(), h.dim(), s)?;
    let model = AffineHamiltonianModel::new(
        h.order(),
        h.dim(),
        Arc::new(SectionShift {
            base: h.oracle().clone(),
            section: s.clone(),
            sign: -1.0,
        }),
    )?
    .with_hyperregular(h.is_hyperregular());
    Ok(VectorialHamiltonian::new(model))
}

/// `s^i = ∂H₀/∂p_i − ∂H/∂p_i` at a point.
pub fn recover_section(h0: &AffineHamiltonianModel, h: &VectorialHamiltonian, pt: &DualJetPoint) -> Result<Vec<f64>> {
    let k = h0.order();
    let a = h0.gradient(pt)?;
    let b = h.gradient(pt)?;
    Ok(a[k].iter().zip(&b[k]).map(|(x, y)| x - y).collect())
}
