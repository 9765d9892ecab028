use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::model::{AffineHamiltonianModel, HamiltonianOracle, LagrangianModel, LagrangianOracle};
use crate::error::Result;
use crate::fd;
use crate::jetspace::{
    inhomogeneous_top, prolonged_jacobian_blocks, transform_jet, transform_levels, ChartTransition, DualJetPoint,
    ExtendedJetPoint, JetPoint,
};

/// `L'` on the primed chart: `L' = L ∘ (prolonged T⁻¹)`.
struct PulledBack {
    base: LagrangianModel,
    inverse: ChartTransition,
}

impl PulledBack {
    fn unprimed(&self, pt: &ExtendedJetPoint) -> Result<ExtendedJetPoint> {
        ExtendedJetPoint::from_levels(transform_levels(&self.inverse, &pt.levels())?)
    }
}

impl LagrangianOracle for PulledBack {
    fn value(&self, pt: &ExtendedJetPoint) -> Result<f64> {
        self.base.value(&self.unprimed(pt)?)
    }

    fn gradient(&self, pt: &ExtendedJetPoint) -> Result<Vec<Vec<f64>>> {
        let levels = pt.levels();
        let blocks = prolonged_jacobian_blocks(&self.inverse, &levels)?;
        let grad = self.base.gradient(&self.unprimed(pt)?)?;
        let k = pt.order();
        Ok((0..=k)
            .map(|b| {
                let mut acc = DVector::zeros(pt.dim());
                for (a, ga) in grad.iter().enumerate().skip(b) {
                    acc += blocks[a][b].transpose() * DVector::from_column_slice(ga);
                }
                acc.as_slice().to_vec()
            })
            .collect())
    }

    fn vertical_hessian(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>> {
        let jinv = self.inverse.jacobian(pt.x())?;
        let g = self.base.vertical_hessian(&self.unprimed(pt)?)?;
        Ok(jinv.transpose() * g * jinv)
    }
}

/// The same Lagrangian written in the chart `x' = T(x)`.
pub fn pullback_lagrangian(l: &LagrangianModel, t: &ChartTransition) -> Result<LagrangianModel> {
    Ok(LagrangianModel::new(
        l.order(),
        l.dim(),
        Arc::new(PulledBack {
            base: l.clone(),
            inverse: t.inverted(),
        }),
    )?
    .with_hyperregular(l.is_hyperregular()))
}

/// `H₀'` from the affine change rule
/// `H₀'(x', .., p') = H₀(x, .., p) + (1/k) Γ^(k-1)(y'^(k-1)) · p'`.
struct ChangedChart {
    base: AffineHamiltonianModel,
    forward: ChartTransition,
}

impl ChangedChart {
    fn unprimed(&self, pt: &DualJetPoint) -> Result<(JetPoint, DMatrix<f64>, DualJetPoint)> {
        let jet = transform_jet(&self.forward.inverted(), pt.jet())?;
        let jac = self.forward.jacobian(jet.x())?;
        let p = jac.transpose() * DVector::from_column_slice(pt.pk());
        let d = DualJetPoint::new(jet.clone(), p.as_slice().to_vec())?;
        Ok((jet, jac, d))
    }

    fn eval(&self, pt: &DualJetPoint) -> Result<f64> {
        let (jet, _, d) = self.unprimed(pt)?;
        let defect = inhomogeneous_top(&self.forward, &jet)?;
        let term: f64 = defect.iter().zip(pt.pk()).map(|(a, b)| a * b).sum();
        Ok(self.base.value(&d)? + term)
    }
}

impl HamiltonianOracle for ChangedChart {
    fn value(&self, pt: &DualJetPoint) -> Result<f64> {
        self.eval(pt)
    }

    fn gradient(&self, pt: &DualJetPoint) -> Result<Vec<Vec<f64>>> {
        let (k, m) = (pt.order(), pt.dim());
        let z = pt.to_flat();
        let mut w = z.clone();
        let mut g = Vec::with_capacity(z.len());
        for j in 0..z.len() {
            let h = fd::step(1, z[j]);
            w[j] = z[j] + h;
            let fp = self.eval(&DualJetPoint::from_flat(k, m, &w)?)?;
            w[j] = z[j] - h;
            let fm = self.eval(&DualJetPoint::from_flat(k, m, &w)?)?;
            w[j] = z[j];
            g.push((fp - fm) / (2.0 * h));
        }
        Ok(g.chunks(m).map(<[f64]>::to_vec).collect())
    }

    fn p_hessian(&self, pt: &DualJetPoint) -> Result<DMatrix<f64>> {
        let (_, jac, d) = self.unprimed(pt)?;
        let h = self.base.p_hessian(&d)?;
        Ok(&jac * h * jac.transpose())
    }
}

/// The affine Hamiltonian represented in the chart `x' = T(x)` through the
/// affine change rule. Its gradient is taken by finite differences.
pub fn affine_change_of_chart(h: &AffineHamiltonianModel, t: &ChartTransition) -> Result<AffineHamiltonianModel> {
    Ok(AffineHamiltonianModel::new(
        h.order(),
        h.dim(),
        Arc::new(ChangedChart {
            base: h.clone(),
            forward: t.clone(),
        }),
    )?
    .with_hyperregular(h.is_hyperregular()))
}
