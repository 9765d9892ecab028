use nalgebra::DMatrix;

use super::model::{AffineHamiltonianModel, LagrangianModel};
use crate::error::Result;
use crate::jetspace::{DualJetPoint, ExtendedJetPoint};

/// Models with a vertical hessian at their own kind of point.
pub trait VerticalHessian {
    type Point;
    fn vertical_hessian_at(&self, pt: &Self::Point) -> Result<DMatrix<f64>>;
}

impl VerticalHessian for LagrangianModel {
    type Point = ExtendedJetPoint;
    fn vertical_hessian_at(&self, pt: &ExtendedJetPoint) -> Result<DMatrix<f64>> {
        self.vertical_hessian(pt)
    }
}

impl VerticalHessian for AffineHamiltonianModel {
    type Point = DualJetPoint;
    fn vertical_hessian_at(&self, pt: &DualJetPoint) -> Result<DMatrix<f64>> {
        self.p_hessian(pt)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointRegularity {
    pub determinant: f64,
    /// Ascending eigenvalues of the symmetrised hessian.
    pub eigenvalues: Vec<f64>,
    pub nondegenerate: bool,
    pub positive_definite: bool,
    /// Positivity of the negated hessian.
    pub negative_definite: bool,
    /// Evaluation failure at this point, if any.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    pub points: Vec<PointRegularity>,
    pub min_abs_det: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub all_nondegenerate: bool,
    pub all_positive: bool,
    pub all_negative: bool,
}

/// Relative threshold below which an eigenvalue counts as zero.
const DEGENERACY: f64 = 1e-10;

pub fn analyse_hessian(h: &DMatrix<f64>) -> PointRegularity {
    let sym = (h + h.transpose()) * 0.5;
    let mut eig: Vec<f64> = sym.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let scale = eig.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let nondegenerate = eig.iter().all(|e| e.abs() > DEGENERACY * scale);
    PointRegularity {
        determinant: sym.determinant(),
        positive_definite: nondegenerate && eig.iter().all(|e| *e > 0.0),
        negative_definite: nondegenerate && eig.iter().all(|e| *e < 0.0),
        nondegenerate,
        eigenvalues: eig,
        error: None,
    }
}

/// Determinant and spectrum summary of the vertical hessian at each point.
/// Evaluation failures are recorded per point, never raised.
pub fn regularity_report<M: VerticalHessian>(model: &M, pts: &[M::Point]) -> RegularityReport {
    let points: Vec<PointRegularity> = pts
        .iter()
        .map(|p| match model.vertical_hessian_at(p) {
            Ok(h) => analyse_hessian(&h),
            Err(e) => PointRegularity {
                determinant: f64::NAN,
                eigenvalues: Vec::new(),
                nondegenerate: false,
                positive_definite: false,
                negative_definite: false,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let ok = points.iter().filter(|p| p.error.is_none());
    let min_abs_det = ok.clone().fold(f64::INFINITY, |m, p| m.min(p.determinant.abs()));
    let min_eigenvalue = ok
        .clone()
        .filter_map(|p| p.eigenvalues.first().copied())
        .fold(f64::INFINITY, f64::min);
    let max_eigenvalue = ok
        .filter_map(|p| p.eigenvalues.last().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    RegularityReport {
        all_nondegenerate: points.iter().all(|p| p.nondegenerate),
        all_positive: points.iter().all(|p| p.positive_definite),
        all_negative: points.iter().all(|p| p.negative_definite),
        points,
        min_abs_det,
        min_eigenvalue,
        max_eigenvalue,
    }
}
