//! Lagrangian and affine Hamiltonian models, the Legendre maps between them
//! and the dual constructions.

mod charts;
mod dual;
mod model;
mod newton;
mod regularity;
mod section;

pub use charts::{affine_change_of_chart, pullback_lagrangian};
pub use dual::{
    dual_affine_hamiltonian, dual_lagrangian, fenchel_h0, legendre_inverse, legendre_map, legendre_star_map,
    DualHamiltonianOracle, DualLagrangianOracle, FenchelResult,
};
pub(crate) use model::fd_jacobian_of;
pub use model::{
    AffineHamiltonianModel, FieldHamiltonian, FieldLagrangian, HamiltonianOracle, LagrangianModel, LagrangianOracle,
    VectorialHamiltonian,
};
pub use newton::{newton_solve, InitialGuess, NewtonConfig, SearchBox};
pub use regularity::{analyse_hessian, regularity_report, PointRegularity, RegularityReport, VerticalHessian};
pub use section::{affine_from_vectorial, recover_section, vectorial_from_affine, AffineSection};
