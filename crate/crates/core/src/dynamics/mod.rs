//! Energy, Hamilton vector field, integration, actions and residuals.

mod action;
mod flow;
mod integrate;
mod residual;

pub use action::{
    action_affine, action_energy, affine_integrand, jet_of_curve, lift_curve_via_section, CotangentCurve, FnSection,
    MomentumSection, PhaseCurve, Quadrature, SampledSection, SectionLift, ZeroSection,
};
pub use flow::{energy, hamilton_rhs, lagrangian_energy, lagrangian_rhs};
pub use integrate::{integrate, IntegratorConfig, Method, Trajectory};
pub use residual::{
    euler_lagrange_residual, hamilton_residual_condensed, ostrogradski_momenta, verify_duality, CondensedResidual,
    DualityReport, TrajectoryStencil,
};
