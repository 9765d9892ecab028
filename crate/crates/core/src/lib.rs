//! Higher-order Lagrangian mechanics and its affine Hamiltonian dual, in
//! coordinates.
//!
//! Points of `T^kM` carry the normalized jets `y^(a) = x^(a)/a!`. An order-`k`
//! Lagrangian `L(x, y1, .., y^(k))` is paired with a local affine Hamiltonian
//! `H₀(x, y1, .., y^(k-1), p)`; the energy
//! `E = sum_a a p_(a-1)·y^(a) + k H₀` generates the dynamics on
//! `T*T^(k-1)M`.

pub mod curve;
pub mod duality;
pub mod dynamics;
pub mod error;
pub mod fd;
pub mod field;
pub mod jetspace;
pub mod scenarios;
pub mod taylor;
pub mod zermelo;

pub use error::{Error, Result};
