//! Kinetic solver in a shifted and scaled velocity frame.
//!
//! Velocity is discretized with a Maxwellian-weighted Lagrange basis on
//! Gauss-Hermite nodes, physical space (1D) with discontinuous Galerkin and
//! upwind fluxes. The distribution is stored in a frame `f(sqrt(T) v + V)`
//! whose fields `V(x)`, `T(x)` are smoothed moments of the solution.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod collision;
pub mod driver;
pub mod error;
mod gauss;
pub mod frame_transform;
pub mod hermite_quadrature;
pub mod legendre;
pub mod linalg;
pub mod scalar;
pub mod smoother;
pub mod spatial_dg;
pub mod time_integrator;
pub mod velocity_space;

pub use error::{KineticError, Result};
pub use scalar::Real;

pub type VelocityBasisF64 = velocity_space::VelocityBasis<f64>;
pub type VelocityBasisF32 = velocity_space::VelocityBasis<f32>;
pub type DgSpaceF64 = spatial_dg::DgSpace<f64>;
pub type DgSpaceF32 = spatial_dg::DgSpace<f32>;
pub type StateMatrixF64 = spatial_dg::StateMatrix<f64>;
pub type StateMatrixF32 = spatial_dg::StateMatrix<f32>;
pub type SolverF64 = time_integrator::Solver<f64>;
pub type SolverF32 = time_integrator::Solver<f32>;
