//! One-dimensional DG discretization in `x` coupled to the velocity basis.

mod assembly;
mod mesh;
mod space;
mod state;

pub use assembly::{
    apply_collision, apply_flux, apply_time_derivative, assemble_weighted_mass, boundary_value, conserved_totals,
    diffuse_boundary_value, evaluate_at, facet_fluxes, nodal_values_of, project_density, specular_boundary_value,
    upwind_trace, WeightedMass,
};
pub use mesh::{Boundaries, BoundaryKind, MaxwellianState, Mesh1D};
pub use space::DgSpace;
pub use state::StateMatrix;
