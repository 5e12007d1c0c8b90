//! Finite element forward solver for conductivities with insulating and perfectly conducting inclusions.

mod conductivity;
mod energy;
mod extension;
mod forward;
mod frechet;
mod potential;
mod projection;
pub(crate) mod system;

pub use conductivity::{truncated_conductivity, ConductivityField, Extreme};
pub use energy::{dirichlet_energy, dirichlet_energy_masked, element_energies, EnergyWeight};
pub use extension::extend_into_insulator;
pub use forward::{compute_nd_map, solve_forward, ForwardSolver, NdMap};
pub use frechet::{frechet_form, BackgroundGradients};
pub use potential::Potential;
pub use projection::solve_via_projection;
