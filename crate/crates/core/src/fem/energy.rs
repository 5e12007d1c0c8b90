use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::fem::conductivity::{ConductivityField, Extreme};
use crate::fem::potential::Potential;
use crate::mesh::{Mesh, RegionSpec};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EnergyWeight {
    /// `∫ ς |∇u|²` with the background conductivity.
    #[default]
    Conductivity,
    /// `∫ |∇u|²`.
    Unit,
}

/// `∫_e |∇u|²` per element, `None` where the potential is undefined.
pub fn element_energies<T: Real>(mesh: &Mesh<T>, potential: &Potential<T>) -> Vec<Option<T>> {
    (0..mesh.num_elements())
        .map(|e| potential.element_gradient(mesh, e).map(|g| mesh.area(e) * (g[0] * g[0] + g[1] * g[1])))
        .collect()
}

/// Dirichlet energy over the elements in `mask`, or over the whole mesh.
///
/// Insulating elements contribute only once the potential has been extended
/// into them; an undefined element elsewhere is an error.
pub fn dirichlet_energy_masked<T: Real>(
    mesh: &Mesh<T>,
    potential: &Potential<T>,
    field: &ConductivityField<T>,
    mask: Option<&[bool]>,
    weight: EnergyWeight,
) -> Result<T> {
    if !potential.belongs_to(mesh) || field.len() != mesh.num_elements() {
        return Err(EitError::Input("potential, field and mesh do not match".into()));
    }
    let mut total = T::zero();
    for (e, density) in element_energies(mesh, potential).into_iter().enumerate() {
        if mask.is_some_and(|m| !m[e]) {
            continue;
        }
        if field.kind(e) == Extreme::Insulating && !potential.is_extended() {
            continue;
        }
        let Some(d) = density else {
            return Err(EitError::Input(format!("potential is undefined on element {e}")));
        };
        total += match weight {
            EnergyWeight::Conductivity => field.background()[e] * d,
            EnergyWeight::Unit => d,
        };
    }
    Ok(total)
}

/// Dirichlet energy over the elements whose centroid lies in `region`.
pub fn dirichlet_energy<T: Real>(
    mesh: &Mesh<T>,
    potential: &Potential<T>,
    field: &ConductivityField<T>,
    region: Option<&RegionSpec<T>>,
    weight: EnergyWeight,
) -> Result<T> {
    let mask = region.map(|r| r.element_mask(mesh));
    dirichlet_energy_masked(mesh, potential, field, mask.as_deref(), weight)
}
