use crate::error::Result;
use crate::fem::conductivity::{ConductivityField, Extreme};
use crate::fem::forward::check_basis;
use crate::fem::potential::Potential;
use crate::fem::system::{apply_stiffness, FemSystem, Role};
use crate::mesh::{BoundaryBasis, Mesh};
use crate::scalar::Real;

/// Computes `u_{ς,C₀,C∞}` from the background potential `u_ς`: first the
/// ς-energy-orthogonal correction on the carved domain, then the orthogonal
/// projection onto functions constant on each conducting component.
///
/// Agrees with [`solve_forward`](crate::fem::solve_forward) up to solver
/// tolerance; it exists as an independent route to the same potential.
pub fn solve_via_projection<T: Real>(
    mesh: &Mesh<T>,
    field: &ConductivityField<T>,
    basis: &BoundaryBasis<T>,
    coeffs: &[T],
) -> Result<Potential<T>> {
    field.check(mesh)?;
    check_basis(mesh, basis)?;
    let load = basis.load_vector(coeffs)?;
    let mass = basis.boundary_mass();
    let sigma = field.background();

    let full: Vec<Role<T>> = sigma.iter().map(|&s| Role::Weight(s)).collect();
    let full_sys = FemSystem::new(mesh, &full)?;
    let u_bg: Vec<T> =
        full_sys.scatter(&full_sys.solve(&load, &mass)?.dofs).into_iter().map(|v| v.expect("full mesh")).collect();

    let carved: Vec<Role<T>> = sigma
        .iter()
        .zip(field.kinds())
        .map(|(&s, k)| if *k == Extreme::Insulating { Role::Skip } else { Role::Weight(s) })
        .collect();
    let carved_sys = FemSystem::new(mesh, &carved)?;
    let u_hat: Vec<Option<T>> = if field.mask_of(Extreme::Insulating).iter().any(|&b| b) {
        let flux = apply_stiffness(mesh, &carved, &u_bg);
        let rhs: Vec<T> = flux.iter().zip(&load).map(|(&a, &b)| a - b).collect();
        let w = carved_sys.scatter(&carved_sys.solve(&rhs, &mass)?.dofs);
        w.into_iter().zip(&u_bg).map(|(w, &u)| w.map(|w| u - w)).collect()
    } else {
        u_bg.into_iter().map(Some).collect()
    };

    let reduced: Vec<Role<T>> = sigma
        .iter()
        .zip(field.kinds())
        .map(|(&s, k)| match k {
            Extreme::Finite => Role::Weight(s),
            Extreme::Insulating => Role::Skip,
            Extreme::Conducting => Role::Collapse,
        })
        .collect();
    let dense: Vec<T> = u_hat.iter().map(|v| v.unwrap_or_else(T::zero)).collect();
    let rhs = apply_stiffness(mesh, &carved, &dense);
    let reduced_sys = FemSystem::new(mesh, &reduced)?;
    let sol = reduced_sys.solve(&rhs, &mass)?;
    Ok(Potential::from_options(mesh, reduced_sys.scatter(&sol.dofs), coeffs.to_vec(), sol.residual))
}
