use crate::error::{EitError, Result};
use crate::fem::conductivity::{ConductivityField, Extreme};
use crate::fem::potential::Potential;
use crate::fem::system::local_stiffness;
use crate::linalg::{reverse_cuthill_mckee, SkylineCholesky, TripletBuilder};
use crate::mesh::Mesh;
use crate::scalar::Real;

/// Extends a potential defined off the insulating region into it by solving
/// `∇·(ς∇v) = 0` in each insulating component with the potential's trace as
/// Dirichlet data.
pub fn extend_into_insulator<T: Real>(
    mesh: &Mesh<T>,
    potential: &Potential<T>,
    field: &ConductivityField<T>,
) -> Result<Potential<T>> {
    if !potential.belongs_to(mesh) {
        return Err(EitError::Input(
            "potential nodes do not match the full mesh; lift it from the carved mesh first".into(),
        ));
    }
    if field.len() != mesh.num_elements() {
        return Err(EitError::Input("field does not match the mesh".into()));
    }
    let n = mesh.num_nodes();
    for (e, tri) in mesh.triangles().iter().enumerate() {
        if field.kind(e) != Extreme::Insulating && tri.iter().any(|&i| !potential.is_defined(i)) {
            return Err(EitError::Input(format!("potential is undefined on element {e} outside the insulating region")));
        }
    }
    let mut unknown = vec![usize::MAX; n];
    let mut order = Vec::new();
    for (i, slot) in unknown.iter_mut().enumerate() {
        if !potential.is_defined(i) {
            *slot = order.len();
            order.push(i);
        }
    }
    let mut out = potential.clone();
    out.extended = true;
    if order.is_empty() {
        return Ok(out);
    }
    let m = order.len();
    let mut adjacency = vec![Vec::new(); m];
    for (e, tri) in mesh.triangles().iter().enumerate() {
        if field.kind(e) != Extreme::Insulating {
            continue;
        }
        for &a in tri {
            for &b in tri {
                if a != b && unknown[a] != usize::MAX && unknown[b] != usize::MAX {
                    adjacency[unknown[a]].push(unknown[b]);
                }
            }
        }
    }
    for l in &mut adjacency {
        l.sort_unstable();
        l.dedup();
    }
    let perm = reverse_cuthill_mckee(&adjacency);
    let mut pos = vec![0; m];
    for (new, &old) in perm.iter().enumerate() {
        pos[old] = new;
    }
    let mut builder = TripletBuilder::new(m);
    let mut rhs = vec![T::zero(); m];
    for (e, tri) in mesh.triangles().iter().enumerate() {
        if field.kind(e) != Extreme::Insulating {
            continue;
        }
        let w = field.background()[e];
        let k = local_stiffness(mesh, e);
        for a in 0..3 {
            let ua = unknown[tri[a]];
            if ua == usize::MAX {
                continue;
            }
            for b in 0..3 {
                let ub = unknown[tri[b]];
                if ub == usize::MAX {
                    rhs[pos[ua]] -= w * k[a][b] * potential.values()[tri[b]];
                } else {
                    builder.add(pos[ua], pos[ub], w * k[a][b]);
                }
            }
        }
    }
    let matrix = builder.build();
    let factor = SkylineCholesky::factor(&matrix, m)
        .map_err(|e| EitError::Solver(format!("extension problem is singular: {e}")))?;
    factor.solve_in_place(&mut rhs);
    for (u, &node) in order.iter().enumerate() {
        out.values[node] = rhs[pos[u]];
        out.defined[node] = true;
    }
    Ok(out)
}
