use std::collections::HashMap;

use crate::error::{EitError, Result};
use crate::linalg::UnionFind;
use crate::mesh::{edge_key, BoundaryEdge, Mesh, RegionId};
use crate::scalar::Real;

/// Removes the elements tagged `c0_id`, leaving a mesh of `Ω ∖ C₀`.
///
/// Orphaned nodes are dropped (remaining nodes keep their relative order).
/// Edges exposed by the removal become boundary edges with `on_gamma = false`,
/// which imposes the homogeneous Neumann condition on `∂C₀`.
pub fn carve_insulating<T: Real>(mesh: &Mesh<T>, c0_id: RegionId) -> Result<Mesh<T>> {
    let keep: Vec<bool> = mesh.element_region().iter().map(|&r| r != c0_id).collect();
    if keep.iter().all(|&k| k) {
        return Ok(mesh.clone());
    }
    if !keep.iter().any(|&k| k) {
        return Err(EitError::Admissibility("carving removes every element".into()));
    }

    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (e, t) in mesh.triangles().iter().enumerate() {
        for k in 0..3 {
            owner.entry(edge_key(t[k], t[(k + 1) % 3])).or_insert(e);
        }
    }
    for be in mesh.gamma_edges() {
        let e = owner[&edge_key(be.nodes[0], be.nodes[1])];
        if !keep[e] {
            return Err(EitError::Admissibility(format!(
                "insulating region {c0_id} touches Γ at edge {:?}",
                be.nodes
            )));
        }
    }

    let neighbors = mesh.element_neighbors();
    let mut uf = UnionFind::new(mesh.num_elements());
    for (e, nb) in neighbors.iter().enumerate() {
        if keep[e] {
            for m in nb.iter().flatten() {
                if keep[*m] {
                    uf.union(e, *m);
                }
            }
        }
    }
    let first_kept = keep.iter().position(|&k| k).expect("some element kept");
    let root = uf.find(first_kept);
    if (0..mesh.num_elements()).any(|e| keep[e] && uf.find(e) != root) {
        return Err(EitError::Admissibility(format!(
            "removing region {c0_id} disconnects the domain (Ω ∖ C₀ must be connected)"
        )));
    }

    let mut new_index = vec![usize::MAX; mesh.num_nodes()];
    let mut used = vec![false; mesh.num_nodes()];
    for (e, t) in mesh.triangles().iter().enumerate() {
        if keep[e] {
            t.iter().for_each(|&i| used[i] = true);
        }
    }
    let mut nodes = Vec::new();
    for (i, &u) in used.iter().enumerate() {
        if u {
            new_index[i] = nodes.len();
            nodes.push(mesh.nodes()[i]);
        }
    }

    let mut triangles = Vec::new();
    let mut regions = Vec::new();
    for (e, t) in mesh.triangles().iter().enumerate() {
        if keep[e] {
            triangles.push(t.map(|i| new_index[i]));
            regions.push(mesh.element_region()[e]);
        }
    }

    let mut boundary_edges: Vec<BoundaryEdge> = mesh
        .boundary_edges()
        .iter()
        .filter(|be| keep[owner[&edge_key(be.nodes[0], be.nodes[1])]])
        .map(|be| BoundaryEdge { nodes: be.nodes.map(|i| new_index[i]), on_gamma: be.on_gamma })
        .collect();
    for (e, nb) in neighbors.iter().enumerate() {
        if !keep[e] {
            continue;
        }
        let t = mesh.triangles()[e];
        for k in 0..3 {
            if let Some(m) = nb[k] {
                if !keep[m] {
                    boundary_edges.push(BoundaryEdge {
                        nodes: [new_index[t[k]], new_index[t[(k + 1) % 3]]],
                        on_gamma: false,
                    });
                }
            }
        }
    }
    Mesh::new(nodes, triangles, boundary_edges, regions, mesh.geometry())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_disk_mesh, tag_regions, RegionSpec};

    #[test]
    fn annulus_from_centered_disk() {
        let mesh = generate_disk_mesh(0.1f64).unwrap();
        let tagged = tag_regions(&mesh, &[(1, RegionSpec::disk(0.0, 0.0, 0.5))]).unwrap().mesh;
        let carved = carve_insulating(&tagged, 1).unwrap();
        assert!(carved.num_nodes() < tagged.num_nodes());
        let gamma_before: Vec<_> = tagged.gamma_edges().map(|e| e.nodes.map(|i| tagged.nodes()[i])).collect();
        let gamma_after: Vec<_> = carved.gamma_edges().map(|e| e.nodes.map(|i| carved.nodes()[i])).collect();
        assert_eq!(gamma_before, gamma_after);
        assert!(carved.boundary_edges().iter().any(|e| !e.on_gamma));
        let hole = std::f64::consts::PI * 0.25;
        assert!((tagged.total_area() - carved.total_area() - hole).abs() < 0.02);
    }

    #[test]
    fn carving_nothing_is_identity() {
        let mesh = generate_disk_mesh(0.2f64).unwrap();
        assert_eq!(carve_insulating(&mesh, 7).unwrap(), mesh);
    }

    #[test]
    fn carving_is_idempotent() {
        let mesh = generate_disk_mesh(0.1f64).unwrap();
        let tagged = tag_regions(&mesh, &[(2, RegionSpec::disk(0.3, 0.1, 0.25))]).unwrap().mesh;
        let once = carve_insulating(&tagged, 2).unwrap();
        let twice = carve_insulating(&once, 2).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn annulus_region_disconnects() {
        let mesh = generate_disk_mesh(0.05f64).unwrap();
        let ring = RegionSpec::AnnularSector {
            center: [0.0, 0.0],
            r_inner: 0.3,
            r_outer: 0.5,
            theta_start: -std::f64::consts::PI,
            theta_end: std::f64::consts::PI,
        };
        let tagged = tag_regions(&mesh, &[(1, ring)]).unwrap().mesh;
        assert!(matches!(carve_insulating(&tagged, 1), Err(EitError::Admissibility(_))));
    }

    #[test]
    fn touching_gamma_is_rejected() {
        let mesh = generate_disk_mesh(0.1f64).unwrap();
        let tagged = tag_regions(&mesh, &[(1, RegionSpec::disk(1.0, 0.0, 0.3))]).unwrap().mesh;
        assert!(matches!(carve_insulating(&tagged, 1), Err(EitError::Admissibility(_))));
    }
}
