use crate::linalg::UnionFind;
use crate::mesh::{Mesh, RegionSpec};
use crate::scalar::Real;

/// Discrete check of the geometric assumptions on the extreme inclusions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdmissibilityReport {
    /// No element, and no node, is shared between `C₀` and `C∞`.
    pub disjoint: bool,
    /// The elements outside `C₀` form one edge-connected component.
    pub complement_connected: bool,
    /// No `C₀` or `C∞` element touches the outer boundary.
    pub strictly_interior: bool,
}

impl AdmissibilityReport {
    pub fn all_true(&self) -> bool {
        self.disjoint && self.complement_connected && self.strictly_interior
    }

    pub fn describe_failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.disjoint {
            out.push("C₀ and C∞ intersect");
        }
        if !self.complement_connected {
            out.push("Ω ∖ C₀ is not connected");
        }
        if !self.strictly_interior {
            out.push("an extreme inclusion touches ∂Ω");
        }
        out
    }
}

pub fn check_admissibility<T: Real>(c0: &RegionSpec<T>, cinf: &RegionSpec<T>, mesh: &Mesh<T>) -> AdmissibilityReport {
    let m0 = c0.element_mask(mesh);
    let minf = cinf.element_mask(mesh);
    check_masks(mesh, &m0, &minf)
}

pub(crate) fn check_masks<T: Real>(mesh: &Mesh<T>, m0: &[bool], minf: &[bool]) -> AdmissibilityReport {
    let mut node_in0 = vec![false; mesh.num_nodes()];
    let mut node_inf = vec![false; mesh.num_nodes()];
    for (e, t) in mesh.triangles().iter().enumerate() {
        for &i in t {
            node_in0[i] |= m0[e];
            node_inf[i] |= minf[e];
        }
    }
    let disjoint = (0..mesh.num_nodes()).all(|i| !(node_in0[i] && node_inf[i]));
    let on_boundary = mesh.boundary_node_mask();
    let strictly_interior = (0..mesh.num_nodes()).all(|i| !(on_boundary[i] && (node_in0[i] || node_inf[i])));
    let outside: Vec<bool> = m0.iter().map(|&x| !x).collect();
    AdmissibilityReport { disjoint, complement_connected: mask_connected(mesh, &outside), strictly_interior }
}

/// Whether the elements selected by `mask` are nonempty and edge-connected.
pub(crate) fn mask_connected<T: Real>(mesh: &Mesh<T>, mask: &[bool]) -> bool {
    let Some(first) = mask.iter().position(|&m| m) else {
        return false;
    };
    let mut uf = UnionFind::new(mesh.num_elements());
    for (e, nb) in mesh.element_neighbors().iter().enumerate() {
        if mask[e] {
            for &m in nb.iter().flatten() {
                if mask[m] {
                    uf.union(e, m);
                }
            }
        }
    }
    let root = uf.find(first);
    (0..mesh.num_elements()).all(|e| !mask[e] || uf.find(e) == root)
}

/// Membership of a test set in the admissible family: it tags at least one
/// element, stays away from `∂Ω` and has a connected complement.
pub fn is_admissible_test_set<T: Real>(c: &RegionSpec<T>, mesh: &Mesh<T>) -> bool {
    let mask = c.element_mask(mesh);
    if !mask.iter().any(|&m| m) {
        return false;
    }
    let none = vec![false; mask.len()];
    let report = check_masks(mesh, &mask, &none);
    report.complement_connected && report.strictly_interior
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_disk_mesh;

    #[test]
    fn separated_disks_are_admissible() {
        let mesh = generate_disk_mesh(0.05f64).unwrap();
        let r = check_admissibility(&RegionSpec::disk(-0.4, 0.0, 0.2), &RegionSpec::disk(0.4, 0.0, 0.2), &mesh);
        assert!(r.all_true(), "{r:?}");
    }

    #[test]
    fn identical_disks_are_not_disjoint() {
        let mesh = generate_disk_mesh(0.05f64).unwrap();
        let d = RegionSpec::disk(0.0, 0.0, 0.3);
        assert!(!check_admissibility(&d, &d, &mesh).disjoint);
    }

    #[test]
    fn boundary_contact_detected() {
        let mesh = generate_disk_mesh(0.05f64).unwrap();
        let r = check_admissibility(&RegionSpec::disk(0.9, 0.0, 0.2), &RegionSpec::Empty, &mesh);
        assert!(!r.strictly_interior);
    }

    #[test]
    fn empty_sets_are_admissible() {
        let mesh = generate_disk_mesh(0.2f64).unwrap();
        assert!(check_admissibility(&RegionSpec::Empty, &RegionSpec::Empty, &mesh).all_true());
    }

    #[test]
    fn test_set_membership() {
        let mesh = generate_disk_mesh(0.05f64).unwrap();
        assert!(is_admissible_test_set(&RegionSpec::disk(0.0, 0.0, 0.6), &mesh));
        assert!(!is_admissible_test_set(&RegionSpec::Empty, &mesh));
        let ring = RegionSpec::AnnularSector {
            center: [0.0, 0.0],
            r_inner: 0.2,
            r_outer: 0.4,
            theta_start: 0.0,
            theta_end: 7.0,
        };
        // The hole of a ring is cut off from the rest of the complement.
        assert!(!is_admissible_test_set(&ring, &mesh));
    }
}
