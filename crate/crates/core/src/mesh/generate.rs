use crate::error::{EitError, Result};
use crate::mesh::{BoundaryEdge, BoundaryGeometry, Mesh, BACKGROUND};
use crate::scalar::Real;

/// Node budget used by [`generate_disk_mesh`].
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// Structured polar mesh of the unit disk.
///
/// Ring `i` (radius `i/N`) carries `6i` equally spaced nodes and consecutive
/// rings are stitched by an angular merge. `N` is the smallest power of two
/// not below `1/h`, so halving `h` doubles `N`; for `h < 1/2` the circles of
/// radius 1/4 and 1/2 coincide with mesh rings.
pub fn generate_disk_mesh<T: Real>(target_h: T) -> Result<Mesh<T>> {
    generate_disk_mesh_with_budget(target_h, DEFAULT_NODE_BUDGET)
}

pub fn generate_disk_mesh_with_budget<T: Real>(target_h: T, node_budget: usize) -> Result<Mesh<T>> {
    let h = target_h.as_f64();
    if !(h > 0.0 && h < 1.0) {
        return Err(EitError::Domain(format!("target_h must lie in (0, 1), got {h}")));
    }
    let rings_f = (1.0 / h).ceil();
    if rings_f > 1e6 {
        return Err(EitError::Resource(format!("target_h {h} needs more than 10^6 rings")));
    }
    let rings = (rings_f as usize).next_power_of_two();
    let node_count = 1 + 3 * rings * (rings + 1);
    if node_count > node_budget {
        return Err(EitError::Resource(format!(
            "target_h {h} needs {node_count} nodes, budget is {node_budget}"
        )));
    }

    let ring_start = |i: usize| if i == 0 { 0 } else { 1 + 3 * i * (i - 1) };
    let ring_len = |i: usize| if i == 0 { 1 } else { 6 * i };

    let mut nodes = Vec::with_capacity(node_count);
    nodes.push([T::zero(), T::zero()]);
    for i in 1..=rings {
        let n_i = ring_len(i);
        let r = if i == rings { T::one() } else { T::from_usize_lossy(i) / T::from_usize_lossy(rings) };
        for j in 0..n_i {
            let theta = T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(n_i);
            nodes.push([r * theta.cos(), r * theta.sin()]);
        }
    }

    let mut triangles = Vec::with_capacity(6 * rings * rings);
    for j in 0..6 {
        triangles.push([0, 1 + j, 1 + (j + 1) % 6]);
    }
    for i in 2..=rings {
        let (n_in, n_out) = (ring_len(i - 1), ring_len(i));
        let (s_in, s_out) = (ring_start(i - 1), ring_start(i));
        let inner = |p: usize| s_in + p % n_in;
        let outer = |q: usize| s_out + q % n_out;
        let (mut p, mut q) = (0usize, 0usize);
        while p < n_in || q < n_out {
            // Advance along the ring whose next node has the smaller angle;
            // ties go to the inner ring. Angles are compared exactly.
            let advance_outer = p == n_in || (q < n_out && (q + 1) * n_in < (p + 1) * n_out);
            if advance_outer {
                triangles.push([inner(p), outer(q), outer(q + 1)]);
                q += 1;
            } else {
                triangles.push([inner(p), outer(q), inner(p + 1)]);
                p += 1;
            }
        }
    }

    let n_out = ring_len(rings);
    let s_out = ring_start(rings);
    let boundary_edges = (0..n_out)
        .map(|q| BoundaryEdge { nodes: [s_out + q, s_out + (q + 1) % n_out], on_gamma: true })
        .collect();
    let element_region = vec![BACKGROUND; triangles.len()];
    Mesh::new(nodes, triangles, boundary_edges, element_region, BoundaryGeometry::UnitCircle)
}

/// Structured triangulation of the rectangle `[lo, hi]` with `nx × ny` cells,
/// each split along its lower-left to upper-right diagonal.
pub fn generate_rect_mesh<T: Real>(lo: [T; 2], hi: [T; 2], nx: usize, ny: usize) -> Result<Mesh<T>> {
    if nx == 0 || ny == 0 || !(lo[0] < hi[0] && lo[1] < hi[1]) {
        return Err(EitError::Domain("rectangle mesh needs ordered corners and nx, ny ≥ 1".into()));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = lo[0] + (hi[0] - lo[0]) * T::from_usize_lossy(i) / T::from_usize_lossy(nx);
            let y = lo[1] + (hi[1] - lo[1]) * T::from_usize_lossy(j) / T::from_usize_lossy(ny);
            nodes.push([x, y]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
    let mut push = |a, b| boundary_edges.push(BoundaryEdge { nodes: [a, b], on_gamma: true });
    for i in 0..nx {
        push(id(i, 0), id(i + 1, 0));
    }
    for j in 0..ny {
        push(id(nx, j), id(nx, j + 1));
    }
    for i in (0..nx).rev() {
        push(id(i + 1, ny), id(i, ny));
    }
    for j in (0..ny).rev() {
        push(id(0, j + 1), id(0, j));
    }
    let element_region = vec![BACKGROUND; triangles.len()];
    Mesh::new(nodes, triangles, boundary_edges, element_region, BoundaryGeometry::Polygonal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_disk_geometry() {
        let mesh = generate_disk_mesh(0.5f64).unwrap();
        for p in mesh.nodes() {
            assert!(p[0].hypot(p[1]) <= 1.0 + 1e-12);
        }
        for e in mesh.boundary_edges() {
            for &i in &e.nodes {
                let p = mesh.nodes()[i];
                assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
            }
            assert!(e.on_gamma);
        }
    }

    #[test]
    fn fine_disk_diameter_bound() {
        let mesh = generate_disk_mesh(0.05f64).unwrap();
        assert!(mesh.max_diameter() <= 0.075, "max diameter {}", mesh.max_diameter());
    }

    #[test]
    fn diameter_postcondition_across_h() {
        for &h in &[0.9, 0.5, 0.3, 0.2, 0.13, 0.1, 0.07, 0.03] {
            let mesh = generate_disk_mesh(h).unwrap();
            assert!(mesh.max_diameter() <= 1.5 * h, "h={h}: {}", mesh.max_diameter());
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_disk_mesh(0.1f64).unwrap();
        let b = generate_disk_mesh(0.1f64).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn interface_circles_are_mesh_rings() {
        for h in [0.1f64, 0.05, 0.03, 0.02] {
            let mesh = generate_disk_mesh(h).unwrap();
            for e in 0..mesh.num_elements() {
                let radii: Vec<f64> = mesh.triangles()[e].iter().map(|&i| {
                    let p = mesh.nodes()[i];
                    p[0].hypot(p[1])
                }).collect();
                let (lo, hi) = radii.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
                for c in [0.25, 0.5] {
                    assert!(!(lo < c - 1e-12 && hi > c + 1e-12), "h={h}: element {e} straddles r={c}");
                }
            }
        }
    }

    #[test]
    fn refinement_quadruples_triangles() {
        for h in [0.9f64, 0.5, 0.3, 0.2, 0.13, 0.07, 0.03] {
            let coarse = generate_disk_mesh(h).unwrap();
            let fine = generate_disk_mesh(h / 2.0).unwrap();
            assert!(fine.num_elements() >= 4 * coarse.num_elements(), "h={h}");
        }
    }

    #[test]
    fn area_approaches_pi() {
        let mesh = generate_disk_mesh(0.02f64).unwrap();
        assert!((mesh.total_area() - std::f64::consts::PI).abs() < 2e-3);
    }

    #[test]
    fn node_budget_is_enforced() {
        assert!(matches!(generate_disk_mesh_with_budget(0.01f64, 1000), Err(EitError::Resource(_))));
        assert!(matches!(generate_disk_mesh(0.0f64), Err(EitError::Domain(_))));
        assert!(matches!(generate_disk_mesh(1.0f64), Err(EitError::Domain(_))));
    }

    #[test]
    fn single_precision_disk() {
        let mesh = generate_disk_mesh(0.25f32).unwrap();
        assert!((mesh.total_area() - std::f32::consts::PI).abs() < 0.15);
    }

    #[test]
    fn rectangle_mesh_area() {
        let mesh = generate_rect_mesh([-1.0f64, 0.0], [1.0, 0.5], 8, 4).unwrap();
        assert_eq!(mesh.num_elements(), 64);
        assert!((mesh.total_area() - 1.0).abs() < 1e-14);
        assert_eq!(mesh.boundary_edges().len(), 24);
    }
}
