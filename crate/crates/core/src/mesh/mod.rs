//! Triangular meshes of the unit disk and of axis-aligned rectangles, region
//! tagging, insulating-region removal, admissibility checks and boundary bases.

pub(crate) mod admissibility;
mod basis;
mod carve;
mod generate;
mod io;
mod region;

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

pub use admissibility::{check_admissibility, is_admissible_test_set, AdmissibilityReport};
pub use basis::{build_boundary_basis, BasisKind, BoundaryBasis, BoundarySegment};
pub use carve::carve_insulating;
pub use generate::{
    generate_disk_mesh, generate_disk_mesh_with_budget, generate_rect_mesh, DEFAULT_NODE_BUDGET,
};
pub use io::{read_mesh, write_mesh};
pub use region::{tag_regions, PixelGrid, RegionSpec, TagOutcome};

use crate::error::{EitError, Result};
use crate::linalg::UnionFind;
use crate::scalar::{scalar_bits, Real};

pub type RegionId = u32;

/// Region id of untagged elements.
pub const BACKGROUND: RegionId = 0;

/// Boundary edge oriented so that its triangle lies on the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub on_gamma: bool,
}

/// How boundary integrals measure the outer boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryGeometry {
    /// Outer nodes lie on the unit circle; boundary edges stand for arcs and
    /// are parametrised by angle.
    UnitCircle,
    /// Boundary edges are straight segments.
    Polygonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<T> {
    nodes: Vec<[T; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    element_region: Vec<RegionId>,
    geometry: BoundaryGeometry,
}

impl<T: Real> Mesh<T> {
    /// Builds and validates a mesh. Boundary edges are re-oriented to keep
    /// their triangle on the left.
    pub fn new(
        nodes: Vec<[T; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
        element_region: Vec<RegionId>,
        geometry: BoundaryGeometry,
    ) -> Result<Self> {
        let mut mesh = Self { nodes, triangles, boundary_edges, element_region, geometry };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn nodes(&self) -> &[[T; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn element_region(&self) -> &[RegionId] {
        &self.element_region
    }

    pub fn geometry(&self) -> BoundaryGeometry {
        self.geometry
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn gamma_edges(&self) -> impl Iterator<Item = &BoundaryEdge> + '_ {
        self.boundary_edges.iter().filter(|e| e.on_gamma)
    }

    /// True when every boundary edge belongs to Γ.
    pub fn gamma_is_full_boundary(&self) -> bool {
        self.boundary_edges.iter().all(|e| e.on_gamma)
    }

    pub fn signed_area(&self, e: usize) -> T {
        let [a, b, c] = self.triangles[e].map(|i| self.nodes[i]);
        ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])) * T::lit(0.5)
    }

    pub fn area(&self, e: usize) -> T {
        self.signed_area(e).abs()
    }

    pub fn centroid(&self, e: usize) -> [T; 2] {
        let third = T::one() / T::lit(3.0);
        let [a, b, c] = self.triangles[e].map(|i| self.nodes[i]);
        [(a[0] + b[0] + c[0]) * third, (a[1] + b[1] + c[1]) * third]
    }

    /// Gradients of the three barycentric (P1 hat) functions of element `e`.
    pub fn shape_gradients(&self, e: usize) -> [[T; 2]; 3] {
        let [a, b, c] = self.triangles[e].map(|i| self.nodes[i]);
        let two_area = T::lit(2.0) * self.signed_area(e);
        [
            [(b[1] - c[1]) / two_area, (c[0] - b[0]) / two_area],
            [(c[1] - a[1]) / two_area, (a[0] - c[0]) / two_area],
            [(a[1] - b[1]) / two_area, (b[0] - a[0]) / two_area],
        ]
    }

    /// Largest edge length of element `e`.
    pub fn diameter(&self, e: usize) -> T {
        let p = self.triangles[e].map(|i| self.nodes[i]);
        let d = |x: [T; 2], y: [T; 2]| ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
        d(p[0], p[1]).max(d(p[1], p[2])).max(d(p[2], p[0]))
    }

    pub fn max_diameter(&self) -> T {
        (0..self.num_elements()).fold(T::zero(), |m, e| m.max(self.diameter(e)))
    }

    pub fn total_area(&self) -> T {
        (0..self.num_elements()).map(|e| self.area(e)).sum()
    }

    /// Elements sharing an edge with each element (`None` on the boundary).
    pub fn element_neighbors(&self) -> Vec<[Option<usize>; 3]> {
        let mut owner: HashMap<(usize, usize), usize> = HashMap::with_capacity(self.triangles.len() * 2);
        let mut nbr = vec![[None; 3]; self.triangles.len()];
        for (e, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let key = edge_key(t[k], t[(k + 1) % 3]);
                if let Some(other) = owner.remove(&key) {
                    let ok = (0..3).find(|&m| {
                        let ot: [usize; 3] = self.triangles[other];
                        edge_key(ot[m], ot[(m + 1) % 3]) == key
                    });
                    if let Some(m) = ok {
                        nbr[other][m] = Some(e);
                    }
                    nbr[e][k] = Some(other);
                } else {
                    owner.insert(key, e);
                }
            }
        }
        nbr
    }

    /// Nodes lying on the outer boundary (endpoints of boundary edges that are
    /// not interior holes). For meshes produced by the generators this is the
    /// whole boundary edge list.
    pub fn boundary_node_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.nodes.len()];
        for e in &self.boundary_edges {
            mask[e.nodes[0]] = true;
            mask[e.nodes[1]] = true;
        }
        mask
    }

    /// Returns a copy with Γ restricted to boundary edges whose midpoint
    /// satisfies `keep`.
    pub fn with_gamma(&self, keep: impl Fn([T; 2]) -> bool) -> Result<Self> {
        let mut m = self.clone();
        let half = T::lit(0.5);
        for e in &mut m.boundary_edges {
            let [a, b] = e.nodes.map(|i| self.nodes[i]);
            e.on_gamma = e.on_gamma && keep([(a[0] + b[0]) * half, (a[1] + b[1]) * half]);
        }
        m.check_gamma()?;
        Ok(m)
    }

    pub(crate) fn with_regions(&self, element_region: Vec<RegionId>) -> Self {
        Self { element_region, ..self.clone() }
    }

    /// Stable fingerprint of geometry and tags.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for p in &self.nodes {
            scalar_bits(p[0]).hash(&mut h);
            scalar_bits(p[1]).hash(&mut h);
        }
        self.triangles.hash(&mut h);
        self.boundary_edges.hash(&mut h);
        self.element_region.hash(&mut h);
        self.geometry.hash(&mut h);
        h.finish()
    }

    fn validate(&mut self) -> Result<()> {
        let n = self.nodes.len();
        if self.element_region.len() != self.triangles.len() {
            return Err(EitError::Input(format!(
                "{} region tags for {} triangles",
                self.element_region.len(),
                self.triangles.len()
            )));
        }
        for (e, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= n) {
                return Err(EitError::Input(format!("triangle {e} references a missing node")));
            }
            if !(self.signed_area(e) > T::zero()) {
                return Err(EitError::Input(format!("triangle {e} has non-positive signed area")));
            }
        }
        let mut count: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let entry = count.entry(edge_key(a, b)).or_insert((0, [a, b]));
                entry.0 += 1;
            }
        }
        if let Some((key, _)) = count.iter().find(|(_, v)| v.0 > 2) {
            return Err(EitError::Input(format!("edge {key:?} shared by more than two triangles")));
        }
        let mut seen = HashMap::new();
        for be in &mut self.boundary_edges {
            let key = edge_key(be.nodes[0], be.nodes[1]);
            match count.get(&key) {
                Some(&(1, oriented)) => be.nodes = oriented,
                _ => {
                    return Err(EitError::Input(format!(
                        "boundary edge {:?} is not a boundary edge of the triangulation",
                        be.nodes
                    )))
                }
            }
            if seen.insert(key, ()).is_some() {
                return Err(EitError::Input(format!("boundary edge {:?} listed twice", be.nodes)));
            }
        }
        let boundary_count = count.values().filter(|v| v.0 == 1).count();
        if boundary_count != self.boundary_edges.len() {
            return Err(EitError::Input(format!(
                "triangulation has {boundary_count} boundary edges but {} are listed",
                self.boundary_edges.len()
            )));
        }
        self.check_gamma()
    }

    fn check_gamma(&self) -> Result<()> {
        let gamma: Vec<&BoundaryEdge> = self.gamma_edges().collect();
        if gamma.is_empty() {
            return Err(EitError::Input("Γ is empty: no boundary edge is flagged on_gamma".into()));
        }
        let mut uf = UnionFind::new(self.nodes.len());
        for e in &gamma {
            uf.union(e.nodes[0], e.nodes[1]);
        }
        let root = uf.find(gamma[0].nodes[0]);
        if gamma.iter().any(|e| uf.find(e.nodes[0]) != root) {
            return Err(EitError::Input("Γ is not connected".into()));
        }
        Ok(())
    }
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b { (a, b) } else { (b, a) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_clockwise_triangle() {
        let nodes = vec![[0.0f64, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let edges = vec![
            BoundaryEdge { nodes: [0, 1], on_gamma: true },
            BoundaryEdge { nodes: [1, 2], on_gamma: true },
            BoundaryEdge { nodes: [2, 0], on_gamma: true },
        ];
        let err = Mesh::new(nodes.clone(), vec![[0, 2, 1]], edges.clone(), vec![0], BoundaryGeometry::Polygonal);
        assert!(err.is_err());
        let ok = Mesh::new(nodes, vec![[0, 1, 2]], edges, vec![0], BoundaryGeometry::Polygonal).unwrap();
        assert!((ok.area(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_gamma_is_rejected() {
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let edges = (0..3).map(|k| BoundaryEdge { nodes: [k, (k + 1) % 3], on_gamma: false }).collect();
        assert!(Mesh::new(nodes, vec![[0, 1, 2]], edges, vec![0], BoundaryGeometry::Polygonal).is_err());
    }

    #[test]
    fn shape_gradients_sum_to_zero() {
        let mesh = generate_disk_mesh::<f64>(0.3).unwrap();
        for e in 0..mesh.num_elements() {
            let g = mesh.shape_gradients(e);
            assert!((g[0][0] + g[1][0] + g[2][0]).abs() < 1e-12);
            assert!((g[0][1] + g[1][1] + g[2][1]).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_edges_have_two_neighbors() {
        let mesh = generate_disk_mesh::<f64>(0.25).unwrap();
        let nbr = mesh.element_neighbors();
        let missing: usize = nbr.iter().map(|n| n.iter().filter(|x| x.is_none()).count()).sum();
        assert_eq!(missing, mesh.boundary_edges().len());
    }
}
