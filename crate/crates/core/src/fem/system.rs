//! Assembly and solution of the discrete Neumann problem with the mean-free
//! constraint on Γ.

use crate::error::{EitError, Result};
use crate::linalg::{conjugate_gradient, reverse_cuthill_mckee, CsrMatrix, SkylineCholesky, TripletBuilder, UnionFind};
use crate::mesh::Mesh;
use crate::scalar::Real;

/// Envelope entries above which the direct factor is replaced by PCG.
const SKYLINE_BUDGET: usize = 60_000_000;

/// How an element enters the bilinear form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Role<T> {
    /// Removed from the domain.
    Skip,
    /// Ordinary element with conductivity `w`.
    Weight(T),
    /// Part of a perfectly conducting component: its nodes share one unknown.
    Collapse,
}

#[derive(Debug)]
enum Factor<T> {
    Direct(SkylineCholesky<T>),
    Iterative,
}

/// Factored stiffness matrix over the active unknowns.
#[derive(Debug)]
pub(crate) struct FemSystem<T> {
    node_dof: Vec<Option<usize>>,
    ndof: usize,
    matrix: CsrMatrix<T>,
    matrix_norm: T,
    factor: Factor<T>,
}

#[derive(Debug, Clone)]
pub(crate) struct Solution<T> {
    pub dofs: Vec<T>,
    pub residual: T,
}

/// Unit-conductivity element stiffness `∫_e ∇φ_a·∇φ_b`.
pub(crate) fn local_stiffness<T: Real>(mesh: &Mesh<T>, e: usize) -> [[T; 3]; 3] {
    let g = mesh.shape_gradients(e);
    let area = mesh.area(e);
    let mut k = [[T::zero(); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            k[a][b] = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
        }
    }
    k
}

/// Nodal functional `v ↦ Σ_e w_e ∫_e ∇u·∇v` over elements with a weight.
pub(crate) fn apply_stiffness<T: Real>(mesh: &Mesh<T>, roles: &[Role<T>], u: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); mesh.num_nodes()];
    for (e, tri) in mesh.triangles().iter().enumerate() {
        if let Role::Weight(w) = roles[e] {
            let k = local_stiffness(mesh, e);
            for a in 0..3 {
                let s: T = (0..3).map(|b| k[a][b] * u[tri[b]]).sum();
                out[tri[a]] += w * s;
            }
        }
    }
    out
}

impl<T: Real> FemSystem<T> {
    pub fn new(mesh: &Mesh<T>, roles: &[Role<T>]) -> Result<Self> {
        assert_eq!(roles.len(), mesh.num_elements());
        let n = mesh.num_nodes();
        let mut uf = UnionFind::new(n);
        let mut active = vec![false; n];
        let mut collapsed = vec![false; n];
        for (tri, role) in mesh.triangles().iter().zip(roles) {
            match role {
                Role::Skip => {}
                Role::Weight(w) => {
                    if !(w.is_finite() && *w > T::zero()) {
                        return Err(EitError::Input(format!("element conductivity {w} is not in (0, ∞)")));
                    }
                    tri.iter().for_each(|&i| active[i] = true);
                }
                Role::Collapse => {
                    tri.iter().for_each(|&i| {
                        active[i] = true;
                        collapsed[i] = true;
                    });
                    uf.union(tri[0], tri[1]);
                    uf.union(tri[0], tri[2]);
                }
            }
        }
        let mut rep_id = vec![usize::MAX; n];
        let mut natural = vec![None; n];
        let mut ndof = 0;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            let rep = if collapsed[i] { uf.find(i) } else { i };
            if rep_id[rep] == usize::MAX {
                rep_id[rep] = ndof;
                ndof += 1;
            }
            natural[i] = Some(rep_id[rep]);
        }
        if ndof < 2 {
            return Err(EitError::Input("discrete problem has fewer than two unknowns".into()));
        }

        let mut adjacency = vec![Vec::new(); ndof];
        for (tri, role) in mesh.triangles().iter().zip(roles) {
            if let Role::Weight(_) = role {
                for a in 0..3 {
                    for b in 0..3 {
                        let (da, db) = (natural[tri[a]].unwrap(), natural[tri[b]].unwrap());
                        if da != db {
                            adjacency[da].push(db);
                        }
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let perm = reverse_cuthill_mckee(&adjacency);
        let mut inverse = vec![0; ndof];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let node_dof: Vec<Option<usize>> = natural.iter().map(|d| d.map(|d| inverse[d])).collect();

        let mut builder = TripletBuilder::with_capacity(ndof, 9 * mesh.num_elements());
        for (e, (tri, role)) in mesh.triangles().iter().zip(roles).enumerate() {
            if let Role::Weight(w) = *role {
                let k = local_stiffness(mesh, e);
                for a in 0..3 {
                    for b in 0..3 {
                        builder.add(node_dof[tri[a]].unwrap(), node_dof[tri[b]].unwrap(), w * k[a][b]);
                    }
                }
            }
        }
        let matrix = builder.build();
        let matrix_norm = (0..ndof)
            .map(|i| matrix.row(i).map(|(_, v)| v.abs()).sum::<T>())
            .fold(T::zero(), T::max);
        let envelope = SkylineCholesky::envelope_size(&matrix, ndof - 1);
        let factor = if envelope <= SKYLINE_BUDGET {
            Factor::Direct(SkylineCholesky::factor(&matrix, ndof - 1).map_err(|e| {
                EitError::Solver(format!("stiffness matrix is not positive definite after grounding: {e}"))
            })?)
        } else {
            log::info!("envelope of {envelope} entries exceeds budget, using PCG");
            Factor::Iterative
        };
        Ok(Self { node_dof, ndof, matrix, matrix_norm, factor })
    }

    pub fn num_dofs(&self) -> usize {
        self.ndof
    }

    fn gather(&self, nodal: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.ndof];
        for (&d, &v) in self.node_dof.iter().zip(nodal) {
            if let Some(d) = d {
                out[d] += v;
            }
        }
        out
    }

    /// Nodal values of a dof vector; inactive nodes get `None`.
    pub fn scatter(&self, dofs: &[T]) -> Vec<Option<T>> {
        self.node_dof.iter().map(|d| d.map(|d| dofs[d])).collect()
    }

    /// Finds `u` with `K u + λ c = b` and `c·u = 0`, where `b` and `c` are
    /// nodal vectors summed onto the unknowns.
    pub fn solve(&self, load: &[T], constraint: &[T]) -> Result<Solution<T>> {
        let b = self.gather(load);
        let c = self.gather(constraint);
        let c_sum: T = c.iter().copied().sum();
        if !(c_sum.abs() > T::zero()) {
            return Err(EitError::Input("mean constraint does not touch the active domain".into()));
        }
        let lambda = b.iter().copied().sum::<T>() / c_sum;
        let m = self.ndof - 1;
        let mut x: Vec<T> = b.iter().zip(&c).map(|(&bi, &ci)| bi - lambda * ci).collect();
        let rhs_norm = norm(&b).max(T::min_positive_value());
        match &self.factor {
            Factor::Direct(f) => {
                let rhs = x[..m].to_vec();
                f.solve_in_place(&mut x[..m]);
                // one step of iterative refinement on the grounded block
                let r: Vec<T> = {
                    let kx = self.block_matvec(&x[..m], m);
                    rhs.iter().zip(&kx).map(|(&a, &b)| a - b).collect()
                };
                if norm(&r) > T::solve_tolerance() * rhs_norm * T::lit(1e-3) {
                    let mut d = r;
                    f.solve_in_place(&mut d);
                    x[..m].iter_mut().zip(&d).for_each(|(xi, di)| *xi += *di);
                }
            }
            Factor::Iterative => {
                let out = conjugate_gradient(&self.matrix, m, &x[..m], T::solve_tolerance() * T::lit(0.01), 20 * m);
                if !out.converged {
                    return Err(EitError::Solver(format!(
                        "PCG stopped after {} iterations at relative residual {:e}",
                        out.iterations, out.relative_residual
                    )));
                }
                x[..m].copy_from_slice(&out.solution);
            }
        }
        x[m] = T::zero();
        let shift = -c.iter().zip(&x).map(|(&ci, &xi)| ci * xi).sum::<T>() / c_sum;
        x.iter_mut().for_each(|xi| *xi += shift);

        let kx = self.matrix.matvec(&x);
        let r: Vec<T> = (0..self.ndof).map(|i| kx[i] + lambda * c[i] - b[i]).collect();
        let mean = c.iter().zip(&x).map(|(&ci, &xi)| ci * xi).sum::<T>();
        let tiny = T::min_positive_value();
        // normwise backward error of the bordered system
        let scale = self.matrix_norm * norm(&x) + norm(&c) * lambda.abs() + rhs_norm;
        let residual = (norm(&r) / scale.max(tiny)).max(mean.abs() / (norm(&c) * norm(&x)).max(tiny));
        if !(residual <= T::solve_tolerance()) {
            return Err(EitError::Solver(format!(
                "relative residual {residual:e} exceeds {:e}",
                T::solve_tolerance()
            )));
        }
        Ok(Solution { dofs: x, residual })
    }

    fn block_matvec(&self, x: &[T], m: usize) -> Vec<T> {
        (0..m).map(|i| self.matrix.row(i).filter(|&(j, _)| j < m).map(|(j, v)| v * x[j]).sum()).collect()
    }
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_boundary_basis, generate_disk_mesh, BasisKind};

    #[test]
    fn mode_one_on_homogeneous_disk() {
        let mesh = generate_disk_mesh(0.05f64).unwrap();
        let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 1 }).unwrap();
        let roles = vec![Role::Weight(1.0); mesh.num_elements()];
        let sys = FemSystem::new(&mesh, &roles).unwrap();
        let sol = sys.solve(&basis.unit_load(0), &basis.boundary_mass()).unwrap();
        let u: Vec<f64> = sys.scatter(&sol.dofs).into_iter().map(Option::unwrap).collect();
        let pi = std::f64::consts::PI;
        for (p, &v) in mesh.nodes().iter().zip(&u) {
            assert!((v - p[0] / pi.sqrt()).abs() < 5e-3, "{v} at {p:?}");
        }
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn collapsed_component_is_constant() {
        let mesh = generate_disk_mesh(0.1f64).unwrap();
        let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 2 }).unwrap();
        let roles: Vec<Role<f64>> = (0..mesh.num_elements())
            .map(|e| {
                let c = mesh.centroid(e);
                if c[0].hypot(c[1]) < 0.5 { Role::Collapse } else { Role::Weight(1.0) }
            })
            .collect();
        let sys = FemSystem::new(&mesh, &roles).unwrap();
        let sol = sys.solve(&basis.unit_load(0), &basis.boundary_mass()).unwrap();
        let u = sys.scatter(&sol.dofs);
        let inner: Vec<f64> = mesh
            .nodes()
            .iter()
            .zip(&u)
            .filter(|(p, _)| p[0].hypot(p[1]) < 0.49)
            .map(|(_, v)| v.unwrap())
            .collect();
        assert!(inner.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn apply_stiffness_matches_energy() {
        let mesh = generate_disk_mesh(0.2f64).unwrap();
        let roles = vec![Role::Weight(2.0); mesh.num_elements()];
        let u: Vec<f64> = mesh.nodes().iter().map(|p| p[0]).collect();
        let ku = apply_stiffness(&mesh, &roles, &u);
        let energy: f64 = ku.iter().zip(&u).map(|(a, b)| a * b).sum();
        assert!((energy - 2.0 * mesh.total_area()).abs() < 1e-12);
        let ones = vec![1.0; mesh.num_nodes()];
        assert!(apply_stiffness(&mesh, &roles, &ones).iter().all(|v| v.abs() < 1e-12));
    }
}
