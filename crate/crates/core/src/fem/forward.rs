use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{EitError, Result};
use crate::fem::conductivity::{ConductivityField, Extreme};
use crate::fem::potential::Potential;
use crate::fem::system::{FemSystem, Role};
use crate::linalg::DenseMatrix;
use crate::mesh::{BoundaryBasis, Mesh};
use crate::scalar::Real;

pub(crate) fn roles_of<T: Real>(field: &ConductivityField<T>) -> Vec<Role<T>> {
    field
        .background()
        .iter()
        .zip(field.kinds())
        .map(|(&b, k)| match k {
            Extreme::Finite => Role::Weight(b),
            Extreme::Insulating => Role::Skip,
            Extreme::Conducting => Role::Collapse,
        })
        .collect()
}

pub(crate) fn check_basis<T: Real>(mesh: &Mesh<T>, basis: &BoundaryBasis<T>) -> Result<()> {
    if basis.num_nodes() != mesh.num_nodes() {
        return Err(EitError::Input("boundary basis was built for a different mesh".into()));
    }
    Ok(())
}

/// Factored forward problem for one conductivity, reused across boundary data.
#[derive(Debug)]
pub struct ForwardSolver<'a, T> {
    mesh: &'a Mesh<T>,
    basis: &'a BoundaryBasis<T>,
    system: FemSystem<T>,
    mass: Vec<T>,
    field_fingerprint: u64,
}

impl<'a, T: Real> ForwardSolver<'a, T> {
    pub fn new(mesh: &'a Mesh<T>, field: &ConductivityField<T>, basis: &'a BoundaryBasis<T>) -> Result<Self> {
        field.check(mesh)?;
        check_basis(mesh, basis)?;
        let system = FemSystem::new(mesh, &roles_of(field))?;
        Ok(Self { mesh, basis, system, mass: basis.boundary_mass(), field_fingerprint: field.fingerprint() })
    }

    pub fn num_dofs(&self) -> usize {
        self.system.num_dofs()
    }

    /// Potential for Neumann data `Σ coeffs[j] f_j`, mean-free on Γ.
    pub fn solve(&self, coeffs: &[T]) -> Result<Potential<T>> {
        let load = self.basis.load_vector(coeffs)?;
        self.solve_load(&load, coeffs.to_vec())
    }

    pub(crate) fn solve_load(&self, load: &[T], coeffs: Vec<T>) -> Result<Potential<T>> {
        let sol = self.system.solve(load, &self.mass)?;
        Ok(Potential::from_options(self.mesh, self.system.scatter(&sol.dofs), coeffs, sol.residual))
    }

    /// Potentials for every basis function.
    pub fn basis_potentials(&self) -> Result<Vec<Potential<T>>> {
        (0..self.basis.len())
            .map(|j| {
                let mut c = vec![T::zero(); self.basis.len()];
                c[j] = T::one();
                self.solve(&c)
            })
            .collect()
    }

    /// Galerkin Neumann-to-Dirichlet matrix `⟨Λ f_k, f_j⟩`.
    pub fn nd_map(&self) -> Result<NdMap<T>> {
        let potentials = self.basis_potentials()?;
        let m = self.basis.len();
        let mut raw = DenseMatrix::zeros(m, m);
        for (k, u) in potentials.iter().enumerate() {
            for (j, v) in self.basis.trace_pairing(u.values()).into_iter().enumerate() {
                raw[(j, k)] = v;
            }
        }
        let (matrix, sym_defect) = raw.symmetrized();
        if sym_defect > T::lit(1e3) * T::epsilon().sqrt() {
            log::warn!("ND matrix asymmetry {sym_defect:e} is unusually large");
        }
        Ok(NdMap {
            matrix,
            basis: self.basis.descriptor(),
            sym_defect,
            field_fingerprint: self.field_fingerprint,
            mesh_fingerprint: self.mesh.fingerprint(),
        })
    }
}

/// Potential `u_σ` for Neumann data `Σ coeffs[j] f_j`.
pub fn solve_forward<T: Real>(
    mesh: &Mesh<T>,
    field: &ConductivityField<T>,
    basis: &BoundaryBasis<T>,
    coeffs: &[T],
) -> Result<Potential<T>> {
    ForwardSolver::new(mesh, field, basis)?.solve(coeffs)
}

/// Galerkin matrix of the Neumann-to-Dirichlet map in `basis`.
pub fn compute_nd_map<T: Real>(mesh: &Mesh<T>, field: &ConductivityField<T>, basis: &BoundaryBasis<T>) -> Result<NdMap<T>> {
    ForwardSolver::new(mesh, field, basis)?.nd_map()
}

/// Symmetrized ND matrix together with what it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct NdMap<T> {
    pub matrix: DenseMatrix<T>,
    pub basis: String,
    /// `‖A − Aᵀ‖_F / ‖A‖_F` of the matrix before symmetrization.
    pub sym_defect: T,
    pub field_fingerprint: u64,
    pub mesh_fingerprint: u64,
}

impl<T: Real> NdMap<T> {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `self − other`, failing when the two were taken in different bases.
    pub fn difference(&self, other: &NdMap<T>) -> Result<DenseMatrix<T>> {
        if self.basis != other.basis {
            return Err(EitError::Input(format!("ND maps in bases {} and {} cannot be compared", self.basis, other.basis)));
        }
        self.matrix.sub(&other.matrix)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# basis={} m={} sym_defect={:e}", self.basis, self.dim(), self.sym_defect)?;
        for i in 0..self.dim() {
            let row: Vec<String> = self.matrix.row(i).iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    /// Reads a matrix written by [`NdMap::write_csv`]. Fingerprints are not stored and read back as zero.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| EitError::Input("empty ND csv".into()))??;
        let mut basis = None;
        let mut m = None;
        let mut sym_defect = None;
        for tok in header.trim_start_matches('#').split_whitespace() {
            match tok.split_once('=') {
                Some(("basis", v)) => basis = Some(v.to_string()),
                Some(("m", v)) => m = v.parse::<usize>().ok(),
                Some(("sym_defect", v)) => sym_defect = v.parse::<f64>().ok(),
                _ => {}
            }
        }
        let (basis, m, sym_defect) = match (basis, m, sym_defect) {
            (Some(b), Some(m), Some(s)) => (b, m, s),
            _ => return Err(EitError::Input(format!("malformed ND csv header: {header}"))),
        };
        let mut rows = Vec::with_capacity(m);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| EitError::Input(format!("malformed ND csv row: {e}")))?;
            rows.push(row.into_iter().map(T::lit).collect::<Vec<T>>());
        }
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(EitError::Input(format!("ND csv does not hold a {m}×{m} matrix")));
        }
        Ok(Self {
            matrix: DenseMatrix::from_rows(&rows)?,
            basis,
            sym_defect: T::lit(sym_defect),
            field_fingerprint: 0,
            mesh_fingerprint: 0,
        })
    }
}
