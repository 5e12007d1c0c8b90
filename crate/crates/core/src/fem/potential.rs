use std::io::Write;
use std::path::Path;

use crate::error::{EitError, Result};
use crate::mesh::Mesh;
use crate::scalar::Real;

/// Piecewise linear potential on the nodes of a mesh.
///
/// Nodes outside the computational domain (interior of an insulating
/// region) are not defined until the potential is extended.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<T> {
    pub(crate) values: Vec<T>,
    pub(crate) defined: Vec<bool>,
    pub(crate) coefficients: Vec<T>,
    pub(crate) residual: T,
    pub(crate) mesh_fingerprint: u64,
    pub(crate) extended: bool,
}

impl<T: Real> Potential<T> {
    pub fn from_nodal(mesh: &Mesh<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.num_nodes() {
            return Err(EitError::Input(format!(
                "{} nodal values for a mesh of {} nodes",
                values.len(),
                mesh.num_nodes()
            )));
        }
        Ok(Self {
            defined: vec![true; values.len()],
            values,
            coefficients: Vec::new(),
            residual: T::zero(),
            mesh_fingerprint: mesh.fingerprint(),
            extended: false,
        })
    }

    pub(crate) fn from_options(mesh: &Mesh<T>, nodal: Vec<Option<T>>, coefficients: Vec<T>, residual: T) -> Self {
        Self {
            defined: nodal.iter().map(Option::is_some).collect(),
            values: nodal.into_iter().map(|v| v.unwrap_or_else(T::zero)).collect(),
            coefficients,
            residual,
            mesh_fingerprint: mesh.fingerprint(),
            extended: false,
        }
    }

    /// Nodal values; undefined nodes hold zero.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, node: usize) -> Option<T> {
        self.defined[node].then(|| self.values[node])
    }

    pub fn is_defined(&self, node: usize) -> bool {
        self.defined[node]
    }

    pub fn defined_mask(&self) -> &[bool] {
        &self.defined
    }

    pub fn is_fully_defined(&self) -> bool {
        self.defined.iter().all(|&d| d)
    }

    /// Boundary coefficients of the Neumann data that produced this potential.
    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    /// Relative residual of the discrete system at solve time.
    pub fn residual(&self) -> T {
        self.residual
    }

    /// Whether [`extend_into_insulator`](crate::fem::extend_into_insulator) produced this potential.
    pub fn is_extended(&self) -> bool {
        self.extended
    }

    pub fn mesh_fingerprint(&self) -> u64 {
        self.mesh_fingerprint
    }

    pub fn belongs_to(&self, mesh: &Mesh<T>) -> bool {
        self.values.len() == mesh.num_nodes() && self.mesh_fingerprint == mesh.fingerprint()
    }

    /// Constant gradient on element `e`, if all three of its nodes are defined.
    pub fn element_gradient(&self, mesh: &Mesh<T>, e: usize) -> Option<[T; 2]> {
        let tri = mesh.triangles()[e];
        if !tri.iter().all(|&i| self.defined[i]) {
            return None;
        }
        let g = mesh.shape_gradients(e);
        let mut out = [T::zero(); 2];
        for a in 0..3 {
            out[0] += g[a][0] * self.values[tri[a]];
            out[1] += g[a][1] * self.values[tri[a]];
        }
        Some(out)
    }

    /// Moves a potential computed on `carved` (a sub-mesh with identical node
    /// coordinates) onto the nodes of `full`. Nodes of `full` without a
    /// counterpart stay undefined.
    pub fn lift(&self, carved: &Mesh<T>, full: &Mesh<T>) -> Result<Self> {
        if !self.belongs_to(carved) {
            return Err(EitError::Input("potential was not computed on the given carved mesh".into()));
        }
        let key = |p: [T; 2]| (p[0].as_f64().to_bits(), p[1].as_f64().to_bits());
        let index: std::collections::HashMap<_, usize> =
            full.nodes().iter().enumerate().map(|(i, &p)| (key(p), i)).collect();
        let mut values = vec![T::zero(); full.num_nodes()];
        let mut defined = vec![false; full.num_nodes()];
        for (i, &p) in carved.nodes().iter().enumerate() {
            let j = *index
                .get(&key(p))
                .ok_or_else(|| EitError::Input(format!("carved node {i} at {:?} has no match in the full mesh", p)))?;
            values[j] = self.values[i];
            defined[j] = self.defined[i];
        }
        Ok(Self {
            values,
            defined,
            coefficients: self.coefficients.clone(),
            residual: self.residual,
            mesh_fingerprint: full.fingerprint(),
            extended: false,
        })
    }

    /// `node_index,value` rows for every defined node.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "node_index,value")?;
        for (i, (&v, &d)) in self.values.iter().zip(&self.defined).enumerate() {
            if d {
                writeln!(w, "{i},{v:e}")?;
            }
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(file)
    }
}
