use crate::error::{EitError, Result};
use crate::fem::conductivity::ConductivityField;
use crate::fem::forward::ForwardSolver;
use crate::linalg::DenseMatrix;
use crate::mesh::{BoundaryBasis, Mesh, RegionSpec};
use crate::scalar::Real;

/// Element gradients of the background potentials `u_j` of every basis
/// function, used to evaluate `⟨Λ'(γ₀)[χ_B] f_j, f_k⟩` for many `B`.
#[derive(Debug, Clone)]
pub struct BackgroundGradients<T> {
    areas: Vec<T>,
    grads: Vec<Vec<[T; 2]>>,
}

impl<T: Real> BackgroundGradients<T> {
    pub fn compute(mesh: &Mesh<T>, gamma0: &ConductivityField<T>, basis: &BoundaryBasis<T>) -> Result<Self> {
        if gamma0.has_extremes() {
            return Err(EitError::Input("linearization needs a finite background conductivity".into()));
        }
        let potentials = ForwardSolver::new(mesh, gamma0, basis)?.basis_potentials()?;
        let grads = potentials
            .iter()
            .map(|u| (0..mesh.num_elements()).map(|e| u.element_gradient(mesh, e).expect("fully defined")).collect())
            .collect();
        Ok(Self { areas: (0..mesh.num_elements()).map(|e| mesh.area(e)).collect(), grads })
    }

    pub fn basis_len(&self) -> usize {
        self.grads.len()
    }

    /// `−∫_B ∇u_j·∇u_k` for the elements flagged in `mask`.
    pub fn matrix(&self, mask: &[bool]) -> DenseMatrix<T> {
        let m = self.grads.len();
        let mut out = DenseMatrix::zeros(m, m);
        for (e, _) in mask.iter().enumerate().filter(|(_, &b)| b) {
            let a = self.areas[e];
            for j in 0..m {
                let gj = self.grads[j][e];
                for k in j..m {
                    let gk = self.grads[k][e];
                    out[(j, k)] -= a * (gj[0] * gk[0] + gj[1] * gk[1]);
                }
            }
        }
        for j in 0..m {
            for k in 0..j {
                out[(j, k)] = out[(k, j)];
            }
        }
        out
    }
}

/// Matrix of the Fréchet derivative `Λ'(γ₀)[χ_B]` in `basis`.
///
/// A region containing no element centroid yields the zero matrix and a
/// logged warning.
pub fn frechet_form<T: Real>(
    mesh: &Mesh<T>,
    gamma0: &ConductivityField<T>,
    region: &RegionSpec<T>,
    basis: &BoundaryBasis<T>,
) -> Result<DenseMatrix<T>> {
    region.validate()?;
    let mask = region.element_mask(mesh);
    if !mask.iter().any(|&b| b) {
        log::warn!("Fréchet region contains no elements; the form is zero");
        return Ok(DenseMatrix::zeros(basis.len(), basis.len()));
    }
    Ok(BackgroundGradients::compute(mesh, gamma0, basis)?.matrix(&mask))
}
