use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::fem::{compute_nd_map, BackgroundGradients, ConductivityField, NdMap};
use crate::linalg::DenseMatrix;
use crate::mesh::{BoundaryBasis, Mesh, PixelGrid};
use crate::monotonicity::config::{TestConfig, TestMode};
use crate::monotonicity::loewner::{loewner_test, LoewnerOutcome};
use crate::monotonicity::result::ReconstructionResult;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefinitePipeline {
    Linearized,
    Nonlinear,
}

fn same_basis<T: Real>(a: &NdMap<T>, b: &NdMap<T>) -> Result<()> {
    if a.basis != b.basis || a.dim() != b.dim() {
        return Err(EitError::Input(format!("ND maps in bases {} and {} cannot be compared", a.basis, b.basis)));
    }
    Ok(())
}

/// Insulating: `Λ_data ⪰ Λ_bg − β F_B`. Conducting: `Λ_bg + β F_B ⪰ Λ_data`.
pub fn linearized_definite_test<T: Real>(
    data: &NdMap<T>,
    background: &NdMap<T>,
    frechet: &DenseMatrix<T>,
    cfg: &TestConfig<T>,
) -> Result<LoewnerOutcome<T>> {
    same_basis(data, background)?;
    cfg.validate()?;
    if frechet.rows() != data.dim() || frechet.cols() != data.dim() {
        return Err(EitError::Input("Fréchet matrix does not match the ND basis".into()));
    }
    let shifted = frechet.scale(cfg.beta);
    match cfg.mode {
        TestMode::Insulating => loewner_test(&data.matrix, &background.matrix.sub(&shifted)?, cfg.tau),
        TestMode::Conducting => loewner_test(&background.matrix.add(&shifted)?, &data.matrix, cfg.tau),
        TestMode::Indefinite => Err(EitError::Config("definite test called in indefinite mode".into())),
    }
}

/// Insulating: `Λ_data ⪰ Λ(γ₀ − βχ_B)`. Conducting: `Λ(γ₀ + βχ_B) ⪰ Λ_data`.
pub fn nonlinear_definite_test<T: Real>(
    data: &NdMap<T>,
    perturbed: &NdMap<T>,
    cfg: &TestConfig<T>,
    inf_gamma0: T,
) -> Result<LoewnerOutcome<T>> {
    same_basis(data, perturbed)?;
    cfg.check_nonlinear(inf_gamma0)?;
    match cfg.mode {
        TestMode::Insulating => loewner_test(&data.matrix, &perturbed.matrix, cfg.tau),
        TestMode::Conducting => loewner_test(&perturbed.matrix, &data.matrix, cfg.tau),
        TestMode::Indefinite => Err(EitError::Config("definite test called in indefinite mode".into())),
    }
}

/// Element masks of the pixels: element `e` belongs to the pixel containing its centroid.
pub fn pixel_element_masks<T: Real>(mesh: &Mesh<T>, grid: &PixelGrid<T>) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); grid.len()];
    for e in 0..mesh.num_elements() {
        if let Some(cell) = grid.locate(mesh.centroid(e)) {
            members[grid.index(cell)].push(e);
        }
    }
    members
}

/// Runs the chosen definite test for every pixel `B` of `grid`.
pub fn reconstruct_definite<T: Real>(
    mesh: &Mesh<T>,
    basis: &BoundaryBasis<T>,
    gamma0: &ConductivityField<T>,
    grid: &PixelGrid<T>,
    data: &NdMap<T>,
    pipeline: DefinitePipeline,
    cfg: &TestConfig<T>,
) -> Result<ReconstructionResult<T>> {
    grid.validate()?;
    if gamma0.has_extremes() {
        return Err(EitError::Input("background conductivity must be finite".into()));
    }
    let inf = gamma0.inf();
    match pipeline {
        DefinitePipeline::Linearized => cfg.check_linearized(inf)?,
        DefinitePipeline::Nonlinear => cfg.check_nonlinear(inf)?,
    }
    if cfg.mode == TestMode::Indefinite {
        return Err(EitError::Config("definite reconstruction needs insulating or conducting mode".into()));
    }
    let background = compute_nd_map(mesh, gamma0, basis)?;
    same_basis(data, &background)?;
    let members = pixel_element_masks(mesh, grid);
    let gradients = match pipeline {
        DefinitePipeline::Linearized => Some(BackgroundGradients::compute(mesh, gamma0, basis)?),
        DefinitePipeline::Nonlinear => None,
    };
    let sign = if cfg.mode == TestMode::Insulating { -cfg.beta } else { cfg.beta };
    let outcomes: Vec<Option<LoewnerOutcome<T>>> = members
        .par_iter()
        .map(|elements| -> Result<Option<LoewnerOutcome<T>>> {
            if elements.is_empty() {
                return Ok(None);
            }
            let mut mask = vec![false; mesh.num_elements()];
            elements.iter().for_each(|&e| mask[e] = true);
            let outcome = match &gradients {
                Some(g) => linearized_definite_test(data, &background, &g.matrix(&mask), cfg)?,
                None => {
                    let perturbed = compute_nd_map(mesh, &gamma0.perturbed(&mask, sign)?, basis)?;
                    nonlinear_definite_test(data, &perturbed, cfg, inf)?
                }
            };
            Ok(Some(outcome))
        })
        .collect::<Result<_>>()?;
    Ok(ReconstructionResult::from_pixel_outcomes(grid.clone(), outcomes))
}
