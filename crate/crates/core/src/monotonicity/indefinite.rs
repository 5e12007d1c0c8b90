use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::fem::{compute_nd_map, ConductivityField, Extreme, NdMap};
use crate::mesh::{check_admissibility, is_admissible_test_set, BoundaryBasis, Mesh, PixelGrid, RegionSpec};
use crate::monotonicity::loewner::loewner_test;
use crate::monotonicity::result::{DictionaryOutcome, ReconstructionResult};
use crate::scalar::Real;

/// `Λ₀(C) ⪰ Λ_data ⪰ Λ∞(C)`, each up to `τ`.
pub fn indefinite_test<T: Real>(
    data: &NdMap<T>,
    insulating_c: &NdMap<T>,
    conducting_c: &NdMap<T>,
    tau: T,
) -> Result<(bool, DictionaryOutcome<T>)> {
    for other in [insulating_c, conducting_c] {
        if other.basis != data.basis || other.dim() != data.dim() {
            return Err(EitError::Input(format!("ND maps in bases {} and {} cannot be compared", data.basis, other.basis)));
        }
    }
    let insulating = loewner_test(&insulating_c.matrix, &data.matrix, tau)?;
    let conducting = loewner_test(&data.matrix, &conducting_c.matrix, tau)?;
    let passed = insulating.passed && conducting.passed;
    Ok((passed, DictionaryOutcome { index: 0, passed, insulating, conducting }))
}

/// Inclusion with insulating, perfectly conducting, and finite parts
/// below or above the background.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndefinitePhantom<T> {
    pub d0: RegionSpec<T>,
    pub d_inf: RegionSpec<T>,
    pub df_minus: RegionSpec<T>,
    pub df_plus: RegionSpec<T>,
    /// Conductivity on `df_minus`; must stay below the background.
    pub gamma_minus: T,
    /// Conductivity on `df_plus`; must stay above the background.
    pub gamma_plus: T,
}

impl<T: Real> IndefinitePhantom<T> {
    pub fn empty() -> Self {
        Self {
            d0: RegionSpec::Empty,
            d_inf: RegionSpec::Empty,
            df_minus: RegionSpec::Empty,
            df_plus: RegionSpec::Empty,
            gamma_minus: T::lit(0.5),
            gamma_plus: T::lit(2.0),
        }
    }

    /// The inclusion `D = D₀ ∪ D∞ ∪ D_F⁻ ∪ D_F⁺`.
    pub fn support(&self) -> RegionSpec<T> {
        RegionSpec::union(vec![self.d0.clone(), self.d_inf.clone(), self.df_minus.clone(), self.df_plus.clone()])
    }

    /// Builds `γ` from the background `γ₀`, checking that every part is
    /// disjoint and bounded away from `γ₀`.
    pub fn conductivity(&self, mesh: &Mesh<T>, gamma0: &ConductivityField<T>) -> Result<ConductivityField<T>> {
        if gamma0.has_extremes() {
            return Err(EitError::Input("background conductivity must be finite".into()));
        }
        let parts = [&self.d0, &self.d_inf, &self.df_minus, &self.df_plus];
        for p in parts {
            p.validate()?;
        }
        let masks: Vec<Vec<bool>> = parts.iter().map(|p| p.element_mask(mesh)).collect();
        for e in 0..mesh.num_elements() {
            if masks.iter().filter(|m| m[e]).count() > 1 {
                return Err(EitError::Input(format!("phantom parts overlap at element {e}")));
            }
        }
        let report = check_admissibility(&self.d0, &self.d_inf, mesh);
        if !report.all_true() {
            return Err(EitError::Admissibility(report.describe_failures().join("; ")));
        }
        let mut background = gamma0.background().to_vec();
        for e in 0..mesh.num_elements() {
            if masks[2][e] {
                if !(self.gamma_minus < gamma0.background()[e]) || !(self.gamma_minus > T::zero()) {
                    return Err(EitError::Input("gamma_minus must lie in (0, γ₀) on df_minus".into()));
                }
                background[e] = self.gamma_minus;
            }
            if masks[3][e] {
                if !(self.gamma_plus > gamma0.background()[e]) || !self.gamma_plus.is_finite() {
                    return Err(EitError::Input("gamma_plus must exceed γ₀ on df_plus".into()));
                }
                background[e] = self.gamma_plus;
            }
        }
        let field = ConductivityField::from_background(background)?
            .with_mask(&masks[0], Extreme::Insulating)?
            .with_mask(&masks[1], Extreme::Conducting)?;
        field.check(mesh)?;
        Ok(field)
    }
}

type CacheKey = (u64, u64, u64, u64, Extreme);

/// `Λ₀(C)` and `Λ∞(C)` keyed by mesh, background, basis and region.
#[derive(Debug, Default)]
pub struct NdCache<T> {
    maps: Mutex<HashMap<CacheKey, Arc<NdMap<T>>>>,
}

impl<T: Real> NdCache<T> {
    pub fn new() -> Self {
        Self { maps: Mutex::new(HashMap::new()) }
    }

    pub fn len(&self) -> usize {
        self.maps.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// ND map of `γ₀` with `region` set to `extreme`, computed once per key.
    pub fn get_or_compute(
        &self,
        mesh: &Mesh<T>,
        basis: &BoundaryBasis<T>,
        gamma0: &ConductivityField<T>,
        region: &RegionSpec<T>,
        extreme: Extreme,
    ) -> Result<Arc<NdMap<T>>> {
        let mut h = DefaultHasher::new();
        basis.descriptor().hash(&mut h);
        let key = (mesh.fingerprint(), gamma0.fingerprint(), h.finish(), region.fingerprint(), extreme);
        if let Some(m) = self.maps.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(m));
        }
        let field = gamma0.clone().with_spec(mesh, region, extreme)?;
        let map = Arc::new(compute_nd_map(mesh, &field, basis)?);
        Ok(Arc::clone(self.maps.lock().expect("cache lock").entry(key).or_insert(map)))
    }
}

/// Disks centred at the origin and on a coarse lattice, and axis-aligned
/// squares, filtered to admissible test sets on `mesh`.
pub fn default_dictionary<T: Real>(mesh: &Mesh<T>) -> Vec<RegionSpec<T>> {
    let l = T::lit;
    let mut out = Vec::new();
    for i in 1..=8 {
        out.push(RegionSpec::disk(T::zero(), T::zero(), l(0.1 * i as f64)));
    }
    let lattice = [-0.4, 0.0, 0.4];
    for &cx in &lattice {
        for &cy in &lattice {
            if cx == 0.0 && cy == 0.0 {
                continue;
            }
            for r in [0.2, 0.35] {
                out.push(RegionSpec::disk(l(cx), l(cy), l(r)));
            }
        }
    }
    for &cx in &[-0.3, 0.0, 0.3] {
        for &cy in &[-0.3, 0.0, 0.3] {
            for half in [0.2, 0.4] {
                out.push(RegionSpec::rect([l(cx - half), l(cy - half)], [l(cx + half), l(cy + half)]));
            }
        }
    }
    out.retain(|c| is_admissible_test_set(c, mesh));
    out
}

/// `D ≈ ∩{C : Λ₀(C) ⪰ Λ_data ⪰ Λ∞(C)}` over `dictionary`, pixelized by cell centre.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_indefinite<T: Real>(
    mesh: &Mesh<T>,
    basis: &BoundaryBasis<T>,
    gamma0: &ConductivityField<T>,
    data: &NdMap<T>,
    dictionary: &[RegionSpec<T>],
    grid: &PixelGrid<T>,
    tau: T,
    cache: &NdCache<T>,
) -> Result<ReconstructionResult<T>> {
    if dictionary.is_empty() {
        return Err(EitError::Input("empty test-set dictionary".into()));
    }
    grid.validate()?;
    if gamma0.has_extremes() {
        return Err(EitError::Input("background conductivity must be finite".into()));
    }
    for (i, c) in dictionary.iter().enumerate() {
        c.validate()?;
        if !is_admissible_test_set(c, mesh) {
            return Err(EitError::Admissibility(format!("dictionary set {i} is not an admissible test set")));
        }
    }
    let outcomes: Vec<DictionaryOutcome<T>> = dictionary
        .par_iter()
        .enumerate()
        .map(|(i, c)| -> Result<DictionaryOutcome<T>> {
            let l0 = cache.get_or_compute(mesh, basis, gamma0, c, Extreme::Insulating)?;
            let linf = cache.get_or_compute(mesh, basis, gamma0, c, Extreme::Conducting)?;
            let (_, mut outcome) = indefinite_test(data, &l0, &linf, tau)?;
            outcome.index = i;
            Ok(outcome)
        })
        .collect::<Result<_>>()?;
    let centers: Vec<[T; 2]> = (0..grid.len()).map(|k| grid.cell_center(grid.cell(k))).collect();
    let mut indicator = vec![true; grid.len()];
    let mut any = false;
    for o in outcomes.iter().filter(|o| o.passed) {
        any = true;
        for (ind, &p) in indicator.iter_mut().zip(&centers) {
            *ind &= dictionary[o.index].contains(p);
        }
    }
    let marginal = vec![false; grid.len()];
    Ok(ReconstructionResult {
        grid: grid.clone(),
        indicator,
        min_eig: vec![None; centers.len()],
        marginal,
        vacuous: !any,
        dictionary: outcomes,
    })
}
