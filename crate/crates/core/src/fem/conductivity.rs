use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::mesh::{Mesh, RegionId, RegionSpec};
use crate::scalar::{scalar_bits, Real};

/// Per-element nature of the conductivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extreme {
    Finite,
    /// Conductivity 0: the element is removed from the computational domain.
    Insulating,
    /// Conductivity ∞: the potential is constant on each connected component.
    Conducting,
}

/// Conductivity `σ(ς, C₀, C∞)`: a positive background `ς` per element plus
/// the elements where `σ` is 0 or ∞.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductivityField<T> {
    background: Vec<T>,
    kind: Vec<Extreme>,
}

impl<T: Real> ConductivityField<T> {
    pub fn uniform(mesh: &Mesh<T>, value: T) -> Result<Self> {
        Self::from_background(vec![value; mesh.num_elements()])
    }

    pub fn from_background(background: Vec<T>) -> Result<Self> {
        if let Some((e, v)) = background.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > T::zero())) {
            return Err(EitError::Input(format!("background conductivity {v} at element {e} is not in (0, ∞)")));
        }
        let kind = vec![Extreme::Finite; background.len()];
        Ok(Self { background, kind })
    }

    pub fn len(&self) -> usize {
        self.background.len()
    }

    pub fn is_empty(&self) -> bool {
        self.background.is_empty()
    }

    pub fn background(&self) -> &[T] {
        &self.background
    }

    pub fn kinds(&self) -> &[Extreme] {
        &self.kind
    }

    pub fn kind(&self, e: usize) -> Extreme {
        self.kind[e]
    }

    /// Marks every element tagged `region` with `extreme`.
    pub fn with_region(mut self, mesh: &Mesh<T>, region: RegionId, extreme: Extreme) -> Result<Self> {
        self.check_len(mesh)?;
        for (k, &r) in self.kind.iter_mut().zip(mesh.element_region()) {
            if r == region {
                *k = extreme;
            }
        }
        Ok(self)
    }

    /// Marks every element whose centroid lies in `spec` with `extreme`.
    pub fn with_spec(mut self, mesh: &Mesh<T>, spec: &RegionSpec<T>, extreme: Extreme) -> Result<Self> {
        self.check_len(mesh)?;
        spec.validate()?;
        for (k, inside) in self.kind.iter_mut().zip(spec.element_mask(mesh)) {
            if inside {
                *k = extreme;
            }
        }
        Ok(self)
    }

    pub fn with_mask(mut self, mask: &[bool], extreme: Extreme) -> Result<Self> {
        if mask.len() != self.len() {
            return Err(EitError::Input("element mask length does not match the field".into()));
        }
        for (k, &inside) in self.kind.iter_mut().zip(mask) {
            if inside {
                *k = extreme;
            }
        }
        Ok(self)
    }

    /// Sets the background to `value` on the elements whose centroid lies in `spec`.
    pub fn with_value_in(mut self, mesh: &Mesh<T>, spec: &RegionSpec<T>, value: T) -> Result<Self> {
        self.check_len(mesh)?;
        spec.validate()?;
        if !(value.is_finite() && value > T::zero()) {
            return Err(EitError::Input(format!("conductivity value {value} is not in (0, ∞)")));
        }
        for (b, inside) in self.background.iter_mut().zip(spec.element_mask(mesh)) {
            if inside {
                *b = value;
            }
        }
        Ok(self)
    }

    /// Adds `delta` to the background on masked elements.
    pub fn perturbed(&self, mask: &[bool], delta: T) -> Result<Self> {
        let mut out = self.clone();
        for (b, &m) in out.background.iter_mut().zip(mask) {
            if m {
                *b += delta;
                if !(*b > T::zero()) {
                    return Err(EitError::Domain(format!("perturbation leaves conductivity {b} ≤ 0")));
                }
            }
        }
        Ok(out)
    }

    /// Multiplies the background by `c > 0`; extreme regions are unchanged.
    pub fn scaled(&self, c: T) -> Result<Self> {
        if !(c > T::zero()) {
            return Err(EitError::Domain("scaling factor must be positive".into()));
        }
        Ok(Self { background: self.background.iter().map(|&b| b * c).collect(), kind: self.kind.clone() })
    }

    /// Same background, every element finite.
    pub fn without_extremes(&self) -> Self {
        Self { background: self.background.clone(), kind: vec![Extreme::Finite; self.len()] }
    }

    pub fn has_extremes(&self) -> bool {
        self.kind.iter().any(|&k| k != Extreme::Finite)
    }

    pub fn mask_of(&self, extreme: Extreme) -> Vec<bool> {
        self.kind.iter().map(|&k| k == extreme).collect()
    }

    /// Essential infimum of the background over the whole mesh.
    pub fn inf(&self) -> T {
        self.background.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn sup(&self) -> T {
        self.background.iter().copied().fold(T::zero(), T::max)
    }

    /// Checks the field against its mesh: sizes, positivity, and the discrete
    /// admissibility of the insulating and conducting sets.
    pub fn check(&self, mesh: &Mesh<T>) -> Result<()> {
        self.check_len(mesh)?;
        if !self.has_extremes() {
            return Ok(());
        }
        let report = crate::mesh::admissibility::check_masks(
            mesh,
            &self.mask_of(Extreme::Insulating),
            &self.mask_of(Extreme::Conducting),
        );
        if !report.all_true() {
            return Err(EitError::Admissibility(report.describe_failures().join("; ")));
        }
        Ok(())
    }

    fn check_len(&self, mesh: &Mesh<T>) -> Result<()> {
        if self.len() != mesh.num_elements() {
            return Err(EitError::Input(format!(
                "field has {} elements, mesh has {}",
                self.len(),
                mesh.num_elements()
            )));
        }
        Ok(())
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for &b in &self.background {
            scalar_bits(b).hash(&mut h);
        }
        self.kind.hash(&mut h);
        h.finish()
    }
}

/// `ε`-truncation of an extreme conductivity: `ες` on insulating elements,
/// `ς/ε` on conducting ones, `ς` elsewhere; every element becomes finite.
pub fn truncated_conductivity<T: Real>(field: &ConductivityField<T>, eps: T) -> Result<ConductivityField<T>> {
    if !(eps > T::zero() && eps.is_finite()) {
        return Err(EitError::Domain(format!("truncation parameter must be positive, got {eps}")));
    }
    let background = field
        .background
        .iter()
        .zip(&field.kind)
        .map(|(&b, k)| match k {
            Extreme::Finite => b,
            Extreme::Insulating => b * eps,
            Extreme::Conducting => b / eps,
        })
        .collect();
    Ok(ConductivityField { background, kind: vec![Extreme::Finite; field.len()] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_disk_mesh;

    #[test]
    fn truncation_by_one_is_identity_on_background() {
        let mesh = generate_disk_mesh(0.2f64).unwrap();
        let f = ConductivityField::uniform(&mesh, 1.0)
            .unwrap()
            .with_spec(&mesh, &RegionSpec::disk(0.0, 0.0, 0.4), Extreme::Insulating)
            .unwrap();
        let t = truncated_conductivity(&f, 1.0).unwrap();
        assert!(t.background().iter().all(|&b| b == 1.0));
        assert!(!t.has_extremes());
    }

    #[test]
    fn truncation_scales_extremes() {
        let mesh = generate_disk_mesh(0.1f64).unwrap();
        let disk = RegionSpec::disk(0.0, 0.0, 0.5);
        let f = ConductivityField::uniform(&mesh, 1.0).unwrap().with_spec(&mesh, &disk, Extreme::Insulating).unwrap();
        let t = truncated_conductivity(&f, 0.01).unwrap();
        for e in 0..mesh.num_elements() {
            let expect = if disk.contains(mesh.centroid(e)) { 0.01 } else { 1.0 };
            assert_eq!(t.background()[e], expect);
        }
        let c = ConductivityField::uniform(&mesh, 2.0).unwrap().with_spec(&mesh, &disk, Extreme::Conducting).unwrap();
        assert_eq!(truncated_conductivity(&c, 0.5).unwrap().sup(), 4.0);
    }

    #[test]
    fn nonpositive_eps_is_domain_error() {
        let mesh = generate_disk_mesh(0.3f64).unwrap();
        let f = ConductivityField::uniform(&mesh, 1.0).unwrap();
        assert!(matches!(truncated_conductivity(&f, 0.0), Err(EitError::Domain(_))));
        assert!(matches!(truncated_conductivity(&f, -1.0), Err(EitError::Domain(_))));
    }

    #[test]
    fn rejects_nonpositive_background() {
        assert!(ConductivityField::<f64>::from_background(vec![1.0, 0.0]).is_err());
        assert!(ConductivityField::<f64>::from_background(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn overlapping_extremes_fail_check() {
        let mesh = generate_disk_mesh(0.1f64).unwrap();
        let f = ConductivityField::uniform(&mesh, 1.0)
            .unwrap()
            .with_spec(&mesh, &RegionSpec::disk(-0.1, 0.0, 0.2), Extreme::Insulating)
            .unwrap()
            .with_spec(&mesh, &RegionSpec::disk(0.15, 0.0, 0.2), Extreme::Conducting)
            .unwrap();
        assert!(matches!(f.check(&mesh), Err(EitError::Admissibility(_))));
    }
}
