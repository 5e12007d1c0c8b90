use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::mesh::{Mesh, RegionId, BACKGROUND};
use crate::scalar::{scalar_bits, Real};

/// Uniform grid of rectangular pixels over `[lo, hi]`. Cell `[ix, iy]` has
/// linear index `iy * nx + ix`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelGrid<T> {
    pub lo: [T; 2],
    pub hi: [T; 2],
    pub nx: usize,
    pub ny: usize,
}

impl<T: Real> PixelGrid<T> {
    pub fn new(lo: [T; 2], hi: [T; 2], nx: usize, ny: usize) -> Result<Self> {
        let g = Self { lo, hi, nx, ny };
        g.validate()?;
        Ok(g)
    }

    /// `n × n` grid covering `[-1, 1]²`.
    pub fn square(n: usize) -> Self {
        Self { lo: [-T::one(), -T::one()], hi: [T::one(), T::one()], nx: n, ny: n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || !(self.lo[0] < self.hi[0] && self.lo[1] < self.hi[1]) {
            return Err(EitError::Input("pixel grid needs ordered corners and nx, ny ≥ 1".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_size(&self) -> [T; 2] {
        [
            (self.hi[0] - self.lo[0]) / T::from_usize_lossy(self.nx),
            (self.hi[1] - self.lo[1]) / T::from_usize_lossy(self.ny),
        ]
    }

    pub fn index(&self, cell: [usize; 2]) -> usize {
        cell[1] * self.nx + cell[0]
    }

    pub fn cell(&self, index: usize) -> [usize; 2] {
        [index % self.nx, index / self.nx]
    }

    pub fn cell_bounds(&self, cell: [usize; 2]) -> ([T; 2], [T; 2]) {
        let d = self.cell_size();
        let lo = [
            self.lo[0] + d[0] * T::from_usize_lossy(cell[0]),
            self.lo[1] + d[1] * T::from_usize_lossy(cell[1]),
        ];
        (lo, [lo[0] + d[0], lo[1] + d[1]])
    }

    pub fn cell_center(&self, cell: [usize; 2]) -> [T; 2] {
        let (lo, hi) = self.cell_bounds(cell);
        let half = T::lit(0.5);
        [(lo[0] + hi[0]) * half, (lo[1] + hi[1]) * half]
    }

    /// Cell containing `p` (half-open cells, upper edge of the grid included).
    pub fn locate(&self, p: [T; 2]) -> Option<[usize; 2]> {
        let d = self.cell_size();
        let fx = ((p[0] - self.lo[0]) / d[0]).floor();
        let fy = ((p[1] - self.lo[1]) / d[1]).floor();
        if fx < T::zero() || fy < T::zero() {
            return None;
        }
        let clamp = |f: T, n: usize, edge: T, hi: T| -> Option<usize> {
            let i = f.to_usize()?;
            if i < n {
                Some(i)
            } else if edge == hi {
                Some(n - 1)
            } else {
                None
            }
        };
        Some([clamp(fx, self.nx, p[0], self.hi[0])?, clamp(fy, self.ny, p[1], self.hi[1])?])
    }

    /// Region covering a single pixel.
    pub fn pixel_region(&self, cell: [usize; 2]) -> RegionSpec<T> {
        RegionSpec::PixelUnion { grid: self.clone(), cells: vec![cell] }
    }
}

/// Geometric primitive describing an inclusion, a test set or a pixel union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSpec<T> {
    Empty,
    Disk { center: [T; 2], radius: T },
    Rect { lo: [T; 2], hi: [T; 2] },
    /// `{ r_inner ≤ |x − center| ≤ r_outer, θ ∈ [theta_start, theta_end] }`;
    /// a span of at least 2π gives a full annulus.
    AnnularSector { center: [T; 2], r_inner: T, r_outer: T, theta_start: T, theta_end: T },
    PixelUnion { grid: PixelGrid<T>, cells: Vec<[usize; 2]> },
    ComplementOf { inner: Box<RegionSpec<T>> },
    Union { parts: Vec<RegionSpec<T>> },
}

impl<T: Real> RegionSpec<T> {
    pub fn disk(cx: T, cy: T, radius: T) -> Self {
        Self::Disk { center: [cx, cy], radius }
    }

    pub fn rect(lo: [T; 2], hi: [T; 2]) -> Self {
        Self::Rect { lo, hi }
    }

    /// Pixel union with duplicate cells removed.
    pub fn pixels(grid: PixelGrid<T>, cells: impl IntoIterator<Item = [usize; 2]>) -> Self {
        let set: BTreeSet<[usize; 2]> = cells.into_iter().collect();
        Self::PixelUnion { grid, cells: set.into_iter().collect() }
    }

    pub fn complement(self) -> Self {
        Self::ComplementOf { inner: Box::new(self) }
    }

    pub fn union(parts: Vec<Self>) -> Self {
        Self::Union { parts }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Empty => Ok(()),
            Self::Disk { radius, .. } => {
                if *radius > T::zero() {
                    Ok(())
                } else {
                    Err(EitError::Input(format!("disk radius must be positive, got {radius}")))
                }
            }
            Self::Rect { lo, hi } => {
                if lo[0] < hi[0] && lo[1] < hi[1] {
                    Ok(())
                } else {
                    Err(EitError::Input("rect corners must be strictly ordered".into()))
                }
            }
            Self::AnnularSector { r_inner, r_outer, theta_start, theta_end, .. } => {
                if *r_inner >= T::zero() && r_inner < r_outer && theta_start < theta_end {
                    Ok(())
                } else {
                    Err(EitError::Input("annular sector needs 0 ≤ r_inner < r_outer and ordered angles".into()))
                }
            }
            Self::PixelUnion { grid, cells } => {
                grid.validate()?;
                if cells.is_empty() {
                    return Err(EitError::Input("pixel union is empty".into()));
                }
                let set: BTreeSet<_> = cells.iter().collect();
                if set.len() != cells.len() {
                    return Err(EitError::Input("pixel union lists a cell twice".into()));
                }
                if cells.iter().any(|c| c[0] >= grid.nx || c[1] >= grid.ny) {
                    return Err(EitError::Input("pixel union cell outside the grid".into()));
                }
                Ok(())
            }
            Self::ComplementOf { inner } => inner.validate(),
            Self::Union { parts } => parts.iter().try_for_each(Self::validate),
        }
    }

    pub fn contains(&self, p: [T; 2]) -> bool {
        match self {
            Self::Empty => false,
            Self::Disk { center, radius } => {
                (p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2) <= *radius * *radius
            }
            Self::Rect { lo, hi } => p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1],
            Self::AnnularSector { center, r_inner, r_outer, theta_start, theta_end } => {
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                let r = dx.hypot(dy);
                if r < *r_inner || r > *r_outer {
                    return false;
                }
                if *theta_end - *theta_start >= T::TAU() {
                    return true;
                }
                let mut theta = dy.atan2(dx);
                while theta < *theta_start {
                    theta += T::TAU();
                }
                while theta > *theta_start + T::TAU() {
                    theta -= T::TAU();
                }
                theta <= *theta_end
            }
            Self::PixelUnion { grid, cells } => grid.locate(p).is_some_and(|c| cells.contains(&c)),
            Self::ComplementOf { inner } => !inner.contains(p),
            Self::Union { parts } => parts.iter().any(|r| r.contains(p)),
        }
    }

    pub fn is_empty_spec(&self) -> bool {
        match self {
            Self::Empty => true,
            Self::Union { parts } => parts.iter().all(Self::is_empty_spec),
            _ => false,
        }
    }

    /// Elements whose centroid lies in the region.
    pub fn element_mask(&self, mesh: &Mesh<T>) -> Vec<bool> {
        (0..mesh.num_elements()).map(|e| self.contains(mesh.centroid(e))).collect()
    }

    /// Stable hash of the region description.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.hash_into(&mut h);
        h.finish()
    }

    fn hash_into(&self, h: &mut DefaultHasher) {
        let bits = |x: &T, h: &mut DefaultHasher| scalar_bits(*x).hash(h);
        match self {
            Self::Empty => 0u8.hash(h),
            Self::Disk { center, radius } => {
                1u8.hash(h);
                center.iter().chain([radius]).for_each(|x| bits(x, h));
            }
            Self::Rect { lo, hi } => {
                2u8.hash(h);
                lo.iter().chain(hi).for_each(|x| bits(x, h));
            }
            Self::AnnularSector { center, r_inner, r_outer, theta_start, theta_end } => {
                3u8.hash(h);
                center.iter().chain([r_inner, r_outer, theta_start, theta_end]).for_each(|x| bits(x, h));
            }
            Self::PixelUnion { grid, cells } => {
                4u8.hash(h);
                grid.lo.iter().chain(&grid.hi).for_each(|x| bits(x, h));
                (grid.nx, grid.ny).hash(h);
                cells.hash(h);
            }
            Self::ComplementOf { inner } => {
                5u8.hash(h);
                inner.hash_into(h);
            }
            Self::Union { parts } => {
                6u8.hash(h);
                parts.len().hash(h);
                parts.iter().for_each(|p| p.hash_into(h));
            }
        }
    }
}

/// Result of [`tag_regions`].
#[derive(Debug, Clone)]
pub struct TagOutcome<T> {
    pub mesh: Mesh<T>,
    /// Number of elements tagged per requested region, in request order.
    pub counts: Vec<(RegionId, usize)>,
    pub warnings: Vec<String>,
}

/// Assigns region ids by centroid membership; other elements become
/// [`BACKGROUND`].
pub fn tag_regions<T: Real>(mesh: &Mesh<T>, regions: &[(RegionId, RegionSpec<T>)]) -> Result<TagOutcome<T>> {
    for (id, spec) in regions {
        if *id == BACKGROUND {
            return Err(EitError::Input("region id 0 is reserved for the background".into()));
        }
        spec.validate()?;
    }
    let mut tags = vec![BACKGROUND; mesh.num_elements()];
    let mut counts: Vec<(RegionId, usize)> = regions.iter().map(|(id, _)| (*id, 0)).collect();
    for (e, tag) in tags.iter_mut().enumerate() {
        let c = mesh.centroid(e);
        for (k, (id, spec)) in regions.iter().enumerate() {
            if spec.contains(c) {
                if *tag != BACKGROUND && *tag != *id {
                    return Err(EitError::RegionConflict { element: e, first: *tag, second: *id });
                }
                if *tag == BACKGROUND {
                    counts[k].1 += 1;
                }
                *tag = *id;
            }
        }
    }
    let mut warnings = Vec::new();
    for &(id, n) in &counts {
        if n == 0 {
            let msg = format!("region {id} contains no element centroid");
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }
    Ok(TagOutcome { mesh: mesh.with_regions(tags), counts, warnings })
}
