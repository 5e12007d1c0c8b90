use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::linalg::DenseMatrix;
use crate::mesh::{BoundaryGeometry, Mesh};
use crate::quadrature::gauss_legendre_unit;
use crate::scalar::Real;

/// Family of mean-free boundary functions spanning the current patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisKind {
    /// `cos kθ/√π, sin kθ/√π` for `k = 1..=max_mode`, in that interleaved order.
    Fourier { max_mode: usize },
    /// Γ split into `groups + 1` contiguous runs of edges; function `j` is the
    /// indicator of run `j` minus its mean, for `j < groups`.
    EdgePiecewise { groups: usize },
}

/// One Γ edge as seen by the boundary quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySegment<T> {
    pub nodes: [usize; 2],
    /// Angle at the start node (unit-circle geometry only).
    pub theta_start: T,
    /// Signed angular extent (unit-circle geometry only).
    pub theta_span: T,
    /// Measure of the segment on Γ.
    pub length: T,
}

/// Basis of `L²⋄(Γ)` discretized on the Γ edges of one mesh.
#[derive(Debug, Clone)]
pub struct BoundaryBasis<T> {
    kind: BasisKind,
    segments: Vec<BoundarySegment<T>>,
    quad_t: Vec<T>,
    quad_w: Vec<T>,
    /// `samples[j][s * nq + q]`: function `j` at quadrature point `q` of segment `s`.
    samples: Vec<Vec<T>>,
    gram: DenseMatrix<T>,
    gamma_length: T,
    num_nodes: usize,
}

/// Default Gauss–Legendre points per Γ edge.
pub const DEFAULT_BOUNDARY_QUADRATURE: usize = 8;

pub fn build_boundary_basis<T: Real>(mesh: &Mesh<T>, kind: BasisKind) -> Result<BoundaryBasis<T>> {
    BoundaryBasis::with_quadrature(mesh, kind, DEFAULT_BOUNDARY_QUADRATURE)
}

impl<T: Real> BoundaryBasis<T> {
    pub fn with_quadrature(mesh: &Mesh<T>, kind: BasisKind, points_per_edge: usize) -> Result<Self> {
        let segments = ordered_segments(mesh);
        let gamma_length: T = segments.iter().map(|s| s.length).sum();
        let (quad_t, quad_w) = gauss_legendre_unit::<T>(points_per_edge);
        let nq = quad_t.len();
        let samples: Vec<Vec<T>> = match kind {
            BasisKind::Fourier { max_mode } => {
                if max_mode == 0 {
                    return Err(EitError::Input("Fourier basis needs max_mode ≥ 1 (empty basis)".into()));
                }
                let full_circle = mesh.geometry() == BoundaryGeometry::UnitCircle
                    && (gamma_length - T::TAU()).abs() < T::lit(1e-9).max(T::epsilon() * T::lit(100.0));
                if !full_circle {
                    return Err(EitError::Unsupported(
                        "Fourier basis requires Γ to be the full unit circle; use edge_piecewise".into(),
                    ));
                }
                let inv_sqrt_pi = T::one() / T::PI().sqrt();
                let mut rows = vec![Vec::with_capacity(segments.len() * nq); 2 * max_mode];
                for s in &segments {
                    for &t in &quad_t {
                        let theta = s.theta_start + t * s.theta_span;
                        for k in 1..=max_mode {
                            let kt = T::from_usize_lossy(k) * theta;
                            rows[2 * (k - 1)].push(kt.cos() * inv_sqrt_pi);
                            rows[2 * (k - 1) + 1].push(kt.sin() * inv_sqrt_pi);
                        }
                    }
                }
                rows
            }
            BasisKind::EdgePiecewise { groups } => {
                if groups == 0 {
                    return Err(EitError::Input("edge_piecewise basis needs at least one group (empty basis)".into()));
                }
                if groups + 1 > segments.len() {
                    return Err(EitError::Input(format!(
                        "edge_piecewise with {groups} functions needs more than {} Γ edges",
                        segments.len()
                    )));
                }
                let runs = groups + 1;
                let run_of = |s: usize| s * runs / segments.len();
                let mut run_len = vec![T::zero(); runs];
                for (s, seg) in segments.iter().enumerate() {
                    run_len[run_of(s)] += seg.length;
                }
                (0..groups)
                    .map(|j| {
                        let mean = run_len[j] / gamma_length;
                        let mut row = Vec::with_capacity(segments.len() * nq);
                        for s in 0..segments.len() {
                            let v = if run_of(s) == j { T::one() - mean } else { -mean };
                            row.extend(std::iter::repeat_n(v, nq));
                        }
                        row
                    })
                    .collect()
            }
        };
        let mut basis = Self {
            kind,
            segments,
            quad_t,
            quad_w,
            samples,
            gram: DenseMatrix::zeros(0, 0),
            gamma_length,
            num_nodes: mesh.num_nodes(),
        };
        let m = basis.len();
        basis.gram = DenseMatrix::from_fn(m, m, |j, k| basis.integrate_product(j, k));
        Ok(basis)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn gram(&self) -> &DenseMatrix<T> {
        &self.gram
    }

    pub fn gamma_length(&self) -> T {
        self.gamma_length
    }

    pub fn segments(&self) -> &[BoundarySegment<T>] {
        &self.segments
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Fourier mode of basis function `j`, if this is a Fourier basis.
    pub fn fourier_mode(&self, j: usize) -> Option<usize> {
        matches!(self.kind, BasisKind::Fourier { .. }).then_some(j / 2 + 1)
    }

    pub fn descriptor(&self) -> String {
        match self.kind {
            BasisKind::Fourier { max_mode } => format!("fourier:K={max_mode}"),
            BasisKind::EdgePiecewise { groups } => format!("edge_piecewise:groups={groups}"),
        }
    }

    fn weight(&self, s: usize, q: usize) -> T {
        self.quad_w[q] * self.segments[s].length
    }

    fn integrate_product(&self, j: usize, k: usize) -> T {
        let nq = self.quad_t.len();
        let mut acc = T::zero();
        for s in 0..self.segments.len() {
            for q in 0..nq {
                acc += self.weight(s, q) * self.samples[j][s * nq + q] * self.samples[k][s * nq + q];
            }
        }
        acc
    }

    /// `⟨1, f_j⟩_Γ` for every basis function.
    pub fn function_means(&self) -> Vec<T> {
        let nq = self.quad_t.len();
        (0..self.len())
            .map(|j| {
                let mut acc = T::zero();
                for s in 0..self.segments.len() {
                    for q in 0..nq {
                        acc += self.weight(s, q) * self.samples[j][s * nq + q];
                    }
                }
                acc
            })
            .collect()
    }

    /// Nodal load vector `∫_Γ f φ_i` of `f = Σ coeffs[j] f_j`.
    pub fn load_vector(&self, coeffs: &[T]) -> Result<Vec<T>> {
        if coeffs.len() != self.len() {
            return Err(EitError::Input(format!(
                "{} boundary coefficients for a basis of size {}",
                coeffs.len(),
                self.len()
            )));
        }
        let nq = self.quad_t.len();
        let mut b = vec![T::zero(); self.num_nodes];
        for (s, seg) in self.segments.iter().enumerate() {
            for q in 0..nq {
                let f: T = coeffs.iter().zip(&self.samples).map(|(&c, row)| c * row[s * nq + q]).sum();
                let w = self.weight(s, q) * f;
                let t = self.quad_t[q];
                b[seg.nodes[0]] += w * (T::one() - t);
                b[seg.nodes[1]] += w * t;
            }
        }
        Ok(b)
    }

    /// Load vector of basis function `j` alone.
    pub fn unit_load(&self, j: usize) -> Vec<T> {
        let mut c = vec![T::zero(); self.len()];
        c[j] = T::one();
        self.load_vector(&c).expect("coefficient length matches")
    }

    /// Nodal vector `∫_Γ φ_i`, so that `⟨u, 1⟩_Γ = mass · u`.
    pub fn boundary_mass(&self) -> Vec<T> {
        let mut c = vec![T::zero(); self.num_nodes];
        let half = T::lit(0.5);
        for seg in &self.segments {
            c[seg.nodes[0]] += seg.length * half;
            c[seg.nodes[1]] += seg.length * half;
        }
        c
    }

    /// `⟨u|_Γ, f_k⟩` for every basis function, `u` given by nodal values.
    pub fn trace_pairing(&self, u: &[T]) -> Vec<T> {
        let nq = self.quad_t.len();
        let mut out = vec![T::zero(); self.len()];
        for (s, seg) in self.segments.iter().enumerate() {
            let (ua, ub) = (u[seg.nodes[0]], u[seg.nodes[1]]);
            for q in 0..nq {
                let t = self.quad_t[q];
                let w = self.weight(s, q) * (ua * (T::one() - t) + ub * t);
                for (k, row) in self.samples.iter().enumerate() {
                    out[k] += w * row[s * nq + q];
                }
            }
        }
        out
    }

    /// `u(θ)` sample of function `j` at an angle, Fourier bases only.
    pub fn evaluate_fourier(&self, j: usize, theta: T) -> Option<T> {
        let k = T::from_usize_lossy(self.fourier_mode(j)?);
        let inv_sqrt_pi = T::one() / T::PI().sqrt();
        Some(if j.is_multiple_of(2) { (k * theta).cos() } else { (k * theta).sin() } * inv_sqrt_pi)
    }
}

/// Γ edges ordered along the boundary chain.
fn ordered_segments<T: Real>(mesh: &Mesh<T>) -> Vec<BoundarySegment<T>> {
    let gamma: Vec<[usize; 2]> = mesh.gamma_edges().map(|e| e.nodes).collect();
    let by_start: HashMap<usize, usize> = gamma.iter().enumerate().map(|(k, e)| (e[0], k)).collect();
    let ends: std::collections::HashSet<usize> = gamma.iter().map(|e| e[1]).collect();
    let start = gamma.iter().position(|e| !ends.contains(&e[0])).unwrap_or(0);
    let mut order = Vec::with_capacity(gamma.len());
    let mut visited = vec![false; gamma.len()];
    let mut cur = Some(start);
    while let Some(k) = cur {
        if visited[k] {
            break;
        }
        visited[k] = true;
        order.push(k);
        cur = by_start.get(&gamma[k][1]).copied();
    }
    // Any edges not reached by the chain walk (should not happen for a
    // connected Γ) keep their list order.
    order.extend((0..gamma.len()).filter(|&k| !visited[k]));

    order
        .into_iter()
        .map(|k| {
            let [a, b] = gamma[k];
            let (pa, pb) = (mesh.nodes()[a], mesh.nodes()[b]);
            match mesh.geometry() {
                BoundaryGeometry::UnitCircle => {
                    let ta = pa[1].atan2(pa[0]);
                    let mut span = pb[1].atan2(pb[0]) - ta;
                    if span > T::PI() {
                        span -= T::TAU();
                    } else if span <= -T::PI() {
                        span += T::TAU();
                    }
                    BoundarySegment { nodes: [a, b], theta_start: ta, theta_span: span, length: span.abs() }
                }
                BoundaryGeometry::Polygonal => {
                    let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
                    BoundarySegment {
                        nodes: [a, b],
                        theta_start: pa[1].atan2(pa[0]),
                        theta_span: T::zero(),
                        length: len,
                    }
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_disk_mesh, generate_rect_mesh};

    #[test]
    fn fourier_is_orthonormal_and_mean_free() {
        let mesh = generate_disk_mesh(0.05f64).unwrap();
        let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 8 }).unwrap();
        assert_eq!(basis.len(), 16);
        let err = basis.gram().sub(&DenseMatrix::identity(16)).unwrap().max_abs();
        assert!(err < 1e-10, "gram defect {err}");
        for m in basis.function_means() {
            assert!(m.abs() < 1e-10);
        }
    }

    #[test]
    fn fourier_on_partial_gamma_is_unsupported() {
        let mesh = generate_disk_mesh(0.1f64).unwrap().with_gamma(|p| p[1] > 0.0).unwrap();
        let err = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 2 });
        assert!(matches!(err, Err(EitError::Unsupported(_))));
    }

    #[test]
    fn empty_basis_is_rejected() {
        let mesh = generate_disk_mesh(0.2f64).unwrap();
        assert!(build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 0 }).is_err());
        assert!(build_boundary_basis(&mesh, BasisKind::EdgePiecewise { groups: 0 }).is_err());
    }

    #[test]
    fn edge_piecewise_on_half_circle() {
        let mesh = generate_disk_mesh(0.1f64).unwrap().with_gamma(|p| p[1] > 0.0).unwrap();
        let basis = build_boundary_basis(&mesh, BasisKind::EdgePiecewise { groups: 6 }).unwrap();
        let g = basis.gram();
        assert!(g.is_symmetric(1e-14));
        assert!(g.min_eigenvalue().unwrap() > 0.0);
        for m in basis.function_means() {
            assert!(m.abs() < 1e-13);
        }
        // Mean subtraction makes every off-diagonal entry −|g_j||g_k|/|Γ| < 0.
        for j in 0..6 {
            for k in 0..6 {
                if j != k {
                    assert!(g[(j, k)] < 0.0);
                }
            }
        }
        let total = basis.gamma_length();
        assert!((total - std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn edge_piecewise_row_sums_match_closed_form() {
        let mesh = generate_rect_mesh([0.0f64, 0.0], [1.0, 1.0], 4, 4).unwrap();
        let basis = build_boundary_basis(&mesh, BasisKind::EdgePiecewise { groups: 3 }).unwrap();
        // 16 edges of length 1/4 in 4 runs of 4 edges: every run has length 1.
        let g = basis.gram();
        for j in 0..3 {
            assert!((g[(j, j)] - (1.0 - 0.25)).abs() < 1e-14);
            let row_sum: f64 = (0..3).map(|k| g[(j, k)]).sum();
            assert!((row_sum - 1.0 * 1.0 / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn load_vector_of_sum_is_sum_of_loads() {
        let mesh = generate_disk_mesh(0.2f64).unwrap();
        let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 3 }).unwrap();
        let combined = basis.load_vector(&[1.0, 0.0, 2.0, 0.0, 0.0, -1.0]).unwrap();
        let (a, b, c) = (basis.unit_load(0), basis.unit_load(2), basis.unit_load(5));
        for i in 0..combined.len() {
            assert!((combined[i] - (a[i] + 2.0 * b[i] - c[i])).abs() < 1e-14);
        }
        assert!(basis.load_vector(&[1.0]).is_err());
    }
}
