//! Numerical check of the monotonicity inequalities
//! `lower ≤ ⟨(Λ_a − Λ_b) f, f⟩ ≤ upper` for a set of probe densities.

use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::fem::{element_energies, extend_into_insulator, ConductivityField, Extreme, ForwardSolver, NdMap, Potential};
use crate::mesh::{BoundaryBasis, Mesh, RegionSpec};
use crate::scalar::Real;

/// Which pair of conductivities is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsCase {
    /// Two finite conductivities `ς₁`, `ς₂`.
    Finite,
    /// `Λ₀(D) − Λ(ς)` against the extension of the background potential into `D`.
    InsulatingUpper,
    /// `Λ(ς) − Λ∞(D)`; the penalty constant is unknown, only its implied value is reported.
    ConductingUpper,
    /// Two backgrounds sharing the same extreme inclusions.
    SameExtremes,
    /// One background with insulating inclusions, without and with conducting ones.
    AddConducting,
    /// One background with conducting inclusions, with and without insulating ones.
    AddInsulating,
}

/// Two backgrounds and the extreme sets a case draws from.
///
/// `sigma1` is `ς₁` (or `γ₀`, or the single background `ς`); `sigma2` is
/// `ς₂` (or `ς` in the corollary cases) and is ignored where unused.
#[derive(Debug, Clone)]
pub struct BoundsSetup<'a, T> {
    pub mesh: &'a Mesh<T>,
    pub basis: &'a BoundaryBasis<T>,
    pub sigma1: ConductivityField<T>,
    pub sigma2: ConductivityField<T>,
    pub c0: RegionSpec<T>,
    pub c_inf: RegionSpec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundTriple<T> {
    pub lower: Option<T>,
    pub middle: T,
    pub upper: Option<T>,
    /// Smallest constant making an upper bound of the form `first + K·penalty` hold.
    pub implied_constant: Option<T>,
}

impl<T: Real> BoundTriple<T> {
    fn violation(&self) -> T {
        let mut v = T::zero();
        if let Some(l) = self.lower {
            v = v.max(l - self.middle);
        }
        if let Some(u) = self.upper {
            v = v.max(self.middle - u);
        }
        v
    }

    fn scale(&self) -> T {
        [self.lower, Some(self.middle), self.upper].iter().flatten().fold(T::zero(), |m, &x| m.max(x.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport<T> {
    pub case: BoundsCase,
    pub probes: Vec<Vec<T>>,
    pub triples: Vec<BoundTriple<T>>,
    /// Largest `max(lower − middle, middle − upper, 0)` over the probes.
    pub worst_violation: T,
    /// Largest magnitude among all reported quantities.
    pub scale: T,
    /// Largest implied penalty constant, for the cases that have one.
    pub max_implied_constant: Option<T>,
}

impl<T: Real> BoundsReport<T> {
    /// Every inequality holds up to `rel_tol · scale`, and implied constants are finite and nonnegative.
    pub fn holds(&self, rel_tol: T) -> bool {
        let constants_ok = self.max_implied_constant.is_none_or(|k| k.is_finite());
        self.worst_violation <= rel_tol * self.scale.max(T::min_positive_value()) && constants_ok
    }
}

struct Config<'a, T> {
    mesh: &'a Mesh<T>,
    field: ConductivityField<T>,
    solver: ForwardSolver<'a, T>,
    nd: NdMap<T>,
}

impl<'a, T: Real> Config<'a, T> {
    fn new(mesh: &'a Mesh<T>, basis: &'a BoundaryBasis<T>, field: ConductivityField<T>) -> Result<Self> {
        let solver = ForwardSolver::new(mesh, &field, basis)?;
        let nd = solver.nd_map()?;
        Ok(Self { mesh, field, solver, nd })
    }

    fn potential(&self, f: &[T], extend: bool) -> Result<Potential<T>> {
        let u = self.solver.solve(f)?;
        if extend {
            extend_into_insulator(self.mesh, &u, &self.field)
        } else {
            Ok(u)
        }
    }

    fn quad(&self, f: &[T]) -> T {
        let m = &self.nd.matrix;
        let mut s = T::zero();
        for i in 0..f.len() {
            for j in 0..f.len() {
                s += f[i] * m[(i, j)] * f[j];
            }
        }
        s
    }
}

/// `Σ_e w(e) ∫_e |∇u|²`; elements where `w` is `None` or `u` is undefined are skipped.
fn weighted_energy<T: Real>(mesh: &Mesh<T>, u: &Potential<T>, w: impl Fn(usize) -> Option<T>) -> T {
    element_energies(mesh, u).into_iter().enumerate().filter_map(|(e, d)| Some(w(e)? * d?)).sum()
}

fn with_extremes<T: Real>(
    mesh: &Mesh<T>,
    base: &ConductivityField<T>,
    c0: Option<&RegionSpec<T>>,
    c_inf: Option<&RegionSpec<T>>,
) -> Result<ConductivityField<T>> {
    let mut f = base.without_extremes();
    if let Some(c) = c0 {
        f = f.with_spec(mesh, c, Extreme::Insulating)?;
    }
    if let Some(c) = c_inf {
        f = f.with_spec(mesh, c, Extreme::Conducting)?;
    }
    Ok(f)
}

/// Evaluates the inequality chain of `case` for every probe (default: every basis function).
pub fn verify_monotonicity_bounds<T: Real>(
    case: BoundsCase,
    setup: &BoundsSetup<'_, T>,
    probes: Option<Vec<Vec<T>>>,
) -> Result<BoundsReport<T>> {
    let (mesh, basis) = (setup.mesh, setup.basis);
    for f in [&setup.sigma1, &setup.sigma2] {
        if f.len() != mesh.num_elements() {
            return Err(EitError::Input("conductivity does not match the mesh".into()));
        }
        if f.has_extremes() {
            return Err(EitError::Input("backgrounds must be finite; extreme sets go in c0 / c_inf".into()));
        }
    }
    let has0 = !setup.c0.is_empty_spec() && setup.c0.element_mask(mesh).iter().any(|&b| b);
    let has_inf = !setup.c_inf.is_empty_spec() && setup.c_inf.element_mask(mesh).iter().any(|&b| b);
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(EitError::Input(format!("case {case:?} needs {what}")))
        }
    };
    let m = basis.len();
    let probes = probes.unwrap_or_else(|| {
        (0..m)
            .map(|j| {
                let mut c = vec![T::zero(); m];
                c[j] = T::one();
                c
            })
            .collect()
    });
    if probes.iter().any(|p| p.len() != m) {
        return Err(EitError::Input("probe length does not match the basis".into()));
    }
    let s1 = setup.sigma1.background();
    let s2 = setup.sigma2.background();
    let c0 = has0.then_some(&setup.c0);
    let c_inf = has_inf.then_some(&setup.c_inf);

    let mut triples = Vec::with_capacity(probes.len());
    match case {
        BoundsCase::Finite | BoundsCase::SameExtremes => {
            if case == BoundsCase::Finite {
                need(!has0 && !has_inf, "empty extreme sets")?;
            }
            let a = Config::new(mesh, basis, with_extremes(mesh, &setup.sigma2, c0, c_inf)?)?;
            let b = Config::new(mesh, basis, with_extremes(mesh, &setup.sigma1, c0, c_inf)?)?;
            let finite = a.field.mask_of(Extreme::Finite);
            for f in &probes {
                let u2 = a.potential(f, false)?;
                let on = |e: usize| finite[e];
                triples.push(BoundTriple {
                    lower: Some(weighted_energy(mesh, &u2, |e| on(e).then(|| s2[e] / s1[e] * (s1[e] - s2[e])))),
                    middle: a.quad(f) - b.quad(f),
                    upper: Some(weighted_energy(mesh, &u2, |e| on(e).then(|| s1[e] - s2[e]))),
                    implied_constant: None,
                });
            }
        }
        BoundsCase::AddConducting => {
            need(has_inf, "a nonempty c_inf")?;
            let a = Config::new(mesh, basis, with_extremes(mesh, &setup.sigma1, c0, None)?)?;
            let b = Config::new(mesh, basis, with_extremes(mesh, &setup.sigma1, c0, c_inf)?)?;
            let in_inf = b.field.mask_of(Extreme::Conducting);
            for f in &probes {
                let ua = a.potential(f, true)?;
                let lower = weighted_energy(mesh, &ua, |e| in_inf[e].then(|| s1[e]));
                let penalty = weighted_energy(mesh, &ua, |e| in_inf[e].then(T::one));
                let middle = a.quad(f) - b.quad(f);
                triples.push(BoundTriple {
                    lower: Some(lower),
                    middle,
                    upper: None,
                    implied_constant: Some(if penalty > T::zero() { middle / penalty } else { T::infinity() }),
                });
            }
        }
        BoundsCase::AddInsulating => {
            need(has0, "a nonempty c0")?;
            let a = Config::new(mesh, basis, with_extremes(mesh, &setup.sigma1, c0, c_inf)?)?;
            let b = Config::new(mesh, basis, with_extremes(mesh, &setup.sigma1, None, c_inf)?)?;
            let in0 = a.field.mask_of(Extreme::Insulating);
            for f in &probes {
                let ub = b.potential(f, false)?;
                let ua = a.potential(f, true)?;
                triples.push(BoundTriple {
                    lower: Some(weighted_energy(mesh, &ub, |e| in0[e].then(|| s1[e]))),
                    middle: a.quad(f) - b.quad(f),
                    upper: Some(weighted_energy(mesh, &ua, |e| in0[e].then(|| s1[e]))),
                    implied_constant: None,
                });
            }
        }
        BoundsCase::InsulatingUpper => {
            need(has0, "a nonempty c0 (the set D)")?;
            let hat = Config::new(mesh, basis, with_extremes(mesh, &setup.sigma1, c0, None)?)?;
            let plain = Config::new(mesh, basis, setup.sigma2.without_extremes())?;
            let in_d = hat.field.mask_of(Extreme::Insulating);
            for f in &probes {
                let u = hat.potential(f, true)?;
                let upper = weighted_energy(mesh, &u, |e| Some(if in_d[e] { s2[e] } else { s2[e] - s1[e] }));
                triples.push(BoundTriple {
                    lower: None,
                    middle: hat.quad(f) - plain.quad(f),
                    upper: Some(upper),
                    implied_constant: None,
                });
            }
        }
        BoundsCase::ConductingUpper => {
            need(has_inf, "a nonempty c_inf (the set D)")?;
            let bg = Config::new(mesh, basis, setup.sigma1.without_extremes())?;
            let plain = Config::new(mesh, basis, setup.sigma2.without_extremes())?;
            let inf_d = Config::new(mesh, basis, with_extremes(mesh, &setup.sigma1, None, c_inf)?)?;
            let in_d = inf_d.field.mask_of(Extreme::Conducting);
            for f in &probes {
                let u = bg.potential(f, false)?;
                let first = weighted_energy(mesh, &u, |e| Some(s1[e] / s2[e] * (s1[e] - s2[e])));
                let penalty = weighted_energy(mesh, &u, |e| in_d[e].then(T::one));
                let middle = plain.quad(f) - inf_d.quad(f);
                let k = if penalty > T::zero() { (middle - first) / penalty } else { T::infinity() };
                triples.push(BoundTriple { lower: None, middle, upper: None, implied_constant: Some(k) });
            }
        }
    }
    let worst_violation = triples.iter().map(BoundTriple::violation).fold(T::zero(), T::max);
    let scale = triples.iter().map(BoundTriple::scale).fold(T::zero(), T::max);
    let max_implied_constant = triples.iter().filter_map(|t| t.implied_constant).reduce(T::max);
    Ok(BoundsReport { case, probes, triples, worst_violation, scale, max_implied_constant })
}
