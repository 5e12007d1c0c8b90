use eit_core::fem::{compute_nd_map, frechet_form, ConductivityField, Extreme, NdMap};
use eit_core::mesh::{build_boundary_basis, generate_disk_mesh, BasisKind, BoundaryBasis, Mesh, PixelGrid, RegionSpec};
use eit_core::monotonicity::{
    default_tau, indefinite_test, linearized_definite_test, loewner_test, nonlinear_definite_test, reconstruct_definite,
    reconstruct_indefinite, verify_monotonicity_bounds, BoundsCase, BoundsSetup, DefinitePipeline, IndefinitePhantom,
    NdCache, TestConfig, TestMode,
};
use eit_core::EitError;

struct Setup {
    mesh: Mesh<f64>,
    basis: BoundaryBasis<f64>,
    gamma0: ConductivityField<f64>,
    background: NdMap<f64>,
    tau: f64,
}

fn setup(h: f64, k: usize) -> Setup {
    let mesh = generate_disk_mesh(h).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: k }).unwrap();
    let gamma0 = ConductivityField::uniform(&mesh, 1.0).unwrap();
    let background = compute_nd_map(&mesh, &gamma0, &basis).unwrap();
    let tau = default_tau(&background.matrix, 0.0).unwrap();
    Setup { mesh, basis, gamma0, background, tau }
}

impl Setup {
    fn with(&self, region: &RegionSpec<f64>, ext: Extreme) -> NdMap<f64> {
        let field = self.gamma0.clone().with_spec(&self.mesh, region, ext).unwrap();
        compute_nd_map(&self.mesh, &field, &self.basis).unwrap()
    }
}

#[test]
fn doubling_conductivity_lowers_the_map() {
    let s = setup(0.1, 4);
    let doubled = compute_nd_map(&s.mesh, &s.gamma0.scaled(2.0).unwrap(), &s.basis).unwrap();
    let out = loewner_test(&s.background.matrix, &doubled.matrix, 0.0).unwrap();
    assert!(out.passed);
    assert!((out.min_eig - 1.0 / 8.0).abs() < 0.01, "{}", out.min_eig);
}

#[test]
fn linearized_test_separates_inside_from_outside() {
    let s = setup(0.03, 8);
    let data = s.with(&RegionSpec::disk(0.0, 0.0, 0.3), Extreme::Insulating);
    let cfg = TestConfig::new(1.0, s.tau, TestMode::Insulating).unwrap();
    let inside = frechet_form(&s.mesh, &s.gamma0, &RegionSpec::disk(0.0, 0.0, 0.1), &s.basis).unwrap();
    assert!(linearized_definite_test(&data, &s.background, &inside, &cfg).unwrap().passed);
    let outside = frechet_form(&s.mesh, &s.gamma0, &RegionSpec::disk(0.6, 0.0, 0.1), &s.basis).unwrap();
    let out = linearized_definite_test(&data, &s.background, &outside, &cfg).unwrap();
    assert!(!out.passed && out.min_eig < -s.tau, "{}", out.min_eig);
}

#[test]
fn linearized_test_fails_without_inclusion() {
    let s = setup(0.08, 4);
    let b = frechet_form(&s.mesh, &s.gamma0, &RegionSpec::disk(0.2, 0.1, 0.15), &s.basis).unwrap();
    for mode in [TestMode::Insulating, TestMode::Conducting] {
        let cfg = TestConfig::new(1.0, s.tau, mode).unwrap();
        assert!(!linearized_definite_test(&s.background, &s.background, &b, &cfg).unwrap().passed);
    }
}

#[test]
fn nonlinear_test_on_concentric_disks() {
    let s = setup(0.05, 6);
    let data = s.with(&RegionSpec::disk(0.0, 0.0, 0.5), Extreme::Insulating);
    let cfg = TestConfig::new(0.5, s.tau, TestMode::Insulating).unwrap();
    let perturb = |b: &RegionSpec<f64>, beta: f64| {
        let mask = b.element_mask(&s.mesh);
        compute_nd_map(&s.mesh, &s.gamma0.perturbed(&mask, -beta).unwrap(), &s.basis).unwrap()
    };
    let inner = RegionSpec::disk(0.0, 0.0, 0.25);
    let out = nonlinear_definite_test(&data, &perturb(&inner, 0.5), &cfg, 1.0).unwrap();
    assert!(out.passed && !out.marginal);
    let small = TestConfig { beta: 1e-4, ..cfg };
    let out_small = nonlinear_definite_test(&data, &perturb(&inner, 1e-4), &small, 1.0).unwrap();
    let plain = loewner_test(&data.matrix, &s.background.matrix, 0.0).unwrap();
    assert!(out_small.passed && (out_small.min_eig - plain.min_eig).abs() < 1e-3 * plain.min_eig.abs().max(1e-3));
    let off = RegionSpec::disk(0.7, 0.0, 0.15);
    assert!(!nonlinear_definite_test(&data, &perturb(&off, 0.5), &cfg, 1.0).unwrap().passed);
}

#[test]
fn nonlinear_insulating_rejects_beta_at_infimum() {
    let s = setup(0.2, 2);
    let cfg = TestConfig::new(1.0, 0.0, TestMode::Insulating).unwrap();
    let r = nonlinear_definite_test(&s.background, &s.background, &cfg, 1.0);
    assert!(matches!(r, Err(EitError::Config(ref m)) if m.contains("beta < inf")));
}

#[test]
fn basis_mismatch_is_an_input_error() {
    let s = setup(0.1, 3);
    let other = build_boundary_basis(&s.mesh, BasisKind::Fourier { max_mode: 2 }).unwrap();
    let small = compute_nd_map(&s.mesh, &s.gamma0, &other).unwrap();
    assert!(matches!(indefinite_test(&small, &s.background, &s.background, 0.0), Err(EitError::Input(_))));
}

#[test]
fn indefinite_test_on_insulating_disk() {
    let s = setup(0.03, 8);
    let d = RegionSpec::disk(0.0, 0.0, 0.3);
    let data = s.with(&d, Extreme::Insulating);
    for (c, expect) in [(d.clone(), true), (RegionSpec::disk(0.0, 0.0, 0.45), true), (RegionSpec::disk(0.0, 0.0, 0.2), false)] {
        let l0 = s.with(&c, Extreme::Insulating);
        let linf = s.with(&c, Extreme::Conducting);
        let (passed, o) = indefinite_test(&data, &l0, &linf, s.tau).unwrap();
        assert_eq!(passed, expect, "{c:?}: {:?} {:?}", o.insulating, o.conducting);
    }
}

#[test]
fn empty_inclusion_reconstructs_nothing() {
    let s = setup(0.1, 4);
    let grid = PixelGrid::new([-1.0, -1.0], [1.0, 1.0], 6, 6).unwrap();
    let cfg = TestConfig::new(0.5, s.tau, TestMode::Insulating).unwrap();
    for pipeline in [DefinitePipeline::Linearized, DefinitePipeline::Nonlinear] {
        let r = reconstruct_definite(&s.mesh, &s.basis, &s.gamma0, &grid, &s.background, pipeline, &cfg).unwrap();
        assert_eq!(r.count(), 0, "{pipeline:?}");
    }
}

#[test]
fn indefinite_reconstruction_intersects_passing_sets() {
    let s = setup(0.05, 6);
    let d = RegionSpec::disk(0.0, 0.0, 0.3);
    let data = s.with(&d, Extreme::Insulating);
    let grid = PixelGrid::new([-1.0, -1.0], [1.0, 1.0], 20, 20).unwrap();
    let cache = NdCache::new();
    let dict = [RegionSpec::disk(0.0, 0.0, 0.45), RegionSpec::disk(0.0, 0.0, 0.6)];
    let r = reconstruct_indefinite(&s.mesh, &s.basis, &s.gamma0, &data, &dict, &grid, s.tau, &cache).unwrap();
    assert!(!r.vacuous);
    for k in 0..grid.len() {
        let p = grid.cell_center(grid.cell(k));
        assert_eq!(r.indicator[k], dict[0].contains(p));
    }
    assert_eq!(cache.len(), 4);
    let again = reconstruct_indefinite(&s.mesh, &s.basis, &s.gamma0, &data, &dict[..1], &grid, s.tau, &cache).unwrap();
    assert_eq!(cache.len(), 4);
    assert_eq!(again.indicator, r.indicator);
    let miss = [RegionSpec::disk(0.0, 0.0, 0.2)];
    let v = reconstruct_indefinite(&s.mesh, &s.basis, &s.gamma0, &data, &miss, &grid, s.tau, &cache).unwrap();
    assert!(v.vacuous && v.count() == grid.len());
    assert!(reconstruct_indefinite(&s.mesh, &s.basis, &s.gamma0, &data, &[], &grid, s.tau, &cache).is_err());
}

#[test]
fn phantom_rejects_overlap_and_values_on_the_wrong_side() {
    let mesh = generate_disk_mesh(0.1).unwrap();
    let gamma0 = ConductivityField::uniform(&mesh, 1.0).unwrap();
    let mut p = IndefinitePhantom::empty();
    p.d0 = RegionSpec::disk(-0.3, 0.0, 0.2);
    p.df_plus = RegionSpec::disk(-0.25, 0.0, 0.2);
    assert!(p.conductivity(&mesh, &gamma0).is_err());
    p.df_plus = RegionSpec::disk(0.3, 0.0, 0.2);
    p.gamma_plus = 0.8;
    assert!(p.conductivity(&mesh, &gamma0).is_err());
    p.gamma_plus = 2.0;
    let field = p.conductivity(&mesh, &gamma0).unwrap();
    assert!(field.has_extremes() && field.sup() == 2.0);
}

fn bounds_setup<'a>(s: &'a Setup, sigma2: f64, c0: RegionSpec<f64>, c_inf: RegionSpec<f64>) -> BoundsSetup<'a, f64> {
    BoundsSetup {
        mesh: &s.mesh,
        basis: &s.basis,
        sigma1: s.gamma0.clone(),
        sigma2: s.gamma0.scaled(sigma2).unwrap(),
        c0,
        c_inf,
    }
}

#[test]
fn background_change_bounds_closed_form() {
    let s = setup(0.03, 8);
    let r = verify_monotonicity_bounds(BoundsCase::Finite, &bounds_setup(&s, 2.0, RegionSpec::Empty, RegionSpec::Empty), None)
        .unwrap();
    assert!(r.holds(1e-6), "{}", r.worst_violation);
    let t = r.triples[0];
    assert!((t.lower.unwrap() + 0.5).abs() < 0.005);
    assert!((t.middle + 0.5).abs() < 0.005);
    assert!((t.upper.unwrap() + 0.25).abs() < 0.0025);
}

#[test]
fn equal_backgrounds_give_zero_triples() {
    let s = setup(0.08, 3);
    let st = bounds_setup(&s, 1.0, RegionSpec::disk(-0.3, 0.0, 0.2), RegionSpec::disk(0.3, 0.0, 0.2));
    let r = verify_monotonicity_bounds(BoundsCase::SameExtremes, &st, None).unwrap();
    for t in &r.triples {
        assert!(t.lower.unwrap().abs() < 1e-12 && t.middle.abs() < 1e-12 && t.upper.unwrap().abs() < 1e-12);
    }
}

#[test]
fn extreme_inclusion_bounds_hold() {
    let s = setup(0.05, 8);
    let c_inf = RegionSpec::disk(-0.2, 0.0, 0.35);
    let c0 = RegionSpec::disk(0.5, 0.2, 0.2);
    let ins = verify_monotonicity_bounds(BoundsCase::AddInsulating, &bounds_setup(&s, 1.0, c0.clone(), c_inf.clone()), None)
        .unwrap();
    assert_eq!(ins.triples.len(), 16);
    assert!(ins.holds(1e-6), "{}", ins.worst_violation);
    let cond =
        verify_monotonicity_bounds(BoundsCase::AddConducting, &bounds_setup(&s, 1.0, c0.clone(), c_inf.clone()), None).unwrap();
    assert!(cond.holds(1e-6) && cond.max_implied_constant.unwrap() > 0.0);
    let c = verify_monotonicity_bounds(BoundsCase::ConductingUpper, &bounds_setup(&s, 1.3, RegionSpec::Empty, c_inf), None)
        .unwrap();
    assert!(c.max_implied_constant.unwrap().is_finite());
    let i = verify_monotonicity_bounds(BoundsCase::InsulatingUpper, &bounds_setup(&s, 1.3, c0, RegionSpec::Empty), None).unwrap();
    assert!(i.holds(1e-6), "{}", i.worst_violation);
}

#[test]
fn bounds_case_needs_matching_inputs() {
    let s = setup(0.15, 2);
    let st = bounds_setup(&s, 2.0, RegionSpec::Empty, RegionSpec::Empty);
    assert!(matches!(verify_monotonicity_bounds(BoundsCase::AddInsulating, &st, None), Err(EitError::Input(_))));
    assert!(verify_monotonicity_bounds(BoundsCase::Finite, &st, Some(vec![vec![1.0]])).is_err());
}
