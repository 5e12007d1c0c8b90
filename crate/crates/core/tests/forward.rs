use eit_core::fem::{
    compute_nd_map, dirichlet_energy, extend_into_insulator, frechet_form, solve_forward, solve_via_projection,
    truncated_conductivity, ConductivityField, EnergyWeight, Extreme, ForwardSolver, NdMap,
};
use eit_core::mesh::{build_boundary_basis, carve_insulating, generate_disk_mesh, tag_regions, BasisKind, RegionSpec};
use eit_core::oracle::{radial_nd_eigenvalue, LayerValue, RadialLayers};
use eit_core::EitError;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn homogeneous_spectrum_is_inverse_mode() {
    let mesh = generate_disk_mesh(0.05).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 4 }).unwrap();
    let field = ConductivityField::uniform(&mesh, 1.0).unwrap();
    let nd = compute_nd_map(&mesh, &field, &basis).unwrap();
    for j in 0..8 {
        let k = (j / 2 + 1) as f64;
        assert!(rel(nd.matrix[(j, j)], 1.0 / k) < 0.01, "entry {j}: {}", nd.matrix[(j, j)]);
    }
    assert!(nd.sym_defect < 1e-8);
}

#[test]
fn nd_scales_inversely_with_conductivity() {
    let mesh = generate_disk_mesh(0.1).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 3 }).unwrap();
    let a = compute_nd_map(&mesh, &ConductivityField::uniform(&mesh, 1.0).unwrap(), &basis).unwrap();
    let b = compute_nd_map(&mesh, &ConductivityField::uniform(&mesh, 2.0).unwrap(), &basis).unwrap();
    let diff = a.matrix.sub(&b.matrix.scale(2.0)).unwrap();
    assert!(diff.max_abs() < 1e-10);
}

#[test]
fn insulating_disk_matches_transfer_matrix() {
    let mesh = generate_disk_mesh(0.03).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 2 }).unwrap();
    let disk = RegionSpec::disk(0.0, 0.0, 0.5);
    let field = ConductivityField::uniform(&mesh, 1.0).unwrap().with_spec(&mesh, &disk, Extreme::Insulating).unwrap();
    let nd = compute_nd_map(&mesh, &field, &basis).unwrap();
    let layers = RadialLayers::two_layer(0.5, LayerValue::Insulating, 1.0).unwrap();
    for j in 0..4 {
        let lam = radial_nd_eigenvalue(&layers, j / 2 + 1).unwrap();
        assert!(rel(nd.matrix[(j, j)], lam) < 0.01, "{j}: {} vs {lam}", nd.matrix[(j, j)]);
    }
}

#[test]
fn conducting_disk_matches_transfer_matrix_and_truncation() {
    let mesh = generate_disk_mesh(0.03).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 1 }).unwrap();
    let disk = RegionSpec::disk(0.0, 0.0, 0.5);
    let field = ConductivityField::uniform(&mesh, 1.0).unwrap().with_spec(&mesh, &disk, Extreme::Conducting).unwrap();
    let nd = compute_nd_map(&mesh, &field, &basis).unwrap();
    assert!(rel(nd.matrix[(0, 0)], 0.6) < 0.01);
    let t = compute_nd_map(&mesh, &truncated_conductivity(&field, 1e-3).unwrap(), &basis).unwrap();
    assert!(rel(nd.matrix[(0, 0)], t.matrix[(0, 0)]) < 0.005);
}

#[test]
fn carved_mesh_gives_the_same_map_as_element_removal() {
    let mesh = generate_disk_mesh(0.1).unwrap();
    let tagged = tag_regions(&mesh, &[(1, RegionSpec::disk(0.1, 0.0, 0.35))]).unwrap().mesh;
    let carved = carve_insulating(&tagged, 1).unwrap();
    let basis_full = build_boundary_basis(&tagged, BasisKind::Fourier { max_mode: 3 }).unwrap();
    let basis_carved = build_boundary_basis(&carved, BasisKind::Fourier { max_mode: 3 }).unwrap();
    let field = ConductivityField::uniform(&tagged, 1.0).unwrap().with_region(&tagged, 1, Extreme::Insulating).unwrap();
    let a = compute_nd_map(&tagged, &field, &basis_full).unwrap();
    let b = compute_nd_map(&carved, &ConductivityField::uniform(&carved, 1.0).unwrap(), &basis_carved).unwrap();
    assert!(a.matrix.sub(&b.matrix).unwrap().max_abs() < 1e-10);
}

fn projection_case(insulating: bool, conducting: bool) -> f64 {
    let mesh = generate_disk_mesh(0.06).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 3 }).unwrap();
    let bg: Vec<f64> = (0..mesh.num_elements())
        .map(|e| {
            let c = mesh.centroid(e);
            1.0 + 0.3 * c[0] + 0.2 * c[1] * c[1]
        })
        .collect();
    let mut field = ConductivityField::from_background(bg).unwrap();
    if insulating {
        field = field.with_spec(&mesh, &RegionSpec::disk(-0.35, 0.1, 0.2), Extreme::Insulating).unwrap();
    }
    if conducting {
        field = field.with_spec(&mesh, &RegionSpec::disk(0.35, -0.1, 0.2), Extreme::Conducting).unwrap();
    }
    let coeffs = [0.7, -0.2, 0.4, 0.1, -0.5, 0.3];
    let direct = solve_forward(&mesh, &field, &basis, &coeffs).unwrap();
    let projected = solve_via_projection(&mesh, &field, &basis, &coeffs).unwrap();
    assert_eq!(direct.defined_mask(), projected.defined_mask());
    let num: f64 = direct.values().iter().zip(projected.values()).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = direct.values().iter().map(|a| a * a).sum();
    (num / den).sqrt()
}

#[test]
fn projection_agrees_with_direct_solve() {
    for (i, c) in [(true, false), (false, true), (true, true)] {
        let r = projection_case(i, c);
        assert!(r < 1e-8, "insulating={i} conducting={c}: {r:e}");
    }
}

#[test]
fn energy_equals_boundary_pairing() {
    let mesh = generate_disk_mesh(0.08).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 3 }).unwrap();
    let field = ConductivityField::uniform(&mesh, 1.5)
        .unwrap()
        .with_spec(&mesh, &RegionSpec::disk(0.2, 0.2, 0.25), Extreme::Insulating)
        .unwrap()
        .with_spec(&mesh, &RegionSpec::disk(-0.3, -0.2, 0.2), Extreme::Conducting)
        .unwrap();
    let nd = compute_nd_map(&mesh, &field, &basis).unwrap();
    let solver = ForwardSolver::new(&mesh, &field, &basis).unwrap();
    for j in 0..basis.len() {
        let mut c = vec![0.0; basis.len()];
        c[j] = 1.0;
        let u = solver.solve(&c).unwrap();
        let e = dirichlet_energy(&mesh, &u, &field, None, EnergyWeight::Conductivity).unwrap();
        assert!(rel(e, nd.matrix[(j, j)]) < 1e-9, "{j}: {e} vs {}", nd.matrix[(j, j)]);
        assert!(u.residual() < 1e-10);
    }
}

#[test]
fn unit_energy_of_first_mode() {
    let mesh = generate_disk_mesh(0.02).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 1 }).unwrap();
    let field = ConductivityField::uniform(&mesh, 1.0).unwrap();
    let u = solve_forward(&mesh, &field, &basis, &[1.0, 0.0]).unwrap();
    let e = dirichlet_energy(&mesh, &u, &field, None, EnergyWeight::Unit).unwrap();
    assert!(rel(e, 1.0) < 0.01);
}

#[test]
fn extension_reproduces_limit_interior_slope() {
    let mesh = generate_disk_mesh(0.03).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 1 }).unwrap();
    let field = ConductivityField::uniform(&mesh, 1.0)
        .unwrap()
        .with_spec(&mesh, &RegionSpec::disk(0.0, 0.0, 0.5), Extreme::Insulating)
        .unwrap();
    let u = solve_forward(&mesh, &field, &basis, &[std::f64::consts::PI.sqrt(), 0.0]).unwrap();
    assert!(!u.is_fully_defined());
    let eu = extend_into_insulator(&mesh, &u, &field).unwrap();
    assert!(eu.is_fully_defined());
    // interior limit potential is (8/3) r cos θ
    let mut worst: f64 = 0.0;
    for (i, p) in mesh.nodes().iter().enumerate() {
        let r = p[0].hypot(p[1]);
        if r < 0.45 {
            worst = worst.max((eu.values()[i] - 8.0 / 3.0 * p[0]).abs());
        }
    }
    assert!(worst < 0.01, "{worst}");
}

#[test]
fn extension_requires_full_mesh_potential() {
    let mesh = generate_disk_mesh(0.1).unwrap();
    let tagged = tag_regions(&mesh, &[(1, RegionSpec::disk(0.0, 0.0, 0.4))]).unwrap().mesh;
    let carved = carve_insulating(&tagged, 1).unwrap();
    let basis = build_boundary_basis(&carved, BasisKind::Fourier { max_mode: 1 }).unwrap();
    let field_c = ConductivityField::uniform(&carved, 1.0).unwrap();
    let u = solve_forward(&carved, &field_c, &basis, &[1.0, 0.0]).unwrap();
    let field = ConductivityField::uniform(&tagged, 1.0).unwrap().with_region(&tagged, 1, Extreme::Insulating).unwrap();
    assert!(matches!(extend_into_insulator(&tagged, &u, &field), Err(EitError::Input(_))));
    let lifted = u.lift(&carved, &tagged).unwrap();
    let eu = extend_into_insulator(&tagged, &lifted, &field).unwrap();
    assert!(eu.is_fully_defined());
}

#[test]
fn frechet_form_closed_forms() {
    let mesh = generate_disk_mesh(0.02).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 3 }).unwrap();
    let gamma0 = ConductivityField::uniform(&mesh, 1.0).unwrap();
    let f = frechet_form(&mesh, &gamma0, &RegionSpec::disk(0.0, 0.0, 0.5), &basis).unwrap();
    assert!(rel(f[(0, 0)], -0.25) < 0.01, "{}", f[(0, 0)]);
    let whole = frechet_form(&mesh, &gamma0, &RegionSpec::disk(0.0, 0.0, 2.0), &basis).unwrap();
    for j in 0..6 {
        let k = (j / 2 + 1) as f64;
        assert!(rel(whole[(j, j)], -1.0 / k) < 0.01);
    }
    let empty = frechet_form(&mesh, &gamma0, &RegionSpec::disk(0.0, 0.0, 1e-4), &basis).unwrap();
    assert_eq!(empty.max_abs(), 0.0);
}

#[test]
fn single_precision_forward_solve() {
    let mesh = generate_disk_mesh(0.08f32).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 2 }).unwrap();
    let field = ConductivityField::uniform(&mesh, 1.0f32).unwrap();
    let nd = compute_nd_map(&mesh, &field, &basis).unwrap();
    assert!((nd.matrix[(0, 0)] - 1.0).abs() < 0.02);
    assert!((nd.matrix[(2, 2)] - 0.5).abs() < 0.02);
}

#[test]
fn nd_csv_round_trip() {
    let mesh = generate_disk_mesh(0.15).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 2 }).unwrap();
    let nd = compute_nd_map(&mesh, &ConductivityField::uniform(&mesh, 1.0).unwrap(), &basis).unwrap();
    let mut buf = Vec::new();
    nd.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("# basis=fourier:K=2 m=4 sym_defect="));
    let back: NdMap<f64> = NdMap::read_csv(&buf[..]).unwrap();
    assert_eq!(back.basis, nd.basis);
    assert!(back.matrix.sub(&nd.matrix).unwrap().max_abs() < 1e-15);
}

#[test]
fn inadmissible_field_is_rejected() {
    let mesh = generate_disk_mesh(0.1).unwrap();
    let basis = build_boundary_basis(&mesh, BasisKind::Fourier { max_mode: 1 }).unwrap();
    let field = ConductivityField::uniform(&mesh, 1.0)
        .unwrap()
        .with_spec(&mesh, &RegionSpec::disk(0.0, 0.0, 0.99), Extreme::Insulating)
        .unwrap();
    assert!(matches!(compute_nd_map(&mesh, &field, &basis), Err(EitError::Admissibility(_))));
}
