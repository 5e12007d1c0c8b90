use std::io::Write;

use log::info;
use serde_json::{json, Value};

use eit_core::fem::{compute_nd_map, solve_forward, truncated_conductivity, ConductivityField};
use eit_core::mesh::{build_boundary_basis, generate_disk_mesh, tag_regions, write_mesh, BoundaryBasis, Mesh};
use eit_core::monotonicity::{
    default_beta, default_dictionary, default_tau, reconstruct_definite, reconstruct_indefinite,
    verify_monotonicity_bounds, BoundsSetup, DefinitePipeline, NdCache, ReconstructionResult, TestConfig,
};
use eit_core::oracle::{ambiguity_gap, radial_nd_eigenvalue, RadialLayers};
use eit_core::EitError;

use crate::artifacts::Artifacts;
use crate::config::{ExperimentConfig, Method};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Mesh,
    Forward,
    NdMap,
    Reconstruct,
    Convergence,
    Oracle,
    VerifyBounds,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Mesh => "mesh",
            Self::Forward => "forward",
            Self::NdMap => "ndmap",
            Self::Reconstruct => "reconstruct",
            Self::Convergence => "convergence",
            Self::Oracle => "oracle",
            Self::VerifyBounds => "verify-bounds",
        }
    }
}

struct Problem {
    mesh: Mesh<f64>,
    basis: BoundaryBasis<f64>,
    gamma0: ConductivityField<f64>,
    field: ConductivityField<f64>,
}

fn problem(cfg: &ExperimentConfig, h: f64) -> Result<Problem, CliError> {
    let mesh = generate_disk_mesh(h)?;
    let basis = build_boundary_basis(&mesh, cfg.basis)?;
    let gamma0 = ConductivityField::uniform(&mesh, cfg.phantom.background)?;
    let field = cfg.phantom.to_phantom().conductivity(&mesh, &gamma0)?;
    info!("mesh h={h}: {} nodes, {} elements, {} basis functions", mesh.num_nodes(), mesh.num_elements(), basis.len());
    Ok(Problem { mesh, basis, gamma0, field })
}

fn write_tagged_mesh(cfg: &ExperimentConfig, mesh: &Mesh<f64>, out: &mut Artifacts) -> Result<Value, CliError> {
    let p = &cfg.phantom;
    let regions: Vec<_> = [&p.d0, &p.d_inf, &p.df_minus, &p.df_plus]
        .into_iter()
        .enumerate()
        .filter(|(_, r)| !r.is_empty_spec())
        .map(|(i, r)| (i as u32 + 1, r.clone()))
        .collect();
    let tagged = tag_regions(mesh, &regions)?;
    out.write("mesh.txt", |w| Ok(write_mesh(&tagged.mesh, w)?))?;
    Ok(json!({
        "nodes": mesh.num_nodes(),
        "elements": mesh.num_elements(),
        "region_elements": tagged.counts.iter().map(|(id, n)| json!({"region": id, "elements": n})).collect::<Vec<_>>(),
        "warnings": tagged.warnings,
    }))
}

/// Runs `command`; on error every file it wrote is removed again.
pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<std::path::PathBuf, CliError> {
    cfg.validate()?;
    let mut out = Artifacts::new(&cfg.output.dir)?;
    let results = match command {
        Command::Mesh => mesh(cfg, &mut out)?,
        Command::Forward => forward(cfg, &mut out)?,
        Command::NdMap => ndmap(cfg, &mut out)?,
        Command::Reconstruct => reconstruct(cfg, &mut out)?,
        Command::Convergence => convergence(cfg, &mut out)?,
        Command::Oracle => oracle(cfg, &mut out)?,
        Command::VerifyBounds => verify_bounds(cfg, &mut out)?,
    };
    out.finish(command.name(), results)
}

fn mesh(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let mesh = generate_disk_mesh(cfg.mesh.target_h)?;
    write_tagged_mesh(cfg, &mesh, out)
}

fn forward(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let p = problem(cfg, cfg.mesh.target_h)?;
    let coeffs = match &cfg.forward {
        Some(f) => f.coeffs.clone(),
        None => {
            let mut c = vec![0.0; p.basis.len()];
            c[0] = 1.0;
            c
        }
    };
    if coeffs.len() != p.basis.len() {
        return Err(CliError::Validation(format!(
            "forward.coeffs: basis has {} functions, got {} coefficients",
            p.basis.len(),
            coeffs.len()
        )));
    }
    let u = solve_forward(&p.mesh, &p.field, &p.basis, &coeffs)?;
    out.write("potential.csv", |w| Ok(u.write_csv(w)?))?;
    let trace = p.basis.trace_pairing(u.values());
    let pairing: f64 = coeffs.iter().zip(&trace).map(|(c, t)| c * t).sum();
    Ok(json!({
        "nodes": p.mesh.num_nodes(),
        "defined_nodes": u.defined_mask().iter().filter(|&&d| d).count(),
        "residual": u.residual(),
        "boundary_pairing": pairing,
    }))
}

fn ndmap(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let p = problem(cfg, cfg.mesh.target_h)?;
    let bg = compute_nd_map(&p.mesh, &p.gamma0, &p.basis)?;
    let data = compute_nd_map(&p.mesh, &p.field, &p.basis)?;
    out.write("nd_background.csv", |w| Ok(bg.write_csv(w)?))?;
    out.write("nd_data.csv", |w| Ok(data.write_csv(w)?))?;
    Ok(json!({
        "basis": data.basis,
        "dim": data.dim(),
        "sym_defect": data.sym_defect,
        "difference_norm": data.difference(&bg)?.spectral_norm_symmetric()?,
    }))
}

fn reconstruction_summary(r: &ReconstructionResult<f64>) -> Value {
    json!({
        "pixels": r.indicator.len(),
        "inside": r.count(),
        "marginal": r.marginal_count(),
        "vacuous": r.vacuous,
        "min_eig": r.min_eig,
        "dictionary": r.dictionary,
    })
}

fn reconstruct(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let p = problem(cfg, cfg.mesh.target_h)?;
    let mesh_info = write_tagged_mesh(cfg, &p.mesh, out)?;
    let bg = compute_nd_map(&p.mesh, &p.gamma0, &p.basis)?;
    let data = compute_nd_map(&p.mesh, &p.field, &p.basis)?;
    out.write("nd_background.csv", |w| Ok(bg.write_csv(w)?))?;
    out.write("nd_data.csv", |w| Ok(data.write_csv(w)?))?;
    let m = cfg.monotonicity.as_ref().ok_or_else(|| CliError::Validation("monotonicity: section required".into()))?;
    let tau = match m.tau {
        Some(t) => t + m.allowance,
        None => default_tau(&bg.matrix, m.allowance)?,
    };
    let beta = m.beta.unwrap_or_else(|| default_beta(p.gamma0.inf()));
    let result = match m.method {
        Method::Indefinite => {
            let dictionary = m.dictionary.clone().unwrap_or_else(|| default_dictionary(&p.mesh));
            info!("indefinite reconstruction over {} test sets", dictionary.len());
            let cache = NdCache::new();
            reconstruct_indefinite(&p.mesh, &p.basis, &p.gamma0, &data, &dictionary, &m.grid, tau, &cache)?
        }
        Method::Linearized | Method::Nonlinear => {
            let pipeline =
                if m.method == Method::Linearized { DefinitePipeline::Linearized } else { DefinitePipeline::Nonlinear };
            info!("{:?} reconstruction on a {}x{} grid", pipeline, m.grid.nx, m.grid.ny);
            let test = TestConfig::new(beta, tau, m.mode)?;
            reconstruct_definite(&p.mesh, &p.basis, &p.gamma0, &m.grid, &data, pipeline, &test)?
        }
    };
    let stem = "reconstruction";
    for name in [format!("{stem}_indicator.csv"), format!("{stem}_min_eig.csv"), format!("{stem}.pgm")] {
        let body = |w: &mut std::io::BufWriter<std::fs::File>| -> Result<(), CliError> {
            match name.rsplit('.').next() {
                Some("pgm") => result.write_pgm(w)?,
                _ if name.ends_with("_indicator.csv") => result.write_indicator_csv(w)?,
                _ => result.write_min_eig_csv(w)?,
            }
            Ok(())
        };
        out.write(&name, body)?;
    }
    Ok(json!({
        "mesh": mesh_info,
        "method": m.method,
        "mode": m.mode,
        "beta": beta,
        "tau": tau,
        "reconstruction": reconstruction_summary(&result),
    }))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() || y.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Some(sxy / sxx)
}

const SLOPE_WINDOW: usize = 4;

fn convergence(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| CliError::Validation("sweep: section required".into()))?;
    if sweep.eps.len() < 3 {
        return Err(EitError::Input(format!("sweep.eps: at least 3 values needed, got {}", sweep.eps.len())).into());
    }
    if !cfg.phantom.has_extremes() {
        return Err(CliError::Validation("phantom: convergence study needs a nonempty d0 or d_inf".into()));
    }
    let hs = if sweep.h.is_empty() { vec![cfg.mesh.target_h] } else { sweep.h.clone() };
    let mut rows = Vec::new();
    let mut per_h = Vec::new();
    for &h in &hs {
        let p = problem(cfg, h)?;
        let limit = compute_nd_map(&p.mesh, &p.field, &p.basis)?;
        let mut norms = Vec::with_capacity(sweep.eps.len());
        for &eps in &sweep.eps {
            let nd = compute_nd_map(&p.mesh, &truncated_conductivity(&p.field, eps)?, &p.basis)?;
            let norm = nd.difference(&limit)?.spectral_norm_symmetric()?;
            norms.push(norm);
            let lo = norms.len().saturating_sub(SLOPE_WINDOW);
            let slope = loglog_slope(&sweep.eps[lo..norms.len()], &norms[lo..]);
            info!("h={h} eps={eps:e}: {norm:e}");
            rows.push((h, eps, norm, slope));
        }
        let lo = norms.len() - SLOPE_WINDOW.min(norms.len());
        per_h.push(json!({
            "h": h,
            "norms": norms,
            "slope": loglog_slope(&sweep.eps[lo..], &norms[lo..]),
        }));
    }
    out.write("convergence.csv", |w| {
        writeln!(w, "h,eps,norm,slope").map_err(EitError::from)?;
        for (h, eps, norm, slope) in &rows {
            let s = slope.map(|s| s.to_string()).unwrap_or_default();
            writeln!(w, "{h},{eps},{norm},{s}").map_err(EitError::from)?;
        }
        Ok(())
    })?;
    Ok(json!({ "eps": sweep.eps, "slope_window": SLOPE_WINDOW, "studies": per_h }))
}

fn oracle(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let o = cfg.oracle.as_ref().ok_or_else(|| CliError::Validation("oracle: section required".into()))?;
    let layers = RadialLayers::new(o.radii.clone(), o.values.clone())?;
    let values = (1..=o.max_mode).map(|k| radial_nd_eigenvalue(&layers, k)).collect::<Result<Vec<_>, _>>()?;
    out.write("oracle.csv", |w| {
        writeln!(w, "k,lambda").map_err(EitError::from)?;
        for (k, v) in values.iter().enumerate() {
            writeln!(w, "{},{v}", k + 1).map_err(EitError::from)?;
        }
        Ok(())
    })?;
    Ok(json!({ "eigenvalues": values, "ambiguity_gap": ambiguity_gap::<f64>() }))
}

fn verify_bounds(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let b = cfg.bounds.as_ref().ok_or_else(|| CliError::Validation("bounds: section required".into()))?;
    let mesh = generate_disk_mesh(cfg.mesh.target_h)?;
    let basis = build_boundary_basis(&mesh, cfg.basis)?;
    let gamma0 = ConductivityField::uniform(&mesh, cfg.phantom.background)?;
    let setup = BoundsSetup {
        mesh: &mesh,
        basis: &basis,
        sigma2: gamma0.scaled(b.scale)?,
        sigma1: gamma0,
        c0: b.c0.clone(),
        c_inf: b.c_inf.clone(),
    };
    let report = verify_monotonicity_bounds(b.case, &setup, None)?;
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    out.write("bounds.csv", |w| {
        writeln!(w, "probe,lower,middle,upper,implied_constant").map_err(EitError::from)?;
        for (i, t) in report.triples.iter().enumerate() {
            writeln!(w, "{i},{},{},{},{}", cell(t.lower), t.middle, cell(t.upper), cell(t.implied_constant))
                .map_err(EitError::from)?;
        }
        Ok(())
    })?;
    Ok(json!({
        "case": b.case,
        "probes": report.triples.len(),
        "worst_violation": report.worst_violation,
        "scale": report.scale,
        "holds": report.holds(1e-6),
        "max_implied_constant": report.max_implied_constant,
    }))
}
