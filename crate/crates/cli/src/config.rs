//! Experiment configuration, read from TOML.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use eit_core::mesh::{BasisKind, PixelGrid, RegionSpec};
use eit_core::monotonicity::{BoundsCase, IndefinitePhantom, TestConfig, TestMode};
use eit_core::oracle::LayerValue;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mesh: MeshConfig,
    #[serde(default = "default_basis")]
    pub basis: BasisKind,
    #[serde(default)]
    pub phantom: PhantomConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotonicity: Option<MonotonicityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forward: Option<ForwardConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub target_h: f64,
}

fn default_basis() -> BasisKind {
    BasisKind::Fourier { max_mode: 8 }
}

fn empty() -> RegionSpec<f64> {
    RegionSpec::Empty
}

/// Background value and the four inclusion parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhantomConfig {
    #[serde(default = "one")]
    pub background: f64,
    #[serde(default = "empty")]
    pub d0: RegionSpec<f64>,
    #[serde(default = "empty")]
    pub d_inf: RegionSpec<f64>,
    #[serde(default = "empty")]
    pub df_minus: RegionSpec<f64>,
    #[serde(default = "empty")]
    pub df_plus: RegionSpec<f64>,
    #[serde(default = "half")]
    pub gamma_minus: f64,
    #[serde(default = "two")]
    pub gamma_plus: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

fn two() -> f64 {
    2.0
}

impl Default for PhantomConfig {
    fn default() -> Self {
        Self {
            background: 1.0,
            d0: empty(),
            d_inf: empty(),
            df_minus: empty(),
            df_plus: empty(),
            gamma_minus: 0.5,
            gamma_plus: 2.0,
        }
    }
}

impl PhantomConfig {
    pub fn to_phantom(&self) -> IndefinitePhantom<f64> {
        IndefinitePhantom {
            d0: self.d0.clone(),
            d_inf: self.d_inf.clone(),
            df_minus: self.df_minus.clone(),
            df_plus: self.df_plus.clone(),
            gamma_minus: self.gamma_minus,
            gamma_plus: self.gamma_plus,
        }
    }

    pub fn has_extremes(&self) -> bool {
        !(self.d0.is_empty_spec() && self.d_inf.is_empty_spec())
    }

    fn has_finite_parts(&self) -> bool {
        !(self.df_minus.is_empty_spec() && self.df_plus.is_empty_spec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Linearized,
    Nonlinear,
    Indefinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotonicityConfig {
    pub method: Method,
    /// Ignored by the indefinite method.
    pub mode: TestMode,
    /// Defaults to `inf(γ₀)/2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Defaults to `10³·ε_mach·‖Λ(γ₀)‖₂ + allowance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default)]
    pub allowance: f64,
    #[serde(default = "default_grid")]
    pub grid: PixelGrid<f64>,
    /// Test sets of the indefinite method; defaults to the built-in dictionary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dictionary: Option<Vec<RegionSpec<f64>>>,
}

fn default_grid() -> PixelGrid<f64> {
    PixelGrid::square(20)
}

impl Default for MonotonicityConfig {
    fn default() -> Self {
        Self {
            method: Method::Linearized,
            mode: TestMode::Insulating,
            beta: None,
            tau: None,
            allowance: 0.0,
            grid: default_grid(),
            dictionary: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardConfig {
    /// Coefficients of the applied current in the boundary basis.
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Truncation parameters, strictly decreasing.
    #[serde(default)]
    pub eps: Vec<f64>,
    /// Mesh sizes; defaults to `mesh.target_h` alone.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Outer radii of the layers, increasing and ending at 1.
    pub radii: Vec<f64>,
    pub values: Vec<LayerValue<f64>>,
    pub max_mode: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub case: BoundsCase,
    /// The second conductivity is `scale · γ₀`.
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default = "empty")]
    pub c0: RegionSpec<f64>,
    #[serde(default = "empty")]
    pub c_inf: RegionSpec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{field}: {msg}"))
}

fn check_region(field: &str, r: &RegionSpec<f64>) -> Result<(), CliError> {
    r.validate().map_err(|e| field_error(field, e))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Validation(format!("cannot serialize config: {e}")))
    }

    /// Range and consistency checks that need no mesh.
    pub fn validate(&self) -> Result<(), CliError> {
        let h = self.mesh.target_h;
        if !(h > 0.0 && h < 1.0) {
            return Err(field_error("mesh.target_h", format!("must lie in (0, 1), got {h}")));
        }
        match self.basis {
            BasisKind::Fourier { max_mode: 0 } => return Err(field_error("basis.max_mode", "must be at least 1")),
            BasisKind::EdgePiecewise { groups: 0 } => return Err(field_error("basis.groups", "must be at least 1")),
            _ => {}
        }
        let p = &self.phantom;
        if !(p.background > 0.0 && p.background.is_finite()) {
            return Err(field_error("phantom.background", format!("must be positive, got {}", p.background)));
        }
        for (name, r) in [("phantom.d0", &p.d0), ("phantom.d_inf", &p.d_inf), ("phantom.df_minus", &p.df_minus), ("phantom.df_plus", &p.df_plus)] {
            check_region(name, r)?;
        }
        if !p.df_minus.is_empty_spec() && !(p.gamma_minus > 0.0 && p.gamma_minus < p.background) {
            return Err(field_error("phantom.gamma_minus", format!("must lie in (0, {}), got {}", p.background, p.gamma_minus)));
        }
        if !p.df_plus.is_empty_spec() && !(p.gamma_plus > p.background && p.gamma_plus.is_finite()) {
            return Err(field_error("phantom.gamma_plus", format!("must exceed {}, got {}", p.background, p.gamma_plus)));
        }
        if let Some(m) = &self.monotonicity {
            self.validate_monotonicity(m)?;
        }
        if let Some(s) = &self.sweep {
            if s.eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                return Err(field_error("sweep.eps", "values must be positive"));
            }
            if s.eps.windows(2).any(|w| w[1] >= w[0]) {
                return Err(field_error("sweep.eps", "values must be strictly decreasing"));
            }
            if s.h.iter().any(|h| !(*h > 0.0 && *h < 1.0)) {
                return Err(field_error("sweep.h", "values must lie in (0, 1)"));
            }
        }
        if let Some(o) = &self.oracle {
            if o.radii.len() != o.values.len() {
                return Err(field_error("oracle.values", "needs one value per radius"));
            }
            if o.max_mode == 0 {
                return Err(field_error("oracle.max_mode", "must be at least 1"));
            }
        }
        if let Some(b) = &self.bounds {
            if !(b.scale > 0.0 && b.scale.is_finite()) {
                return Err(field_error("bounds.scale", format!("must be positive, got {}", b.scale)));
            }
            check_region("bounds.c0", &b.c0)?;
            check_region("bounds.c_inf", &b.c_inf)?;
        }
        Ok(())
    }

    fn validate_monotonicity(&self, m: &MonotonicityConfig) -> Result<(), CliError> {
        m.grid.validate().map_err(|e| field_error("monotonicity.grid", e))?;
        if !(m.allowance >= 0.0 && m.allowance.is_finite()) {
            return Err(field_error("monotonicity.allowance", "must be nonnegative"));
        }
        if let Some(d) = &m.dictionary {
            if d.is_empty() {
                return Err(field_error("monotonicity.dictionary", "must not be empty"));
            }
            for (i, c) in d.iter().enumerate() {
                check_region(&format!("monotonicity.dictionary[{i}]"), c)?;
            }
        }
        let inf = self.phantom.background;
        let cfg = |mode| TestConfig { beta: m.beta.unwrap_or(inf / 2.0), tau: m.tau.unwrap_or(0.0), mode };
        let p = &self.phantom;
        match m.method {
            Method::Indefinite => {
                cfg(TestMode::Indefinite).validate().map_err(|e| field_error("monotonicity", e))?;
            }
            Method::Linearized | Method::Nonlinear => {
                let c = cfg(m.mode);
                let check = if m.method == Method::Linearized { c.check_linearized(inf) } else { c.check_nonlinear(inf) };
                check.map_err(|e| field_error("monotonicity.beta", e))?;
                let wrong = match m.mode {
                    TestMode::Insulating => !p.d_inf.is_empty_spec() || p.has_finite_parts(),
                    TestMode::Conducting => !p.d0.is_empty_spec() || p.has_finite_parts(),
                    TestMode::Indefinite => {
                        return Err(field_error("monotonicity.mode", "definite methods need insulating or conducting"))
                    }
                };
                if wrong {
                    return Err(field_error(
                        "phantom",
                        format!("{:?} {:?} reconstruction needs a phantom with only that extreme", m.method, m.mode),
                    ));
                }
            }
        }
        Ok(())
    }
}
