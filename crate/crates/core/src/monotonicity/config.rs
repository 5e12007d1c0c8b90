use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// Which extreme the data is assumed to contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMode {
    Insulating,
    Conducting,
    Indefinite,
}

/// Contrast `β`, semidefiniteness tolerance `τ` and mode of a test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig<T> {
    pub beta: T,
    pub tau: T,
    pub mode: TestMode,
}

impl<T: Real> TestConfig<T> {
    pub fn new(beta: T, tau: T, mode: TestMode) -> Result<Self> {
        let cfg = Self { beta, tau, mode };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > T::zero() && self.beta.is_finite()) {
            return Err(EitError::Config(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.tau >= T::zero() && self.tau.is_finite()) {
            return Err(EitError::Config(format!("tau must be nonnegative, got {}", self.tau)));
        }
        Ok(())
    }

    /// Linearized tests need `0 < β ≤ inf γ₀`.
    pub fn check_linearized(&self, inf_gamma0: T) -> Result<()> {
        self.validate()?;
        if self.beta > inf_gamma0 {
            return Err(EitError::Config(format!(
                "linearized test needs 0 < beta <= inf(gamma0) = {inf_gamma0}, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    /// Nonlinear tests need `0 < β < inf γ₀` in insulating mode and `β > 0` in conducting mode.
    pub fn check_nonlinear(&self, inf_gamma0: T) -> Result<()> {
        self.validate()?;
        if self.mode == TestMode::Insulating && !(self.beta < inf_gamma0) {
            return Err(EitError::Config(format!(
                "nonlinear insulating test needs 0 < beta < inf(gamma0) = {inf_gamma0}, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// `τ = 10³ · ε_mach · ‖Λ_bg‖₂ + allowance`.
pub fn default_tau<T: Real>(nd_background: &DenseMatrix<T>, allowance: T) -> Result<T> {
    if !(allowance >= T::zero()) {
        return Err(EitError::Config("discretization allowance must be nonnegative".into()));
    }
    Ok(T::lit(1e3) * T::epsilon() * nd_background.spectral_norm_symmetric()? + allowance)
}

/// `β = inf(γ₀) / 2`.
pub fn default_beta<T: Real>(inf_gamma0: T) -> T {
    inf_gamma0 * T::lit(0.5)
}
