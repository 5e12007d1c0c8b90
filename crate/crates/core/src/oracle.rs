//! Closed-form reference solutions on the unit disk.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{EitError, Result};
use crate::scalar::Real;

/// Conductivity of one radial layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerValue<T> {
    Finite(T),
    Insulating,
    Conducting,
}

/// Concentric layers `r_{i-1} < r < r_i` with `r_0 = 0` and `r_L = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialLayers<T> {
    radii: Vec<T>,
    values: Vec<LayerValue<T>>,
}

impl<T: Real> RadialLayers<T> {
    pub fn new(radii: Vec<T>, values: Vec<LayerValue<T>>) -> Result<Self> {
        if radii.is_empty() || radii.len() != values.len() {
            return Err(EitError::Input("need one value per layer and at least one layer".into()));
        }
        if !(radii[0] > T::zero()) || radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(EitError::Input("layer radii must be positive and strictly increasing".into()));
        }
        if (*radii.last().unwrap() - T::one()).abs() > T::epsilon() {
            return Err(EitError::Input("outermost layer must end at radius 1".into()));
        }
        for (i, v) in values.iter().enumerate() {
            match v {
                LayerValue::Finite(s) if !(s.is_finite() && *s > T::zero()) => {
                    return Err(EitError::Input(format!("layer {i} conductivity {s} is not in (0, ∞)")));
                }
                LayerValue::Insulating | LayerValue::Conducting if i > 0 || values.len() == 1 => {
                    return Err(EitError::Input("only an inner layer below an outer finite layer may be extreme".into()));
                }
                _ => {}
            }
        }
        Ok(Self { radii, values })
    }

    pub fn homogeneous(value: T) -> Result<Self> {
        Self::new(vec![T::one()], vec![LayerValue::Finite(value)])
    }

    /// Inner disk of radius `r` with `inner`, surrounded by conductivity `outer`.
    pub fn two_layer(r: T, inner: LayerValue<T>, outer: T) -> Result<Self> {
        Self::new(vec![r, T::one()], vec![inner, LayerValue::Finite(outer)])
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn values(&self) -> &[LayerValue<T>] {
        &self.values
    }

    /// Coefficients `(A_i, B_i)` of `u = A r^k + B r^{-k}` in each layer for
    /// Neumann data `e^{ikθ}` at `r = 1`. For an extreme core the entry is the
    /// trace coefficient outside it.
    fn coefficients(&self, k: usize) -> Vec<(T, T)> {
        let kk = T::from_usize_lossy(k);
        let pow = |r: T, e: T| r.powf(e);
        let mut out = Vec::with_capacity(self.values.len());
        let r1 = self.radii[0];
        let (mut a, mut b, start) = match self.values[0] {
            LayerValue::Finite(_) => (T::one(), T::zero(), 0),
            LayerValue::Insulating => (T::one(), pow(r1, kk + kk), 1),
            LayerValue::Conducting => (T::one(), -pow(r1, kk + kk), 1),
        };
        if start == 1 {
            out.push((T::zero(), T::zero()));
        }
        out.push((a, b));
        let sigma = |v: LayerValue<T>| match v {
            LayerValue::Finite(s) => s,
            _ => unreachable!("extreme layers are only innermost"),
        };
        for i in (start + 1)..self.values.len() {
            let ra = self.radii[i - 1];
            let rho = sigma(self.values[i - 1]) / sigma(self.values[i]);
            let (x, y) = (a * pow(ra, kk), b * pow(ra, -kk));
            let (s, d) = (x + y, x - y);
            let half = T::lit(0.5);
            let (xo, yo) = ((s + rho * d) * half, (s - rho * d) * half);
            a = xo * pow(ra, -kk);
            b = yo * pow(ra, kk);
            let scale = a.abs().max(b.abs());
            a /= scale;
            b /= scale;
            for c in out.iter_mut() {
                c.0 /= scale;
                c.1 /= scale;
            }
            out.push((a, b));
        }
        let outer = sigma(*self.values.last().unwrap());
        let norm = T::one() / (outer * kk * (a - b));
        out.iter().map(|&(a, b)| (a * norm, b * norm)).collect()
    }

    /// Radial factor `R(r)` of the potential `R(r) e^{ikθ}` for Neumann data
    /// `e^{ikθ}`. Inside a conducting core it is 0; inside an insulating core
    /// it is undefined and `None` is returned.
    pub fn radial_potential(&self, k: usize, r: T) -> Result<Option<T>> {
        if k == 0 {
            return Err(EitError::Input("Fourier mode must be at least 1".into()));
        }
        if !(r > T::zero() && r <= T::one()) {
            return Err(EitError::Domain(format!("radius {r} outside (0, 1]")));
        }
        let layer = self.radii.iter().position(|&ri| r <= ri).unwrap_or(self.radii.len() - 1);
        match (layer, self.values[0]) {
            (0, LayerValue::Insulating) => return Ok(None),
            (0, LayerValue::Conducting) => return Ok(Some(T::zero())),
            _ => {}
        }
        let (a, b) = self.coefficients(k)[layer];
        let kk = T::from_usize_lossy(k);
        Ok(Some(a * r.powf(kk) + b * r.powf(-kk)))
    }
}

/// `λ_k` with `u|_{r=1} = λ_k e^{ikθ}` for Neumann data `e^{ikθ}`; equivalently
/// the ND eigenvalue of the radial conductivity on Fourier mode `k`.
pub fn radial_nd_eigenvalue<T: Real>(layers: &RadialLayers<T>, k: usize) -> Result<T> {
    Ok(layers.radial_potential(k, T::one())?.expect("outer layer is finite"))
}

/// The two conductivity sequences of the disk ambiguity example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbiguityVariant {
    /// `ε` on `r < 1/2`, 1 outside.
    Sigma,
    /// `ε²` on `r < 1/4`, `ε` on `1/4 < r < 1/2`, 1 outside.
    SigmaHat,
}

/// Potential of the ambiguity example for `f = e^{iθ}`; `eps = 0` gives the
/// limit potential.
pub fn ambiguity_potential<T: Real>(variant: AmbiguityVariant, eps: T, r: T, theta: T) -> Result<Complex<T>> {
    if !(r > T::zero() && r <= T::one()) {
        return Err(EitError::Domain(format!("radius {r} outside (0, 1]")));
    }
    if !(eps >= T::zero() && eps.is_finite()) {
        return Err(EitError::Domain(format!("eps must be nonnegative, got {eps}")));
    }
    let l = T::lit;
    let (half, quarter) = (l(0.5), l(0.25));
    let radial = match variant {
        AmbiguityVariant::Sigma => {
            let d = l(3.0) + l(5.0) * eps;
            if r < half {
                l(8.0) * r / d
            } else {
                (l(4.0) * (T::one() + eps) * r + (T::one() - eps) / r) / d
            }
        }
        AmbiguityVariant::SigmaHat => {
            let d = l(15.0) + l(24.0) * eps + l(25.0) * eps * eps;
            if r < quarter {
                l(64.0) * r / d
            } else if r < half {
                (l(32.0) * (T::one() + eps) * r + l(2.0) * (T::one() - eps) / r) / d
            } else {
                (l(4.0) * (l(5.0) + l(6.0) * eps + l(5.0) * eps * eps) * r + l(5.0) * (T::one() - eps * eps) / r) / d
            }
        }
    };
    Ok(Complex::from_polar(radial, theta))
}

/// Gap `64/15 − 8/3` between the interior slopes of the two limit potentials.
pub fn ambiguity_gap<T: Real>() -> T {
    T::lit(64.0) / T::lit(15.0) - T::lit(8.0) / T::lit(3.0)
}

/// Layers of the `σ_ε` sequence (`ε = 0` makes the core insulating).
pub fn ambiguity_layers<T: Real>(variant: AmbiguityVariant, eps: T) -> Result<RadialLayers<T>> {
    let core = |v: T| if v > T::zero() { LayerValue::Finite(v) } else { LayerValue::Insulating };
    match variant {
        AmbiguityVariant::Sigma => RadialLayers::two_layer(T::lit(0.5), core(eps), T::one()),
        AmbiguityVariant::SigmaHat => {
            if eps > T::zero() {
                RadialLayers::new(
                    vec![T::lit(0.25), T::lit(0.5), T::one()],
                    vec![LayerValue::Finite(eps * eps), LayerValue::Finite(eps), LayerValue::Finite(T::one())],
                )
            } else {
                RadialLayers::two_layer(T::lit(0.5), LayerValue::Insulating, T::one())
            }
        }
    }
}
