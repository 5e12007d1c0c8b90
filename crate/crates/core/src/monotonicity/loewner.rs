use serde::Serialize;

use crate::error::{EitError, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

const SYMMETRY_TOL: f64 = 1e-8;

/// Outcome of a semidefiniteness check `A − B ⪰ −τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoewnerOutcome<T> {
    pub passed: bool,
    /// Smallest eigenvalue of `A − B`.
    pub min_eig: T,
    /// Passed, but with `|min_eig| < τ`.
    pub marginal: bool,
}

impl<T: Real> LoewnerOutcome<T> {
    pub(crate) fn from_min_eig(min_eig: T, tau: T) -> Self {
        let passed = min_eig >= -tau;
        Self { passed, min_eig, marginal: passed && min_eig.abs() < tau }
    }
}

/// Checks `A ⪰ B` up to `τ` through the smallest eigenvalue of `A − B`.
pub fn loewner_test<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>, tau: T) -> Result<LoewnerOutcome<T>> {
    if a.rows() != b.rows() || a.cols() != b.cols() || !a.is_square() {
        return Err(EitError::Input(format!(
            "Loewner test on {}×{} and {}×{} matrices",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let tol = T::lit(SYMMETRY_TOL).max(T::epsilon().sqrt());
    for (name, m) in [("A", a), ("B", b)] {
        if !m.is_symmetric(tol) {
            return Err(EitError::Input(format!("{name} is not symmetric within {tol:e}")));
        }
    }
    let (d, _) = a.sub(b)?.symmetrized();
    Ok(LoewnerOutcome::from_min_eig(d.min_eigenvalue()?, tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_dominates_zero() {
        let out = loewner_test(&DenseMatrix::<f64>::identity(3), &DenseMatrix::zeros(3, 3), 0.0).unwrap();
        assert!(out.passed && !out.marginal);
        assert!((out.min_eig - 1.0).abs() < 1e-14);
    }

    #[test]
    fn negative_direction_fails() {
        let a = DenseMatrix::<f64>::from_diagonal(&[2.0, -3.0]);
        let out = loewner_test(&a, &DenseMatrix::zeros(2, 2), 0.0).unwrap();
        assert!(!out.passed);
        assert!((out.min_eig + 3.0).abs() < 1e-14);
    }

    #[test]
    fn small_negative_within_tau_is_marginal() {
        let a = DenseMatrix::<f64>::from_diagonal(&[1.0, -1e-9]);
        let out = loewner_test(&a, &DenseMatrix::zeros(2, 2), 1e-8).unwrap();
        assert!(out.passed && out.marginal);
    }

    #[test]
    fn rejects_size_mismatch_and_asymmetry() {
        let a = DenseMatrix::<f64>::identity(2);
        assert!(matches!(loewner_test(&a, &DenseMatrix::zeros(3, 3), 0.0), Err(EitError::Input(_))));
        let skew = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(loewner_test(&skew, &a, 0.0), Err(EitError::Input(_))));
    }
}
