use crate::linalg::CsrMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct CgOutcome<T> {
    pub solution: Vec<T>,
    pub iterations: usize,
    pub relative_residual: T,
    pub converged: bool,
}

/// Jacobi-preconditioned conjugate gradients on the leading `n × n` block of `a`.
pub fn conjugate_gradient<T: Real>(
    a: &CsrMatrix<T>,
    n: usize,
    b: &[T],
    rel_tol: T,
    max_iter: usize,
) -> CgOutcome<T> {
    assert_eq!(b.len(), n);
    let apply = |x: &[T], y: &mut [T]| {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = a.row(i).filter(|&(j, _)| j < n).map(|(j, v)| v * x[j]).sum();
        }
    };
    let inv_diag: Vec<T> = (0..n)
        .map(|i| {
            let d = a.get(i, i);
            if d > T::zero() { T::one() / d } else { T::one() }
        })
        .collect();
    let dot = |x: &[T], y: &[T]| x.iter().zip(y).map(|(&p, &q)| p * q).sum::<T>();
    let b_norm = dot(b, b).sqrt();
    let mut x = vec![T::zero(); n];
    if b_norm == T::zero() {
        return CgOutcome { solution: x, iterations: 0, relative_residual: T::zero(), converged: true };
    }
    let mut r = b.to_vec();
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(&ri, &d)| ri * d).collect();
    let mut p = z.clone();
    let mut ap = vec![T::zero(); n];
    let mut rz = dot(&r, &z);
    let mut rel = T::one();
    for it in 0..max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            return CgOutcome { solution: x, iterations: it, relative_residual: rel, converged: false };
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = dot(&r, &r).sqrt() / b_norm;
        if rel <= rel_tol {
            return CgOutcome { solution: x, iterations: it + 1, relative_residual: rel, converged: true };
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    CgOutcome { solution: x, iterations: max_iter, relative_residual: rel, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;

    #[test]
    fn converges_on_spd_system() {
        let n = 40;
        let mut t = TripletBuilder::new(n);
        for i in 0..n {
            t.add(i, i, 4.0);
            if i + 1 < n {
                t.add(i, i + 1, -1.0);
                t.add(i + 1, i, -1.0);
            }
        }
        let a = t.build();
        let x_true: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let b = a.matvec(&x_true);
        let out = conjugate_gradient(&a, n, &b, 1e-12, 500);
        assert!(out.converged);
        for (x, y) in out.solution.iter().zip(&x_true) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
