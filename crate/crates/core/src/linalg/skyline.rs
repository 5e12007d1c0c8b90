use crate::error::{EitError, Result};
use crate::linalg::CsrMatrix;
use crate::scalar::Real;

/// Envelope (skyline) Cholesky factor `A = L Lᵀ` of the leading `n × n` block
/// of a symmetric positive definite sparse matrix.
///
/// Row `i` of `L` is stored densely from its first structural nonzero column
/// to the diagonal, so fill-in stays inside the envelope.
#[derive(Debug, Clone)]
pub struct SkylineCholesky<T> {
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> SkylineCholesky<T> {
    /// Number of envelope entries the factor of the leading `n` rows would need.
    pub fn envelope_size(a: &CsrMatrix<T>, n: usize) -> usize {
        (0..n).map(|i| i + 1 - first_column(a, i)).sum()
    }

    pub fn factor(a: &CsrMatrix<T>, n: usize) -> Result<Self> {
        assert!(n <= a.dim());
        let first: Vec<usize> = (0..n).map(|i| first_column(a, i)).collect();
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for (i, &f) in first.iter().enumerate() {
            start.push(total);
            total += i + 1 - f;
        }
        start.push(total);
        let mut data = vec![T::zero(); total];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    data[start[i] + j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = data[start[i] + j - fi];
                let ri = &data[start[i] + k0 - fi..start[i] + j - fi];
                let rj = &data[start[j] + k0 - fj..start[j] + j - fj];
                for (&x, &y) in ri.iter().zip(rj) {
                    s -= x * y;
                }
                let ljj = data[start[j] + j - fj];
                data[start[i] + j - fi] = s / ljj;
            }
            let row = &data[start[i]..start[i] + i - fi];
            let d = data[start[i] + i - fi] - row.iter().map(|&x| x * x).sum::<T>();
            if !(d > T::zero()) || !d.is_finite() {
                return Err(EitError::Solver(format!("non-positive pivot {d:e} at row {i}")));
            }
            data[start[i] + i - fi] = d.sqrt();
        }
        Ok(Self { first, start, data })
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let mut s = b[i];
            for (k, &l) in (fi..i).zip(row) {
                s -= l * b[k];
            }
            b[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            b[i] /= row[i - fi];
            let xi = b[i];
            for (k, &l) in (fi..i).zip(row) {
                b[k] -= l * xi;
            }
        }
    }
}

fn first_column<T: Real>(a: &CsrMatrix<T>, i: usize) -> usize {
    a.pattern(i).first().copied().map_or(i, |j| j.min(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;

    fn laplacian_1d(n: usize) -> CsrMatrix<f64> {
        let mut t = TripletBuilder::new(n);
        for i in 0..n {
            t.add(i, i, 2.0);
            if i + 1 < n {
                t.add(i, i + 1, -1.0);
                t.add(i + 1, i, -1.0);
            }
        }
        t.build()
    }

    #[test]
    fn solves_tridiagonal_system() {
        let a = laplacian_1d(50);
        let x_true: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = a.matvec(&x_true);
        let chol = SkylineCholesky::factor(&a, 50).unwrap();
        chol.solve_in_place(&mut b);
        for (x, y) in b.iter().zip(&x_true) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn leading_block_of_singular_matrix() {
        // Pure Neumann 1D Laplacian is singular; dropping the last row makes it SPD.
        let n = 10;
        let mut t = TripletBuilder::new(n);
        for i in 0..n - 1 {
            t.add(i, i, 1.0);
            t.add(i + 1, i + 1, 1.0);
            t.add(i, i + 1, -1.0);
            t.add(i + 1, i, -1.0);
        }
        let a = t.build();
        assert!(SkylineCholesky::factor(&a, n).is_err());
        assert!(SkylineCholesky::factor(&a, n - 1).is_ok());
    }

    #[test]
    fn envelope_with_far_coupling() {
        // Arrow matrix: last row couples to everything.
        let n = 6;
        let mut t = TripletBuilder::new(n);
        for i in 0..n {
            t.add(i, i, 10.0);
            if i + 1 < n {
                t.add(n - 1, i, 1.0);
                t.add(i, n - 1, 1.0);
            }
        }
        let a = t.build();
        assert_eq!(SkylineCholesky::envelope_size(&a, n), 5 + 6);
        let x_true = vec![1.0f64, -2.0, 3.0, 0.5, 0.0, 2.0];
        let mut b = a.matvec(&x_true);
        SkylineCholesky::factor(&a, n).unwrap().solve_in_place(&mut b);
        for (x, y) in b.iter().zip(&x_true) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
