//! Small dense solver for the surrogate's normal equations.

use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.n + c]
    }

    pub fn add(&mut self, r: usize, c: usize, v: T) {
        let k = r * self.n + c;
        self.data[k] = self.data[k] + v;
    }

    /// Solves `self · x = rhs` for symmetric positive definite `self`
    /// by Cholesky factorization. Returns `None` if a pivot is not positive.
    pub fn solve_spd(&self, rhs: &[T]) -> Option<Vec<T>> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut l = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s.is_nan() || s <= T::zero() {
                        return None;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        // L y = rhs
        let mut y = rhs.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] = y[i] - l[i * n + k] * y[k];
            }
            y[i] = y[i] / l[i * n + i];
        }
        // Lᵀ x = y
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] = y[i] - l[k * n + i] * y[k];
            }
            y[i] = y[i] / l[i * n + i];
        }
        Some(y)
    }
}
