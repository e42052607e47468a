//! A minimal dense row-major matrix: just enough linear algebra for the
//! sensing and kernel objectives (matvecs and a power-method spectral
//! estimate).

use crate::error::{Error, Result};
use crate::rng::{standard_normal, ChaCha12Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                got: data.len(),
                expected: rows * cols,
            });
        }
        for (index, &value) in data.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Entries drawn i.i.d. standard normal.
    pub fn standard_normal(rows: usize, cols: usize, rng: &mut ChaCha12Rng) -> Self {
        let data = (0..rows * cols).map(|_| standard_normal(rng)).collect();
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch {
                got: x.len(),
                expected: self.cols,
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `Aᵀ y`.
    pub fn t_matvec(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::LengthMismatch {
                got: y.len(),
                expected: self.rows,
            });
        }
        let mut out = vec![0.0; self.cols];
        for (r, &yr) in y.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(r)) {
                *o += a * yr;
            }
        }
        Ok(out)
    }

    /// Power-method estimate of the largest eigenvalue of `AᵀA`, i.e. the
    /// squared spectral norm. Starts from the all-ones direction.
    pub fn spectral_norm_sq_estimate(&self, iterations: usize) -> f64 {
        let mut x = vec![1.0 / (self.cols as f64).sqrt(); self.cols];
        let mut estimate = 0.0;
        for _ in 0..iterations {
            let ax = self.matvec(&x).expect("dimension fixed");
            let atax = self.t_matvec(&ax).expect("dimension fixed");
            let norm = atax.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            estimate = ax.iter().map(|v| v * v).sum();
            for (xi, v) in x.iter_mut().zip(&atax) {
                *xi = v / norm;
            }
        }
        estimate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn matvec_and_transpose() {
        let a = Matrix::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(a.matvec(&[1.0, 0.0, -1.0]).unwrap(), vec![-2.0, -2.0]);
        assert_eq!(a.t_matvec(&[1.0, 1.0]).unwrap(), vec![5.0, 7.0, 9.0]);
        assert!(a.matvec(&[1.0]).is_err());
    }

    #[test]
    fn spectral_estimate_on_diagonal() {
        let a = Matrix::new(2, 2, vec![3.0, 0.0, 0.0, 1.0]).unwrap();
        let est = a.spectral_norm_sq_estimate(50);
        assert!((est - 9.0).abs() < 1e-6, "estimate {est}");
    }

    #[test]
    fn normal_matrix_is_seeded() {
        let a = Matrix::standard_normal(4, 5, &mut seeded(11));
        let b = Matrix::standard_normal(4, 5, &mut seeded(11));
        assert_eq!(a, b);
    }
}
