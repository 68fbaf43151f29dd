//! Minimal dense linear algebra for the truncated-oscillator matrices.
//!
//! The crate only ever needs square, real, symmetric matrices of modest size
//! (a few hundred rows), so this module provides a flat row-major matrix and
//! a cyclic Jacobi eigensolver rather than pulling in a full linear-algebra
//! stack.  Jacobi is slower than tridiagonalization-based methods but is
//! simple, backward stable, and — because rotations are applied in a fixed
//! sweep order — bitwise deterministic.

use crate::{Error, Result};

/// Relative eigensolver tolerance: iteration stops once the off-diagonal
/// Frobenius norm falls below `EIGEN_TOL * ||A||_F`.  Jacobi convergence is
/// quadratic near the end, so the remaining eigenvalue error is far smaller
/// than this bound.
pub const EIGEN_TOL: f64 = 1e-12;

/// Hard cap on Jacobi sweeps; well-conditioned symmetric matrices converge
/// in well under twenty.
const MAX_SWEEPS: usize = 64;

/// Square matrix of `f64` in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Zero matrix of size `n x n`.
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Identity matrix of size `n x n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] += value;
    }

    /// Dense matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &aik) in row.iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &r) in out_row.iter_mut().zip(rhs_row) {
                    *o += aik * r;
                }
            }
        }
        out
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len(), "vector length mismatch");
        let n = self.n;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Matrix-vector product with the transpose, `self^T * v`.
    pub fn transpose_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len(), "vector length mismatch");
        let n = self.n;
        let mut out = vec![0.0; n];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            let row = &self.data[i * n..(i + 1) * n];
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a * vi;
            }
        }
        out
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Copy of column `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }
}

/// Result of a symmetric eigendecomposition: `values[k]` is ascending and
/// `vectors.column(k)` is the matching orthonormal eigenvector.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps run over the strict upper triangle in row-major order, rotating
/// away each element larger than a share of the target tolerance
/// `EIGEN_TOL * ||A||_F`.  The fixed order makes repeated runs bitwise
/// identical.
///
/// # Errors
///
/// Returns [`Error::EigensolverStalled`] with the final off-diagonal norm if
/// the tolerance is not met within the sweep budget, and
/// [`Error::InvalidInput`] if the matrix contains non-finite entries.
pub fn jacobi_eigen(a: &Matrix) -> Result<Eigensystem> {
    let n = a.size();
    if let Some(&bad) = a.data.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput {
            what: "matrix entry",
            value: bad,
        });
    }

    let mut m = a.data.clone();
    let mut vecs = Matrix::identity(n);
    let norm = a.frobenius_norm();
    let tol = EIGEN_TOL * norm;
    // Elements below this cannot together push the off-diagonal norm over
    // the tolerance, so rotating them away is wasted work.
    let rotate_floor = if n > 1 { tol / (n as f64) } else { 0.0 };

    let mut off = off_diagonal_norm(&m, n);
    let mut sweeps = 0;
    while off > tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigensolverStalled {
                sweeps,
                off_norm: off,
                tolerance: tol,
            });
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= rotate_floor {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                // Smaller root of t^2 + 2 t theta - 1 = 0; the guarded branch
                // avoids overflow in theta^2 for very lopsided elements.
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;

                // A <- J^T A J applied as a column update then a row update.
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;

                for k in 0..n {
                    let vkp = vecs.data[k * n + p];
                    let vkq = vecs.data[k * n + q];
                    vecs.data[k * n + p] = c * vkp - s * vkq;
                    vecs.data[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        off = off_diagonal_norm(&m, n);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));

    let values: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut sorted = Matrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        for row in 0..n {
            sorted.data[row * n + dst] = vecs.data[row * n + src];
        }
    }

    Ok(Eigensystem {
        values,
        vectors: sorted,
    })
}

fn off_diagonal_norm(m: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let a = m[i * n + j];
            sum += a * a;
        }
    }
    (2.0 * sum).sqrt()
}
