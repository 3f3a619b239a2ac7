//! Dense complex helpers shared by every module.

use ndarray::{Array1, Array2, Axis};
use ndarray_linalg::{Eig, EigVals, SVD};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = Array2<Complex64>;
pub type CVector = Array1<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn identity(n: usize) -> CMatrix {
    Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

/// `(x, y) = sum x_i conj(y_i)`, linear in the first argument.
pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(x: &CVector) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn ensure_square(a: &CMatrix) -> Result<usize> {
    let (rows, cols) = a.dim();
    if rows != cols || rows == 0 {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(rows)
}

pub fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Result<Array1<f64>> {
    let (_, s, _) = a.svd(false, false)?;
    Ok(s)
}

pub fn smallest_singular_value(a: &CMatrix) -> Result<f64> {
    let s = singular_values(a)?;
    Ok(s.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Spectral norm (largest singular value).
pub fn opnorm2(a: &CMatrix) -> Result<f64> {
    let s = singular_values(a)?;
    Ok(s.iter().cloned().fold(0.0, f64::max))
}

/// `||AB - BA||_F`
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius(&(a.dot(b) - b.dot(a)))
}

/// `||W*W - I||_F`
pub fn unitarity_residual(w: &CMatrix) -> f64 {
    let n = w.nrows();
    frobenius(&(adjoint(w).dot(w) - identity(n)))
}

/// Eigenvalues and right eigenvectors (unit columns) of a general complex matrix.
pub fn general_eig(a: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    ensure_square(a)?;
    let (vals, mut vecs) = a.eig()?;
    for mut col in vecs.axis_iter_mut(Axis(1)) {
        let n = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            col.mapv_inplace(|z| z / n);
        }
    }
    Ok((vals.to_vec(), vecs))
}

/// Eigenvalues only of a general complex matrix.
pub fn general_eigvals(a: &CMatrix) -> Result<Vec<Complex64>> {
    ensure_square(a)?;
    Ok(a.eigvals()?.to_vec())
}

/// Solves `a x = b` by LU.
pub fn solve(a: &CMatrix, b: &CVector) -> Result<CVector> {
    use ndarray_linalg::Solve;
    Ok(a.solve(b)?)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    use ndarray_linalg::Inverse;
    Ok(a.inv()?)
}

pub fn diag(values: &[Complex64]) -> CMatrix {
    Array2::from_diag(&Array1::from(values.to_vec()))
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    Array2::from_diag(&values.iter().map(|&v| Complex64::new(v, 0.0)).collect::<CVector>())
}

/// Column `k` of the identity.
pub fn unit_vector(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// Random draws used by the verification suites, the examples and the tests.
pub mod random {
    use super::*;

    pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }

    pub fn vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
        (0..n).map(|_| complex(rng)).collect()
    }

    pub fn matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
        Array2::from_shape_fn((n, n), |_| complex(rng))
    }

    pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
        let g = matrix(rng, n);
        (&g + &adjoint(&g)).mapv(|z| z * 0.5)
    }

    /// `G G*`, positive semidefinite.
    pub fn psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
        let g = matrix(rng, n);
        g.dot(&adjoint(&g))
    }

    /// Haar-like unitary from Gram-Schmidt on a Gaussian matrix.
    pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
        let g = matrix(rng, n);
        let mut q = CMatrix::zeros((n, n));
        for j in 0..n {
            let mut v = g.column(j).to_owned();
            for _ in 0..2 {
                for k in 0..j {
                    let qk = q.column(k).to_owned();
                    let proj = inner(&v, &qk);
                    v = &v - &qk.mapv(|z| z * proj);
                }
            }
            let nv = norm(&v);
            q.column_mut(j).assign(&v.mapv(|z| z / nv));
        }
        q
    }
}
