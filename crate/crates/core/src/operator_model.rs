//! Finite-dimensional self-adjoint operator calculus.
//!
//! Every coefficient operator carries one cached Hermitian eigendecomposition;
//! square roots, kernels and exponentials are all evaluated from it so the
//! different functional-calculus paths never disagree.
//!
//! In finite dimension the continuous extension of `A_k` to the negative
//! space coincides with `A_k` itself, so there is a single operator type.

use std::fmt;
use std::sync::Arc;

use ndarray::Axis;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{adjoint, ensure_dim, ensure_square, frobenius, identity, inner, max_abs, unitarity_residual, CMatrix, CVector};

/// Default relative cutoff for kernel membership and sign clipping.
pub const DEFAULT_TOL_KERNEL: f64 = 1e-10;

/// Relative tolerance for the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// `ln(1e-300)`: exponentials below this are flagged as precision loss.
pub const LN_UNDERFLOW: f64 = -690.7755278982137;

/// Largest exponent accepted before `exp` overflows.
pub const EXP_LIMIT: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConstraint {
    Nonpositive,
    Nonnegative,
    None,
}

impl fmt::Display for SignConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignConstraint::Nonpositive => write!(f, "nonpositive"),
            SignConstraint::Nonnegative => write!(f, "nonnegative"),
            SignConstraint::None => write!(f, "unconstrained"),
        }
    }
}

/// Ascending eigenvalues with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenSystem {
    /// `V diag(f(alpha)) V*`
    pub fn apply_fn<F: Fn(f64) -> Complex64>(&self, f: F) -> CMatrix {
        let scaled = {
            let mut v = self.eigenvectors.clone();
            for (mut col, &alpha) in v.axis_iter_mut(Axis(1)).zip(&self.eigenvalues) {
                let s = f(alpha);
                col.mapv_inplace(|z| z * s);
            }
            v
        };
        scaled.dot(&adjoint(&self.eigenvectors))
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply_fn(|a| Complex64::new(a, 0.0))
    }

    pub fn eigenvector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).to_owned()
    }
}

/// A finite Hermitian matrix with a declared sign constraint.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    entries: CMatrix,
    sign: SignConstraint,
    tol_kernel: f64,
    hermiticity_residual: f64,
    eigen: Arc<EigenSystem>,
}

impl HermitianOperator {
    pub fn new(entries: CMatrix, sign: SignConstraint) -> Result<Self> {
        Self::with_tolerance(entries, sign, DEFAULT_TOL_KERNEL)
    }

    pub fn with_tolerance(entries: CMatrix, sign: SignConstraint, tol_kernel: f64) -> Result<Self> {
        let n = ensure_square(&entries)?;
        let scale = max_abs(&entries).max(1.0);
        let mut worst = (0, 0, 0.0_f64);
        for i in 0..n {
            for j in 0..n {
                let r = (entries[[i, j]] - entries[[j, i]].conj()).norm();
                if r > worst.2 {
                    worst = (i, j, r);
                }
            }
        }
        if worst.2 > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { row: worst.0, col: worst.1, residual: worst.2 });
        }
        let sym = (&entries + &adjoint(&entries)).mapv(|z| z * 0.5);
        let (vals, vecs) = sym.eigh(UPLO::Lower)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| vals[k]).collect();
        let mut eigenvectors = vecs.select(Axis(1), &order);
        // ndarray-linalg's complex eigh hands back conj(v) for some layouts.
        for (mut col, &alpha) in eigenvectors.axis_iter_mut(Axis(1)).zip(&eigenvalues) {
            let v = col.to_owned();
            let vc = v.mapv(|z| z.conj());
            let res = |x: &CVector| crate::linalg::norm(&(sym.dot(x) - x.mapv(|z| z * alpha)));
            if res(&vc) < res(&v) {
                col.assign(&vc);
            }
        }
        let op = HermitianOperator {
            entries: sym,
            sign,
            tol_kernel,
            hermiticity_residual: worst.2,
            eigen: Arc::new(EigenSystem { eigenvalues, eigenvectors }),
        };
        if let Some(bad) = op.sign_violation(sign) {
            return Err(Error::SignConstraint { eigenvalue: bad, expected: sign });
        }
        Ok(op)
    }

    pub fn from_diagonal(values: &[f64], sign: SignConstraint) -> Result<Self> {
        Self::new(crate::linalg::real_diag(values), sign)
    }

    pub fn zero(n: usize, sign: SignConstraint) -> Self {
        Self::from_diagonal(&vec![0.0; n], sign).expect("zero matrix is valid under any constraint")
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn sign_constraint(&self) -> SignConstraint {
        self.sign
    }

    pub fn tol_kernel(&self) -> f64 {
        self.tol_kernel
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.hermiticity_residual
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eigen
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.eigenvalues
    }

    /// Spectral norm, `max |alpha|`.
    pub fn norm(&self) -> f64 {
        self.eigen.eigenvalues.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Absolute cutoff `tol * max(1, ||A||)`.
    pub fn cutoff(&self, tol: f64) -> f64 {
        tol * self.norm().max(1.0)
    }

    /// The first eigenvalue breaking `constraint` beyond the kernel cutoff.
    pub fn sign_violation(&self, constraint: SignConstraint) -> Option<f64> {
        let cut = self.cutoff(self.tol_kernel);
        self.eigen.eigenvalues.iter().copied().find(|&a| match constraint {
            SignConstraint::Nonpositive => a > cut,
            SignConstraint::Nonnegative => a < -cut,
            SignConstraint::None => false,
        })
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        self.entries.dot(v)
    }

    pub fn kernel_basis(&self) -> Vec<CVector> {
        kernel_basis(self, self.tol_kernel)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_basis().is_empty()
    }

    /// Unitary conjugation `U A U*`, keeping the sign constraint.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        ensure_dim(self.dim(), u.nrows())?;
        let m = u.dot(&self.entries).dot(&adjoint(u));
        Self::with_tolerance(m, self.sign, self.tol_kernel)
    }
}

/// A unitary matrix, checked to `||W*W - I||_F <= 1e-12 dim`.
#[derive(Clone, Debug)]
pub struct UnitaryOperator {
    entries: CMatrix,
    residual: f64,
}

impl UnitaryOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let u = Self::unchecked(entries)?;
        if !u.is_unitary() {
            return Err(Error::NotUnitary { residual: u.residual });
        }
        Ok(u)
    }

    /// Keeps a non-unitary matrix so validation can report it in-flag.
    pub fn unchecked(entries: CMatrix) -> Result<Self> {
        ensure_square(&entries)?;
        let residual = unitarity_residual(&entries);
        Ok(UnitaryOperator { entries, residual })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(identity(n)).expect("identity is unitary")
    }

    /// `e^{i phase} I`
    pub fn phase(n: usize, phase: f64) -> Self {
        Self::new(identity(n).mapv(|z| z * Complex64::from_polar(1.0, phase))).expect("phase is unitary")
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn tolerance(&self) -> f64 {
        1e-12 * self.dim() as f64
    }

    pub fn is_unitary(&self) -> bool {
        self.residual <= self.tolerance()
    }

    pub fn adjoint(&self) -> CMatrix {
        adjoint(&self.entries)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        self.entries.dot(v)
    }
}

pub fn eig_hermitian(a: &HermitianOperator) -> EigenSystem {
    a.eigen().clone()
}

/// `(-A)^{1/2}` when `negate` is set, otherwise `A^{1/2}`.
///
/// Eigenvalues within the kernel cutoff of the wrong sign are clipped to 0.
pub fn psd_sqrt(a: &HermitianOperator, negate: bool) -> Result<HermitianOperator> {
    let s = if negate { -1.0 } else { 1.0 };
    let cut = a.cutoff(a.tol_kernel());
    if let Some(&bad) = a.eigenvalues().iter().find(|&&alpha| s * alpha < -cut) {
        let expected = if negate { SignConstraint::Nonpositive } else { SignConstraint::Nonnegative };
        return Err(Error::SignConstraint { eigenvalue: bad, expected });
    }
    let root = a.eigen().apply_fn(|alpha| Complex64::new((s * alpha).max(0.0).sqrt(), 0.0));
    HermitianOperator::with_tolerance(root, SignConstraint::Nonnegative, a.tol_kernel())
}

/// Orthonormal eigenvectors with `|alpha| <= tol * max(1, ||A||)`.
pub fn kernel_basis(a: &HermitianOperator, tol: f64) -> Vec<CVector> {
    let cut = a.cutoff(tol);
    a.eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, alpha)| alpha.abs() <= cut)
        .map(|(k, _)| a.eigen().eigenvector(k))
        .collect()
}

/// `e^{-(A - lambda) tau}` with its underflow diagnostics.
#[derive(Clone, Debug)]
pub struct MatrixExponential {
    pub matrix: CMatrix,
    /// Some `|e^{-alpha_j tau}|` fell below `1e-300`.
    pub precision_loss: bool,
    /// `min_j (-alpha_j tau)`.
    pub min_log_scale: f64,
}

pub fn operator_exp(a: &HermitianOperator, lambda: Complex64, tau: f64) -> Result<MatrixExponential> {
    if !tau.is_finite() {
        return Err(Error::Range { exponent: tau, limit: EXP_LIMIT });
    }
    let mut min_log_scale = f64::INFINITY;
    for &alpha in a.eigenvalues() {
        let growth = (lambda.re - alpha) * tau;
        if growth > EXP_LIMIT || lambda.re * tau > EXP_LIMIT || -alpha * tau > EXP_LIMIT {
            return Err(Error::Range { exponent: growth.max(lambda.re * tau).max(-alpha * tau), limit: EXP_LIMIT });
        }
        min_log_scale = min_log_scale.min(-alpha * tau);
    }
    let matrix = if tau == 0.0 {
        identity(a.dim())
    } else {
        a.eigen().apply_fn(|alpha| ((lambda - alpha) * tau).exp())
    };
    Ok(MatrixExponential { matrix, precision_loss: min_log_scale < LN_UNDERFLOW, min_log_scale })
}

/// `(f, g)_+ = (A f, A g) + (f, g)`
pub fn plus_inner_product(a: &HermitianOperator, f: &CVector, g: &CVector) -> Result<Complex64> {
    ensure_dim(a.dim(), f.len())?;
    ensure_dim(a.dim(), g.len())?;
    Ok(inner(&a.apply(f), &a.apply(g)) + inner(f, g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoefficientRole {
    A1,
    A2,
    A3,
}

impl CoefficientRole {
    pub fn required_sign(self) -> SignConstraint {
        match self {
            CoefficientRole::A1 => SignConstraint::Nonpositive,
            CoefficientRole::A2 | CoefficientRole::A3 => SignConstraint::Nonnegative,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SignViolation {
    pub role: CoefficientRole,
    pub eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientReport {
    pub hermiticity_residuals: [f64; 3],
    pub sign_violations: Vec<SignViolation>,
    /// `(dim ker (-A1)^{1/2}, dim ker A3^{1/2})`
    pub kernel_dims: (usize, usize),
    pub passed: bool,
}

/// Checks `A1 <= 0`, `A2 >= 0`, `A3 >= 0` regardless of the constraints the
/// operators were declared with.
pub fn validate_coefficients(a1: &HermitianOperator, a2: &HermitianOperator, a3: &HermitianOperator) -> Result<CoefficientReport> {
    ensure_dim(a1.dim(), a2.dim())?;
    ensure_dim(a1.dim(), a3.dim())?;
    let roles = [(CoefficientRole::A1, a1), (CoefficientRole::A2, a2), (CoefficientRole::A3, a3)];
    let sign_violations: Vec<SignViolation> = roles
        .iter()
        .filter_map(|(role, op)| op.sign_violation(role.required_sign()).map(|eigenvalue| SignViolation { role: *role, eigenvalue }))
        .collect();
    let hermiticity_residuals = [a1.hermiticity_residual(), a2.hermiticity_residual(), a3.hermiticity_residual()];
    // ker (-A)^{1/2} = ker A for a semidefinite A.
    let kernel_dims = (a1.kernel_basis().len(), a3.kernel_basis().len());
    let passed = sign_violations.is_empty();
    Ok(CoefficientReport { hermiticity_residuals, sign_violations, kernel_dims, passed })
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius(&(a - b))
}
