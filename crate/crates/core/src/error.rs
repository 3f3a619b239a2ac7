use num_complex::Complex64;
use thiserror::Error;

use crate::operator_model::SignConstraint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: entry ({row}, {col}) differs from its conjugate transpose by {residual:.3e}")]
    NotHermitian { row: usize, col: usize, residual: f64 },

    #[error("sign constraint violated: eigenvalue {eigenvalue:.6e} breaks the {expected} constraint")]
    SignConstraint { eigenvalue: f64, expected: SignConstraint },

    #[error("matrix is not unitary: ||W*W - I||_F = {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("exponent {exponent:.3} is out of floating-point range (|exponent| > {limit})")]
    Range { exponent: f64, limit: f64 },

    #[error("precision loss: |mu| = {:.3e} is below the underflow threshold (mu = {mu})", mu.norm())]
    PrecisionLoss { mu: Complex64 },

    #[error("near-singular resolvent at lambda = {lambda}: sigma_min = {sigma_min:.3e}, nearest eigenvalue comes from mu = {mu}, branch n = {branch}")]
    NearSingular { lambda: Complex64, mu: Complex64, branch: i64, sigma_min: f64 },

    #[error("pairing is not integrable on the half-line: combined rate {rate}")]
    NotIntegrable { rate: Complex64 },

    #[error("test function lives on the {found} interval, expected {expected}")]
    TagMismatch { expected: &'static str, found: &'static str },

    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("no normal extension: {0}")]
    NoNormalExtension(String),

    #[error("inconsistent coefficients: sigma(A1) and sigma(A3) share nonzero points {0:?}")]
    InconsistentCoefficients(Vec<f64>),

    #[error("ker(-A1)^(1/2) is trivial, no non-surjectivity witness exists")]
    NoWitness,

    #[error("point {t} lies outside [{lo}, {hi}]")]
    OutOfInterval { t: f64, lo: f64, hi: f64 },

    #[error("grid size {m} is too small (need at least {min})")]
    GridTooSmall { m: usize, min: usize },

    #[error("discretization of size {size} exceeds the dense limit {limit}")]
    GridTooLarge { size: usize, limit: usize },

    #[error("linear algebra failure: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
}

impl Error {
    /// Stable snake_case tag for machine-readable error records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "not_square",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::SignConstraint { .. } => "sign_constraint",
            Error::NotUnitary { .. } => "not_unitary",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Range { .. } => "range",
            Error::PrecisionLoss { .. } => "precision_loss",
            Error::NearSingular { .. } => "near_singular",
            Error::NotIntegrable { .. } => "not_integrable",
            Error::TagMismatch { .. } => "tag_mismatch",
            Error::InvalidTestFunction(_) => "invalid_test_function",
            Error::InvalidProblem(_) => "invalid_problem",
            Error::NoNormalExtension(_) => "no_normal_extension",
            Error::InconsistentCoefficients(_) => "inconsistent_coefficients",
            Error::NoWitness => "no_witness",
            Error::OutOfInterval { .. } => "out_of_interval",
            Error::GridTooSmall { .. } => "grid_too_small",
            Error::GridTooLarge { .. } => "grid_too_large",
            Error::Linalg(_) => "linalg",
        }
    }
}
