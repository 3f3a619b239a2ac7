//! Normal extensions of the minimal operator generated by the multipoint
//! first-order expression `l = (d/dt + A1, d/dt + A2, d/dt + A3)` on
//! `(-inf, a1) ∪ (a2, b2) ∪ (a3, +inf)`, with `A1 <= 0`, `A2 >= 0`, `A3 >= 0`.
//!
//! Extensions are parametrized by a unitary pair `(W1, W2)` acting through the
//! boundary conditions `u3(a3) = W1 u1(a1)` (values restricted to the kernels
//! of `(-A1)^{1/2}` and `A3^{1/2}`) and `u2(b2) = W2 u2(a2)`. The crate builds
//! and validates such extensions, computes their spectra in closed form and
//! cross-checks the formulas against brute-force oracles.

pub mod boundary_triplet;
pub mod cli;
pub mod composite_spectrum;
pub mod config;
mod error;
pub mod extension;
pub mod halfline_spectrum;
pub mod interval_spectrum;
pub mod linalg;
pub mod operator_model;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
pub use extension::{ExtensionParams, MultipointProblem, NormalExtension};
pub use operator_model::{HermitianOperator, SignConstraint, UnitaryOperator};
