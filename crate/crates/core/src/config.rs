//! JSON problem descriptions and bundled presets.
//!
//! Complex entries are `[re, im]` pairs and matrices are row-major arrays of
//! rows. A ragged or malformed row is reported with the line and column where
//! parsing stopped.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};
use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{ExtensionParams, MultipointProblem};
use crate::halfline_spectrum::WitnessProfile;
use crate::interval_spectrum::{ArgBranch, BranchWindow};
use crate::linalg::CMatrix;
use crate::operator_model::{HermitianOperator, SignConstraint, UnitaryOperator, DEFAULT_TOL_KERNEL};

pub const CONFIG_VERSION: u32 = 1;

pub const PRESETS: [&str; 7] = ["scalar-periodic", "scalar-phase", "diag-2x2", "example35-N4", "example35-N16", "injective-a1", "unequal-kernels"];

/// Square complex matrix as nested `[re, im]` rows.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MatrixSpec(pub Vec<Vec<[f64; 2]>>);

impl<'de> Deserialize<'de> for MatrixSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct Rows;
        impl<'de> Visitor<'de> for Rows {
            type Value = MatrixSpec;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a square matrix given as rows of [re, im] pairs")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<MatrixSpec, A::Error> {
                let mut rows: Vec<Vec<[f64; 2]>> = Vec::new();
                while let Some(row) = seq.next_element::<Vec<[f64; 2]>>()? {
                    if let Some(first) = rows.first() {
                        if row.len() != first.len() {
                            return Err(de::Error::custom(format!("row {} has {} entries, expected {}", rows.len(), row.len(), first.len())));
                        }
                    }
                    rows.push(row);
                }
                if rows.is_empty() {
                    return Err(de::Error::custom("matrix has no rows"));
                }
                if rows.len() != rows[0].len() {
                    return Err(de::Error::custom(format!("matrix is {}x{}, expected square", rows.len(), rows[0].len())));
                }
                Ok(MatrixSpec(rows))
            }
        }
        d.deserialize_seq(Rows)
    }
}

impl MatrixSpec {
    pub fn to_matrix(&self) -> CMatrix {
        let n = self.0.len();
        CMatrix::from_shape_fn((n, n), |(i, j)| Complex64::new(self.0[i][j][0], self.0[i][j][1]))
    }

    pub fn from_matrix(a: &CMatrix) -> Self {
        MatrixSpec(a.rows().into_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect())
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_matrix(&crate::linalg::real_diag(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// Branches `n ∈ [-N, N]`.
    pub n_window: Option<i64>,
    /// Branches with `|Im lambda| <= X`.
    pub im_bound: Option<f64>,
    pub tol_kernel: Option<f64>,
    /// Finite-difference cells for the oracle suite.
    pub grid: Option<usize>,
    pub arg_branch: ArgBranch,
    pub witness_profile: WitnessProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub version: u32,
    /// `[a1, a2, b2, a3]`
    pub endpoints: [f64; 4],
    #[serde(rename = "A1")]
    pub a1: MatrixSpec,
    #[serde(rename = "A2")]
    pub a2: MatrixSpec,
    #[serde(rename = "A3")]
    pub a3: MatrixSpec,
    #[serde(rename = "W1")]
    pub w1: MatrixSpec,
    #[serde(rename = "W2")]
    pub w2: MatrixSpec,
    #[serde(default)]
    pub options: Options,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        let cfg: ProblemConfig = serde_json::from_str(text)?;
        if cfg.version != CONFIG_VERSION {
            return Err(de::Error::custom(format!("unsupported config version {}, expected {CONFIG_VERSION}", cfg.version)));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn tol_kernel(&self) -> f64 {
        self.options.tol_kernel.unwrap_or(DEFAULT_TOL_KERNEL)
    }

    /// Explicit window, or the default `|Im lambda| <= 10 * 2pi / tau`.
    pub fn window(&self) -> BranchWindow {
        match (self.options.n_window, self.options.im_bound) {
            (Some(n), _) => BranchWindow::Range { n_min: -n, n_max: n },
            (None, Some(x)) => BranchWindow::ImBound(x),
            (None, None) => BranchWindow::default_for(self.endpoints[2] - self.endpoints[1]),
        }
    }

    /// Problem and unitary pair. `W1`, `W2` are not required to be unitary
    /// here; validation reports that.
    pub fn build(&self) -> Result<(MultipointProblem, ExtensionParams)> {
        let tol = self.tol_kernel();
        let n = self.a1.dim();
        for m in [&self.a2, &self.a3, &self.w1, &self.w2] {
            crate::linalg::ensure_dim(n, m.dim())?;
        }
        let a1 = HermitianOperator::with_tolerance(self.a1.to_matrix(), SignConstraint::Nonpositive, tol)?;
        let a2 = HermitianOperator::with_tolerance(self.a2.to_matrix(), SignConstraint::Nonnegative, tol)?;
        let a3 = HermitianOperator::with_tolerance(self.a3.to_matrix(), SignConstraint::Nonnegative, tol)?;
        let p = MultipointProblem::new(self.endpoints, a1, a2, a3)?;
        let e = ExtensionParams::new(UnitaryOperator::unchecked(self.w1.to_matrix())?, UnitaryOperator::unchecked(self.w2.to_matrix())?)?;
        Ok((p, e))
    }

    pub fn from_problem(p: &MultipointProblem, e: &ExtensionParams) -> Self {
        ProblemConfig {
            version: CONFIG_VERSION,
            endpoints: [p.a1(), p.a2(), p.b2(), p.a3()],
            a1: MatrixSpec::from_matrix(p.left().entries()),
            a2: MatrixSpec::from_matrix(p.middle().entries()),
            a3: MatrixSpec::from_matrix(p.right().entries()),
            w1: MatrixSpec::from_matrix(e.w1.entries()),
            w2: MatrixSpec::from_matrix(e.w2.entries()),
            options: Options::default(),
        }
    }
}

fn scalar(endpoints: [f64; 4], a: [f64; 3], w1: Complex64, w2: Complex64) -> ProblemConfig {
    ProblemConfig {
        version: CONFIG_VERSION,
        endpoints,
        a1: MatrixSpec::diag(&[a[0]]),
        a2: MatrixSpec::diag(&[a[1]]),
        a3: MatrixSpec::diag(&[a[2]]),
        w1: MatrixSpec(vec![vec![[w1.re, w1.im]]]),
        w2: MatrixSpec(vec![vec![[w2.re, w2.im]]]),
        options: Options::default(),
    }
}

pub fn preset(name: &str) -> Result<ProblemConfig> {
    let one = Complex64::new(1.0, 0.0);
    Ok(match name {
        "scalar-periodic" => scalar([-1.0, 0.0, 1.0, 2.0], [0.0, 0.0, 0.0], one, one),
        "scalar-phase" => scalar([-1.0, 0.0, 1.0, 2.0], [0.0, 2.0, 0.0], one, Complex64::new(0.0, 1.0)),
        "injective-a1" => scalar([-1.0, 0.0, 1.0, 2.0], [-1.0, 1.0, 0.0], one, one),
        "diag-2x2" => ProblemConfig {
            version: CONFIG_VERSION,
            endpoints: [-1.0, 0.0, 0.5, 1.0],
            a1: MatrixSpec::diag(&[-1.0, 0.0]),
            a2: MatrixSpec::diag(&[1.0, 3.0]),
            a3: MatrixSpec::diag(&[0.0, 2.0]),
            // carries ker A1 = span e2 onto ker A3 = span e1
            w1: MatrixSpec(vec![vec![[0.0, 0.0], [1.0, 0.0]], vec![[1.0, 0.0], [0.0, 0.0]]]),
            w2: MatrixSpec::diag(&[1.0, 1.0]),
            options: Options::default(),
        },
        "unequal-kernels" => ProblemConfig {
            version: CONFIG_VERSION,
            endpoints: [-1.0, 0.0, 1.0, 2.0],
            a1: MatrixSpec::diag(&[0.0, 0.0]),
            a2: MatrixSpec::diag(&[1.0, 1.0]),
            a3: MatrixSpec::diag(&[0.0, 1.0]),
            w1: MatrixSpec::diag(&[1.0, 1.0]),
            w2: MatrixSpec::diag(&[1.0, 1.0]),
            options: Options::default(),
        },
        "example35-N4" | "example35-N16" => {
            let n = if name.ends_with("N4") { 4 } else { 16 };
            let (p, e) = crate::oracle::build_example35(n, FRAC_PI_4, FRAC_PI_3)?;
            let mut cfg = ProblemConfig::from_problem(&p, &e);
            if n == 16 {
                cfg.options.grid = Some(256);
            }
            cfg
        }
        _ => return Err(Error::InvalidProblem(format!("unknown preset '{name}' (known: {})", PRESETS.join(", ")))),
    })
}
