//! Self-check suites run by `mpnormal verify`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary_triplet::{boundary_maps_halfline, green_identity_residual, green_identity_residual_interval, random_test_function, surjectivity_witness, IntervalTag};
use crate::config::ProblemConfig;
use crate::error::Result;
use crate::extension::{MultipointProblem, NormalExtension};
use crate::halfline_spectrum::{continuous_spectrum, nonsurjectivity_witness, point_spectrum_check, NonEigenReason, MARGINAL_TOL};
use crate::interval_spectrum::{branch_shift, eigenfunction_bc_residual, interval_eigenvalues, BranchWindow, IntervalEigenvalue, CHARACTERISTIC_TOL};
use crate::linalg::{norm, random};
use crate::oracle::{fd_interval_eigenvalues, quadrature_l2_fn, FdScheme, MAX_UNKNOWNS};
use crate::operator_model::UnitaryOperator;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Green,
    Oracle,
    Halfline,
    All,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `measured <= threshold`.
    pub fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        Check { name: name.into(), pass: measured <= threshold, measured, threshold, detail: None }
    }

    fn failed(name: &str, detail: String) -> Self {
        Check { name: name.into(), pass: false, measured: f64::NAN, threshold: f64::NAN, detail: Some(detail) }
    }

    fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub version: u32,
    pub kind: &'static str,
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Largest Green-identity residuals over random exponential pairs and the
/// largest boundary-map round-trip error.
pub fn green_residuals(p: &MultipointProblem, pairs: usize, rng: &mut ChaCha8Rng) -> Result<(f64, f64, f64)> {
    let d = p.dim();
    let (mut half, mut interval, mut roundtrip) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..pairs {
        let left = |rng: &mut ChaCha8Rng| random_test_function(rng, IntervalTag::Left, p.a1(), 0.0, d, 3);
        let right = |rng: &mut ChaCha8Rng| random_test_function(rng, IntervalTag::Right, p.a3(), 0.0, d, 3);
        let (u1, u3, v1, v3) = (left(rng), right(rng), left(rng), right(rng));
        half = half.max(green_identity_residual((&u1, &u3), (&v1, &v3))?.norm());
        let um = random_test_function(rng, IntervalTag::Middle, p.a2(), p.b2(), d, 3);
        let vm = random_test_function(rng, IntervalTag::Middle, p.a2(), p.b2(), d, 3);
        interval = interval.max(green_identity_residual_interval(&um, &vm)?.norm());
        let (f, g) = (random::vector(rng, d), random::vector(rng, d));
        let (w1, w3) = surjectivity_witness(&f, &g, p.a1(), p.a3())?;
        let y = boundary_maps_halfline(&w1, &w3)?;
        roundtrip = roundtrip.max(norm(&(y.gamma1 - &f))).max(norm(&(y.gamma2 - &g)));
    }
    Ok((half, interval, roundtrip))
}

pub fn green_suite(cfg: &ProblemConfig, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match cfg.build().and_then(|(p, _)| green_residuals(&p, 100, &mut rng)) {
        Ok((half, interval, roundtrip)) => vec![
            Check::at_most("green_identity_halfline", half, 1e-10),
            Check::at_most("green_identity_interval", interval, 1e-10),
            Check::at_most("surjectivity_roundtrip", roundtrip, 1e-13),
        ],
        Err(e) => vec![Check::failed("green_identity", e.to_string())],
    }
}

/// Largest `n`-to-`n+1` deviation from `2 pi i / (a2 - b2)`.
pub fn branch_shift_error(p: &MultipointProblem, evs: &[IntervalEigenvalue]) -> f64 {
    let shift = branch_shift(p);
    let mut worst = 0.0f64;
    for a in evs {
        for b in evs.iter().filter(|b| b.branch_n == a.branch_n + 1 && b.log_mu == a.log_mu) {
            worst = worst.max((b.lambda - a.lambda - shift).norm());
        }
    }
    worst
}

/// Default oracle grid: 1024 cells, reduced to fit the dense limit.
pub fn default_grid(dim: usize) -> usize {
    let mut m = 1024;
    while m * dim > MAX_UNKNOWNS {
        m /= 2;
    }
    m
}

pub fn oracle_suite(cfg: &ProblemConfig) -> Vec<Check> {
    let (p, e) = match cfg.build() {
        Ok(x) => x,
        Err(err) => return vec![Check::failed("build", err.to_string())],
    };
    let w2 = &e.w2;
    let mut checks = Vec::new();
    let evs = match interval_eigenvalues(&p, w2, cfg.window(), cfg.options.arg_branch) {
        Ok(v) => v,
        Err(err) => return vec![Check::failed("interval_eigenvalues", err.to_string())],
    };
    checks.push(Check::at_most("branch_shift", branch_shift_error(&p, &evs), 1e-14));
    checks.push(Check::at_most("characteristic_residual", evs.iter().map(|e| e.residual).fold(0.0, f64::max), CHARACTERISTIC_TOL));
    let bc = evs.iter().map(|ev| eigenfunction_bc_residual(&p, w2, ev)).collect::<Result<Vec<f64>>>();
    checks.push(match bc {
        Ok(v) => Check::at_most("eigenfunction_bc", v.into_iter().fold(0.0, f64::max), 1e-9),
        Err(err) => Check::failed("eigenfunction_bc", err.to_string()),
    });
    checks.extend(fd_checks(&p, w2, cfg.options.grid.unwrap_or_else(|| default_grid(p.dim()))));
    checks
}

/// Formula against the box-scheme discretization on `|Im lambda| <= min(40, m / (10 tau))`.
pub fn fd_checks(p: &MultipointProblem, w2: &UnitaryOperator, m: usize) -> Vec<Check> {
    let bound = (m as f64 / (10.0 * p.tau())).min(40.0);
    let exact = match interval_eigenvalues(p, w2, BranchWindow::ImBound(bound), Default::default()) {
        Ok(v) => v,
        Err(err) => return vec![Check::failed("fd_oracle", err.to_string())],
    };
    let fd = match fd_interval_eigenvalues(p, w2, m, FdScheme::Box) {
        Ok(r) => r,
        Err(err) => return vec![Check::failed("fd_oracle", err.to_string())],
    };
    let err = exact.iter().map(|e| fd.relative_error(e.lambda)).fold(0.0, f64::max);
    let mut out = vec![Check::at_most("fd_relative_error", err, 5e-3).with_detail(format!("m = {m}, {} eigenvalues with |Im| <= {bound:.3}", exact.len()))];
    out.push(match fd.order_estimate {
        Some(o) => Check { name: "fd_order".into(), pass: (0.8..=2.5).contains(&o), measured: o, threshold: 2.5, detail: Some("expected in [0.8, 2.5]".into()) },
        None => Check { name: "fd_order".into(), pass: true, measured: f64::NAN, threshold: 2.5, detail: Some("no eigenvalue with a measurable error".into()) },
    });
    out
}

pub fn halfline_suite(cfg: &ProblemConfig, seed: u64) -> Vec<Check> {
    let ext = match cfg.build().and_then(|(p, e)| NormalExtension::new(p, e)) {
        Ok(x) => x,
        Err(err) => return vec![Check::failed("extension_exists", err.to_string())],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wrong = 0usize;
    for _ in 0..200 {
        let z = Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let v = point_spectrum_check(&ext, z);
        let want = if z.re.abs() <= MARGINAL_TOL {
            NonEigenReason::Marginal
        } else if z.re > 0.0 {
            NonEigenReason::RightGrowth
        } else {
            NonEigenReason::LeftGrowth
        };
        if v.is_eigenvalue || v.reason != want {
            wrong += 1;
        }
    }
    let mut checks = vec![Check::at_most("point_spectrum_empty", wrong as f64, 0.0).with_detail("200 samples in [-5,5]x[-5,5]i")];
    checks.push(match continuous_spectrum(&ext) {
        Ok(c) => Check::at_most("real_part_elimination", c.intersection.iter().fold(0.0, |a: f64, x| a.max(x.abs())), 0.0),
        Err(err) => Check::failed("real_part_elimination", err.to_string()),
    });
    let ts = [1.0, 2.0, 4.0, 8.0];
    checks.extend(match nonsurjectivity_witness(&ext, rng.random_range(-5.0..5.0), &ts, cfg.options.witness_profile) {
        Ok(w) => {
            let steps = w.truncated_norms.windows(2).filter(|p| p[1].1 <= p[0].1).count();
            let quad = w
                .truncated_norms
                .iter()
                .map(|&(t, v)| (quadrature_l2_fn(|s| w.solution(s), w.a1 - t, w.a1, 16 * t as usize) / v - 1.0).abs())
                .fold(0.0, f64::max);
            vec![
                Check::at_most("witness_monotone", steps as f64, 0.0).with_detail("T in {1, 2, 4, 8}"),
                Check::at_most("witness_quadrature", quad, 1e-6),
            ]
        }
        Err(err) => vec![Check::failed("witness", err.to_string())],
    });
    checks
}

pub fn run_suite(cfg: &ProblemConfig, suite: Suite, seed: u64) -> VerifyReport {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Green | Suite::All) {
        checks.extend(green_suite(cfg, seed));
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        checks.extend(oracle_suite(cfg));
    }
    if matches!(suite, Suite::Halfline | Suite::All) {
        checks.extend(halfline_suite(cfg, seed));
    }
    let passed = checks.iter().all(|c| c.pass);
    VerifyReport { version: REPORT_VERSION, kind: "verify_report", suite, seed, checks, passed }
}
