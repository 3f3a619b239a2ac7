//! Spectrum of the interval part `L_{W2}`: `d/dt + A2` on `(a2, b2)` with
//! `u2(b2) = W2 u2(a2)`.
//!
//! `lambda` is an eigenvalue iff `e^{-lambda (b2 - a2)} = mu` for some
//! eigenvalue `mu` of the monodromy `M = W2* e^{-A2 (b2 - a2)}`, giving the
//! branch family
//!
//! ```text
//! lambda = (ln|mu| + i arg mu + 2 n pi i) / (a2 - b2),   n ∈ Z,  0 <= arg mu < 2pi.
//! ```

use std::f64::consts::TAU;

use ndarray::Axis;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary_triplet::{phi1, IntervalTag, TestFunction};
use crate::error::{Error, Result};
use crate::extension::MultipointProblem;
use crate::linalg::{adjoint, commutator_norm, ensure_dim, general_eig, identity, inner, norm, opnorm2, smallest_singular_value, solve, CMatrix, CVector};
use crate::operator_model::{operator_exp, HermitianOperator, UnitaryOperator, LN_UNDERFLOW};

/// `[W2, A2]` below this (relative to `max(1, ||A2||)`) takes the commuting path.
pub const COMMUTING_TOL: f64 = 1e-12;

/// Characteristic-residual certificate bound, relative to `||M||`.
pub const CHARACTERISTIC_TOL: f64 = 1e-9;

/// Resolvent is refused when `sigma_min` of the bracket is below this, relative to its norm.
pub const NEAR_SINGULAR_TOL: f64 = 1e-8;

/// Which integers `n` to enumerate; `Z` itself cannot be.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchWindow {
    Range { n_min: i64, n_max: i64 },
    /// All branches with `|Im lambda| <= bound`.
    ImBound(f64),
}

impl BranchWindow {
    /// `|Im lambda| <= 10 * 2pi / tau`.
    pub fn default_for(tau: f64) -> Self {
        BranchWindow::ImBound(10.0 * TAU / tau)
    }

    /// `n` range for a family with `Im lambda_n = base + n * step`.
    fn branches(&self, base: f64, step: f64) -> Option<(i64, i64)> {
        match *self {
            BranchWindow::Range { n_min, n_max } => (n_min <= n_max).then_some((n_min, n_max)),
            BranchWindow::ImBound(bound) => {
                if !(bound >= 0.0) {
                    return None;
                }
                let (x, y) = ((-bound - base) / step, (bound - base) / step);
                let (lo, hi) = (x.min(y).ceil() as i64, x.max(y).floor() as i64);
                (lo <= hi).then_some((lo, hi))
            }
        }
    }
}

/// Branch of `arg mu`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgBranch {
    #[default]
    ZeroToTwoPi,
    MinusPiToPi,
}

impl ArgBranch {
    pub fn arg(self, z: Complex64) -> f64 {
        let a = z.im.atan2(z.re);
        match self {
            ArgBranch::MinusPiToPi => a,
            ArgBranch::ZeroToTwoPi => {
                let a = if a < 0.0 { a + TAU } else { a };
                if a >= TAU {
                    0.0
                } else {
                    a
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Monodromy {
    /// `W2* e^{-A2 tau}`
    pub matrix: CMatrix,
    /// Some `e^{-alpha tau}` fell below `1e-300`.
    pub precision_loss: bool,
    /// `||[W2, A2]||` within [`COMMUTING_TOL`].
    pub commuting: bool,
    pub commutator: f64,
}

pub fn monodromy(p: &MultipointProblem, w2: &UnitaryOperator) -> Result<Monodromy> {
    ensure_dim(p.dim(), w2.dim())?;
    let a2 = p.middle();
    let e = operator_exp(a2, Complex64::new(0.0, 0.0), p.tau())?;
    let commutator = commutator_norm(w2.entries(), a2.entries());
    Ok(Monodromy {
        matrix: w2.adjoint().dot(&e.matrix),
        precision_loss: e.precision_loss,
        commuting: commutator <= COMMUTING_TOL * a2.norm().max(1.0),
        commutator,
    })
}

/// One eigenpair `(mu, f)` of the monodromy.
#[derive(Clone, Debug)]
pub struct MonodromyMode {
    pub mu: Complex64,
    /// `ln|mu| + i arg mu`
    pub log_mu: Complex64,
    pub eigvec: CVector,
    /// `Some(alpha)` when `eigvec` lies in the `alpha`-eigenspace of `A2`.
    pub coefficient_eigenvalue: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct MonodromySpectrum {
    pub monodromy: Monodromy,
    pub modes: Vec<MonodromyMode>,
    /// `sigma_max / sigma_min` of the eigenvector matrix.
    pub conditioning: f64,
}

/// Eigenpairs of `W2* e^{-A2 tau}`.
///
/// When `W2` commutes with `A2` each `A2`-eigenspace is invariant, `W2*` is
/// diagonalized blockwise and `ln|mu| = -alpha tau` is taken from `sigma(A2)`
/// directly, which stays exact when `e^{-alpha tau}` underflows.
pub fn monodromy_spectrum(p: &MultipointProblem, w2: &UnitaryOperator, branch: ArgBranch) -> Result<MonodromySpectrum> {
    let mono = monodromy(p, w2)?;
    let tau = p.tau();
    let a2 = p.middle();
    let mut modes = Vec::with_capacity(p.dim());
    if mono.commuting {
        let eig = a2.eigen();
        let cut = 1e-10 * a2.norm().max(1.0);
        let mut start = 0;
        while start < eig.eigenvalues.len() {
            let mut end = start + 1;
            while end < eig.eigenvalues.len() && eig.eigenvalues[end] - eig.eigenvalues[end - 1] <= cut {
                end += 1;
            }
            let basis = eig.eigenvectors.slice(ndarray::s![.., start..end]).to_owned();
            let alpha = eig.eigenvalues[start..end].iter().sum::<f64>() / (end - start) as f64;
            let block = adjoint(&basis).dot(&w2.adjoint()).dot(&basis);
            let (omegas, ys) = general_eig(&block)?;
            for (omega, y) in omegas.iter().zip(ys.axis_iter(Axis(1))) {
                let f = basis.dot(&y);
                let f = f.mapv(|z| z / norm(&f));
                let log_mu = Complex64::new(-alpha * tau, branch.arg(*omega));
                let mu = if -alpha * tau < LN_UNDERFLOW { Complex64::new(0.0, 0.0) } else { log_mu.exp() };
                modes.push(MonodromyMode { mu, log_mu, eigvec: f, coefficient_eigenvalue: Some(alpha) });
            }
            start = end;
        }
    } else {
        let (mus, vecs) = general_eig(&mono.matrix)?;
        for (mu, v) in mus.iter().zip(vecs.axis_iter(Axis(1))) {
            if mu.norm() < 1e-300 {
                return Err(Error::PrecisionLoss { mu: *mu });
            }
            let log_mu = Complex64::new(mu.norm().ln(), branch.arg(*mu));
            modes.push(MonodromyMode { mu: *mu, log_mu, eigvec: v.to_owned(), coefficient_eigenvalue: None });
        }
    }
    let mut v = CMatrix::zeros((p.dim(), modes.len()));
    for (k, m) in modes.iter().enumerate() {
        v.column_mut(k).assign(&m.eigvec);
    }
    let sv = crate::linalg::singular_values(&v)?;
    let conditioning = sv.iter().cloned().fold(0.0, f64::max) / sv.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(MonodromySpectrum { monodromy: mono, modes, conditioning })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalEigenvalue {
    pub lambda: Complex64,
    pub mu: Complex64,
    /// `ln|mu| + i arg mu`
    pub log_mu: Complex64,
    pub branch_n: i64,
    #[serde(skip)]
    pub eigvec: CVector,
    pub conditioning: f64,
    /// `sigma_min(e^{-lambda tau} I - M) / ||M||`
    pub residual: f64,
    #[serde(skip)]
    pub coefficient_eigenvalue: Option<f64>,
}

/// Imaginary parts `base + n * step` on a common dyadic grid, so that
/// consecutive differences are exact.
fn branch_ladder(base: f64, step: f64, n_min: i64, n_max: i64) -> impl Iterator<Item = (i64, f64)> {
    let extent = (base + n_min as f64 * step).abs().max((base + n_max as f64 * step).abs()).max(step.abs());
    let quantum = 2f64.powi(extent.log2().floor() as i32 - 52);
    let k_base = (base / quantum).round() as i64;
    let k_step = (step / quantum).round() as i64;
    (n_min..=n_max).map(move |n| (n, (k_base + n * k_step) as f64 * quantum))
}

/// `2 pi i / (a2 - b2)`
pub fn branch_shift(p: &MultipointProblem) -> Complex64 {
    Complex64::new(0.0, TAU / (p.a2() - p.b2()))
}

/// `(ln|mu| + i arg mu + 2 n pi i) / (a2 - b2)` for a single branch.
pub fn branch_value(p: &MultipointProblem, log_mu: Complex64, n: i64) -> Complex64 {
    (log_mu + Complex64::new(0.0, TAU * n as f64)) / (p.a2() - p.b2())
}

pub fn interval_eigenvalues(p: &MultipointProblem, w2: &UnitaryOperator, window: BranchWindow, branch: ArgBranch) -> Result<Vec<IntervalEigenvalue>> {
    let spectrum = monodromy_spectrum(p, w2, branch)?;
    let m = &spectrum.monodromy.matrix;
    let m_norm = opnorm2(m)?.max(f64::MIN_POSITIVE);
    let tau = p.tau();
    let span = p.a2() - p.b2();
    let step = TAU / span;
    let id = identity(p.dim());
    let mut out = Vec::new();
    for mode in &spectrum.modes {
        let re = mode.log_mu.re / span;
        let base = mode.log_mu.im / span;
        let Some((n_min, n_max)) = window.branches(base, step) else { continue };
        for (n, im) in branch_ladder(base, step, n_min, n_max) {
            let lambda = Complex64::new(re, im);
            let shifted = &id.mapv(|z| z * (-lambda * tau).exp()) - m;
            let residual = smallest_singular_value(&shifted)? / m_norm;
            out.push(IntervalEigenvalue {
                lambda,
                mu: mode.mu,
                log_mu: mode.log_mu,
                branch_n: n,
                eigvec: mode.eigvec.clone(),
                conditioning: spectrum.conditioning,
                residual,
                coefficient_eigenvalue: mode.coefficient_eigenvalue,
            });
        }
    }
    out.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im)));
    Ok(out)
}

fn check_in_interval(p: &MultipointProblem, t: f64) -> Result<()> {
    if !(p.a2() <= t && t <= p.b2()) {
        return Err(Error::OutOfInterval { t, lo: p.a2(), hi: p.b2() });
    }
    Ok(())
}

/// `u2(t) = e^{-(A2 - lambda)(t - a2)} f2*`.
pub fn eigenfunction(p: &MultipointProblem, ev: &IntervalEigenvalue, t: f64) -> Result<CVector> {
    check_in_interval(p, t)?;
    ensure_dim(p.dim(), ev.eigvec.len())?;
    let s = t - p.a2();
    match ev.coefficient_eigenvalue {
        Some(alpha) => {
            let w = ((ev.lambda - alpha) * s).exp();
            Ok(ev.eigvec.mapv(|z| z * w))
        }
        None => Ok(operator_exp(p.middle(), ev.lambda, s)?.matrix.dot(&ev.eigvec)),
    }
}

/// `||u2(b2) - W2 u2(a2)||` for an eigenvalue record.
pub fn eigenfunction_bc_residual(p: &MultipointProblem, w2: &UnitaryOperator, ev: &IntervalEigenvalue) -> Result<f64> {
    let ua = eigenfunction(p, ev, p.a2())?;
    let ub = eigenfunction(p, ev, p.b2())?;
    Ok(norm(&(ub - w2.apply(&ua))))
}

/// `∫_0^T e^{p (T - x)} e^{q x} dx`, evaluated with the larger exponential factored out.
fn convolve_exp(p: Complex64, q: Complex64, t: f64) -> Complex64 {
    if p.re >= q.re {
        (p * t).exp() * phi1((q - p) * t) * t
    } else {
        (q * t).exp() * phi1((p - q) * t) * t
    }
}

/// `u2 = (L_{W2} - lambda)^{-1} f2` in closed form.
#[derive(Clone, Debug)]
pub struct IntervalSolution {
    a2_op: HermitianOperator,
    a2: f64,
    b2: f64,
    lambda: Complex64,
    /// `u2(a2)`
    pub f_star: CVector,
    source: TestFunction,
}

impl IntervalSolution {
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// `∫_{a2}^t e^{-(A2 - lambda)(t - s)} f2(s) ds`
    pub fn particular(&self, t: f64) -> CVector {
        let s = t - self.a2;
        let eig = self.a2_op.eigen();
        let mut out = CVector::zeros(self.a2_op.dim());
        for term in self.source.terms() {
            for (k, &alpha) in eig.eigenvalues.iter().enumerate() {
                let v = eig.eigenvector(k);
                let coeff = inner(&term.coeff, &v);
                let w = convolve_exp(self.lambda - alpha, term.rate, s);
                out.scaled_add(coeff * w, &v);
            }
        }
        out
    }

    pub fn eval(&self, t: f64) -> Result<CVector> {
        if !(self.a2 <= t && t <= self.b2) {
            return Err(Error::OutOfInterval { t, lo: self.a2, hi: self.b2 });
        }
        let hom = operator_exp(&self.a2_op, self.lambda, t - self.a2)?.matrix.dot(&self.f_star);
        Ok(hom + self.particular(t))
    }

    pub fn source(&self) -> &TestFunction {
        &self.source
    }
}

/// Solves `u2' + A2 u2 - lambda u2 = f2`, `u2(b2) = W2 u2(a2)` for an
/// exponential-profile source.
///
/// `f2*` comes from `(e^{-lambda tau} - W2* e^{-A2 tau}) f2* = W2* e^{-lambda tau} P(b2)`
/// where `P` is the particular integral started at `a2`.
pub fn resolvent_apply(p: &MultipointProblem, w2: &UnitaryOperator, lambda: Complex64, f2: &TestFunction) -> Result<IntervalSolution> {
    ensure_dim(p.dim(), w2.dim())?;
    ensure_dim(p.dim(), f2.dim())?;
    if f2.tag() != IntervalTag::Middle || f2.anchor() != p.a2() || f2.end() != Some(p.b2()) {
        return Err(Error::InvalidTestFunction(format!("source must live on ({}, {})", p.a2(), p.b2())));
    }
    let tau = p.tau();
    let mut sol = IntervalSolution {
        a2_op: p.middle().clone(),
        a2: p.a2(),
        b2: p.b2(),
        lambda,
        f_star: CVector::zeros(p.dim()),
        source: f2.clone(),
    };
    let e = operator_exp(p.middle(), Complex64::new(0.0, 0.0), tau)?;
    let decay = (-lambda * tau).exp();
    let bracket = identity(p.dim()).mapv(|z| z * decay) - w2.adjoint().dot(&e.matrix);
    let sigma_min = smallest_singular_value(&bracket)?;
    let scale = decay.norm() + opnorm2(&e.matrix)?;
    if sigma_min <= NEAR_SINGULAR_TOL * scale {
        let (mu, branch) = nearest_branch(p, w2, lambda)?;
        return Err(Error::NearSingular { lambda, mu, branch, sigma_min });
    }
    let rhs = w2.adjoint().dot(&sol.particular(p.b2())).mapv(|z| z * decay);
    sol.f_star = solve(&bracket, &rhs)?;
    Ok(sol)
}

/// The `(mu, n)` whose branch value is closest to `lambda`.
fn nearest_branch(p: &MultipointProblem, w2: &UnitaryOperator, lambda: Complex64) -> Result<(Complex64, i64)> {
    let spectrum = monodromy_spectrum(p, w2, ArgBranch::ZeroToTwoPi)?;
    let span = p.a2() - p.b2();
    let mut best = (Complex64::new(0.0, 0.0), 0, f64::INFINITY);
    for mode in &spectrum.modes {
        let n = (((lambda * span).im - mode.log_mu.im) / TAU).round() as i64;
        let d = (branch_value(p, mode.log_mu, n) - lambda).norm();
        if d < best.2 {
            best = (mode.mu, n, d);
        }
    }
    Ok((best.0, best.1))
}
