//! Multipoint problems, unitary boundary parameters and the normality checks
//! that decide whether `(W1, W2)` defines a normal extension.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{commutator_norm, ensure_dim, norm, CMatrix, CVector};
use crate::operator_model::{psd_sqrt, validate_coefficients, CoefficientReport, HermitianOperator, UnitaryOperator};

/// Residual cutoff for `W1 ker(-A1)^{1/2} ⊆ ker A3^{1/2}`.
pub const KERNEL_MAP_TOL: f64 = 1e-10;

/// Pass threshold of [`check_boundary_conditions`].
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Endpoints `a1 < a2 < b2 < a3` with coefficients `A1 <= 0`, `A2 >= 0`, `A3 >= 0`.
#[derive(Clone, Debug)]
pub struct MultipointProblem {
    a1: f64,
    a2: f64,
    b2: f64,
    a3: f64,
    left: HermitianOperator,
    middle: HermitianOperator,
    right: HermitianOperator,
    coefficients: CoefficientReport,
}

impl MultipointProblem {
    pub fn new(endpoints: [f64; 4], left: HermitianOperator, middle: HermitianOperator, right: HermitianOperator) -> Result<Self> {
        let [a1, a2, b2, a3] = endpoints;
        if !endpoints.iter().all(|x| x.is_finite()) || !(a1 < a2 && a2 < b2 && b2 < a3) {
            return Err(Error::InvalidProblem(format!("endpoints must satisfy a1 < a2 < b2 < a3, got {endpoints:?}")));
        }
        let coefficients = validate_coefficients(&left, &middle, &right)?;
        if let Some(v) = coefficients.sign_violations.first() {
            return Err(Error::InvalidProblem(format!("{:?} has eigenvalue {:.6e} of the wrong sign", v.role, v.eigenvalue)));
        }
        Ok(MultipointProblem { a1, a2, b2, a3, left, middle, right, coefficients })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn a3(&self) -> f64 {
        self.a3
    }

    /// `b2 - a2`
    pub fn tau(&self) -> f64 {
        self.b2 - self.a2
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    /// `A1`
    pub fn left(&self) -> &HermitianOperator {
        &self.left
    }

    /// `A2`
    pub fn middle(&self) -> &HermitianOperator {
        &self.middle
    }

    /// `A3`
    pub fn right(&self) -> &HermitianOperator {
        &self.right
    }

    pub fn coefficient_report(&self) -> &CoefficientReport {
        &self.coefficients
    }
}

/// The unitary pair `(W1, W2)`.
#[derive(Clone, Debug)]
pub struct ExtensionParams {
    pub w1: UnitaryOperator,
    pub w2: UnitaryOperator,
}

impl ExtensionParams {
    pub fn new(w1: UnitaryOperator, w2: UnitaryOperator) -> Result<Self> {
        ensure_dim(w1.dim(), w2.dim())?;
        Ok(ExtensionParams { w1, w2 })
    }

    pub fn dim(&self) -> usize {
        self.w1.dim()
    }
}

/// `W1 = [e^{i phi}]`, `W2 = [e^{i psi}]` for a scalar problem.
pub fn scalar_extension(phi: f64, psi: f64) -> ExtensionParams {
    ExtensionParams { w1: UnitaryOperator::phase(1, phi), w2: UnitaryOperator::phase(1, psi) }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FlagResidual {
    pub ok: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalityReport {
    pub w1_unitary: FlagResidual,
    pub w2_unitary: FlagResidual,
    /// `(dim ker (-A1)^{1/2}, dim ker A3^{1/2})`
    pub kernel_dims: (usize, usize),
    pub kernel_compatible: bool,
    /// Largest distance of `W1 v` from `ker A3^{1/2}` over the `ker A1` basis.
    pub kernel_residual: f64,
    pub extension_exists: bool,
    /// `||W2 A2 - A2 W2||_F`, reported only.
    pub w2_a2_commutator: f64,
    pub maximality_note: Option<String>,
    pub notes: Vec<String>,
}

pub fn validate_extension(p: &MultipointProblem, e: &ExtensionParams) -> Result<NormalityReport> {
    ensure_dim(p.dim(), e.w1.dim())?;
    ensure_dim(p.dim(), e.w2.dim())?;
    let w1_unitary = FlagResidual { ok: e.w1.is_unitary(), residual: e.w1.residual() };
    let w2_unitary = FlagResidual { ok: e.w2.is_unitary(), residual: e.w2.residual() };

    let left_kernel = p.left().kernel_basis();
    let right_kernel = p.right().kernel_basis();
    let kernel_dims = (left_kernel.len(), right_kernel.len());

    let kernel_residual = left_kernel
        .iter()
        .map(|v| {
            let image = e.w1.apply(v);
            let projected = right_kernel.iter().fold(CVector::zeros(p.dim()), |acc, k| {
                let c = crate::linalg::inner(&image, k);
                acc + &k.mapv(|z| z * c)
            });
            norm(&(image - projected))
        })
        .fold(0.0, f64::max);
    let kernel_compatible = kernel_dims.0 == kernel_dims.1 && kernel_residual <= KERNEL_MAP_TOL;

    let mut notes = vec!["the smoothness hypotheses on (-A1)^{1/2}, A2^{1/2}, A3^{1/2} hold automatically in finite dimension".to_string()];
    let maximality_note = match (p.left().is_injective(), p.right().is_injective()) {
        (false, false) => None,
        (l, r) => {
            let which = match (l, r) {
                (true, true) => "A1 and A3 are",
                (true, false) => "A1 is",
                _ => "A3 is",
            };
            Some(format!("{which} one-to-one, so the minimal operator is maximally formally normal and has no normal extension"))
        }
    };
    if kernel_dims.0 != kernel_dims.1 {
        notes.push(format!("dim ker(-A1)^(1/2) = {} differs from dim ker A3^(1/2) = {}", kernel_dims.0, kernel_dims.1));
    }
    let w2_a2_commutator = commutator_norm(e.w2.entries(), p.middle().entries());
    if w2_a2_commutator > 1e-12 * p.middle().norm().max(1.0) {
        notes.push(format!("W2 does not commute with A2 (||[W2, A2]||_F = {w2_a2_commutator:.3e}); normality of the interval part is not certified"));
    }

    let extension_exists = kernel_dims.0 == kernel_dims.1
        && kernel_dims.0 > 0
        && kernel_compatible
        && w1_unitary.ok
        && w2_unitary.ok
        && maximality_note.is_none();

    Ok(NormalityReport {
        w1_unitary,
        w2_unitary,
        kernel_dims,
        kernel_compatible,
        kernel_residual,
        extension_exists,
        w2_a2_commutator,
        maximality_note,
        notes,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResidualCheck {
    pub residual: f64,
    pub pass: bool,
}

impl ResidualCheck {
    fn new(residual: f64) -> Self {
        ResidualCheck { residual, pass: residual <= BOUNDARY_TOL }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundaryResidualReport {
    /// `||u3(a3) - W1 u1(a1)||`
    pub halfline_coupling: ResidualCheck,
    /// `||u2(b2) - W2 u2(a2)||`
    pub interval_coupling: ResidualCheck,
    /// `||(-A1)^{1/2} u1(a1)||`
    pub left_kernel: ResidualCheck,
    /// `||A3^{1/2} u3(a3)||`
    pub right_kernel: ResidualCheck,
}

impl BoundaryResidualReport {
    pub fn passed(&self) -> bool {
        [self.halfline_coupling, self.interval_coupling, self.left_kernel, self.right_kernel].iter().all(|c| c.pass)
    }
}

/// Residuals of `u3(a3) = W1 u1(a1)`, `u2(b2) = W2 u2(a2)` and the kernel
/// memberships of `u1(a1)`, `u3(a3)`.
pub fn check_boundary_conditions(
    p: &MultipointProblem,
    e: &ExtensionParams,
    u1_a1: &CVector,
    u2_a2: &CVector,
    u2_b2: &CVector,
    u3_a3: &CVector,
) -> Result<BoundaryResidualReport> {
    for v in [u1_a1, u2_a2, u2_b2, u3_a3] {
        ensure_dim(p.dim(), v.len())?;
    }
    let left_root = psd_sqrt(p.left(), true)?;
    let right_root = psd_sqrt(p.right(), false)?;
    Ok(BoundaryResidualReport {
        halfline_coupling: ResidualCheck::new(norm(&(u3_a3 - &e.w1.apply(u1_a1)))),
        interval_coupling: ResidualCheck::new(norm(&(u2_b2 - &e.w2.apply(u2_a2)))),
        left_kernel: ResidualCheck::new(norm(&left_root.apply(u1_a1))),
        right_kernel: ResidualCheck::new(norm(&right_root.apply(u3_a3))),
    })
}

/// A problem together with parameters that passed [`validate_extension`].
#[derive(Clone, Debug)]
pub struct NormalExtension {
    problem: MultipointProblem,
    params: ExtensionParams,
    report: NormalityReport,
}

impl NormalExtension {
    pub fn new(problem: MultipointProblem, params: ExtensionParams) -> Result<Self> {
        let report = validate_extension(&problem, &params)?;
        if !report.extension_exists {
            let reason = report.maximality_note.clone().unwrap_or_else(|| {
                if report.kernel_dims.0 != report.kernel_dims.1 || report.kernel_dims.0 == 0 {
                    format!("kernel dimensions {:?} must be equal and positive", report.kernel_dims)
                } else if !report.w1_unitary.ok || !report.w2_unitary.ok {
                    "W1 and W2 must be unitary".to_string()
                } else {
                    format!("W1 does not map ker(-A1)^(1/2) onto ker A3^(1/2) (residual {:.3e})", report.kernel_residual)
                }
            });
            return Err(Error::NoNormalExtension(reason));
        }
        Ok(NormalExtension { problem, params, report })
    }

    pub fn problem(&self) -> &MultipointProblem {
        &self.problem
    }

    pub fn params(&self) -> &ExtensionParams {
        &self.params
    }

    pub fn report(&self) -> &NormalityReport {
        &self.report
    }
}

/// Conjugates `(A1, A3, W1)` to `(U A1 U*, V A3 V*, V W1 U*)`.
pub fn conjugate_halfline(p: &MultipointProblem, e: &ExtensionParams, u: &CMatrix, v: &CMatrix) -> Result<(MultipointProblem, ExtensionParams)> {
    let left = p.left().conjugate_by(u)?;
    let right = p.right().conjugate_by(v)?;
    let w1 = UnitaryOperator::unchecked(v.dot(e.w1.entries()).dot(&crate::linalg::adjoint(u)))?;
    let problem = MultipointProblem::new([p.a1(), p.a2(), p.b2(), p.a3()], left, p.middle().clone(), right)?;
    Ok((problem, ExtensionParams { w1, w2: e.w2.clone() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random, unit_vector};
    use num_complex::Complex64;
    use crate::SignConstraint::{Nonnegative, Nonpositive};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(v: &[f64], s: crate::SignConstraint) -> HermitianOperator {
        HermitianOperator::from_diagonal(v, s).unwrap()
    }

    fn swap() -> UnitaryOperator {
        let mut m = CMatrix::zeros((2, 2));
        m[[0, 1]] = c(1.0, 0.0);
        m[[1, 0]] = c(1.0, 0.0);
        UnitaryOperator::new(m).unwrap()
    }

    fn problem(a1: &[f64], a3: &[f64]) -> MultipointProblem {
        MultipointProblem::new([-1.0, 0.0, 1.0, 2.0], diag(a1, Nonpositive), diag(&[1.0, 3.0], Nonnegative), diag(a3, Nonnegative)).unwrap()
    }

    #[test]
    fn swap_maps_kernels() {
        let p = problem(&[-1.0, 0.0], &[0.0, 2.0]);
        let e = ExtensionParams::new(swap(), UnitaryOperator::identity(2)).unwrap();
        let r = validate_extension(&p, &e).unwrap();
        // oracle: W1 e2 = e1 spans ker A3
        let image = e.w1.apply(&unit_vector(2, 1));
        assert!(norm(&(image - unit_vector(2, 0))) == 0.0);
        assert_eq!(r.kernel_dims, (1, 1));
        assert!(r.kernel_compatible);
        assert!(r.extension_exists);
        assert!(r.maximality_note.is_none());
    }

    #[test]
    fn identity_w1_misses_kernel() {
        let p = problem(&[-1.0, 0.0], &[0.0, 2.0]);
        let e = ExtensionParams::new(UnitaryOperator::identity(2), UnitaryOperator::identity(2)).unwrap();
        let r = validate_extension(&p, &e).unwrap();
        assert!(!r.kernel_compatible);
        assert!(!r.extension_exists);
        assert!((r.kernel_residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn injective_a1_is_maximal() {
        let p = problem(&[-1.0, -2.0], &[0.0, 2.0]);
        let e = ExtensionParams::new(swap(), UnitaryOperator::identity(2)).unwrap();
        let r = validate_extension(&p, &e).unwrap();
        assert!(!r.extension_exists);
        assert!(r.maximality_note.as_deref().unwrap().contains("maximally formally normal"));
        assert!(matches!(NormalExtension::new(p, e), Err(Error::NoNormalExtension(_))));
    }

    #[test]
    fn unequal_kernels_rejected() {
        let p = problem(&[0.0, 0.0], &[0.0, 2.0]);
        let e = ExtensionParams::new(swap(), UnitaryOperator::identity(2)).unwrap();
        let r = validate_extension(&p, &e).unwrap();
        assert_eq!(r.kernel_dims, (2, 1));
        assert!(!r.extension_exists);
    }

    #[test]
    fn non_unitary_reported_in_flag() {
        let p = problem(&[-1.0, 0.0], &[0.0, 2.0]);
        let bad = UnitaryOperator::unchecked(crate::linalg::real_diag(&[1.0, 2.0])).unwrap();
        let e = ExtensionParams::new(swap(), bad).unwrap();
        let r = validate_extension(&p, &e).unwrap();
        assert!(!r.w2_unitary.ok);
        assert!(!r.extension_exists);
    }

    #[test]
    fn boundary_condition_residuals() {
        let p = problem(&[-1.0, 0.0], &[0.0, 2.0]);
        let e = ExtensionParams::new(swap(), UnitaryOperator::identity(2)).unwrap();
        let z = CVector::zeros(2);
        let r = check_boundary_conditions(&p, &e, &z, &z, &z, &z).unwrap();
        assert!(r.passed());
        assert_eq!(r.left_kernel.residual, 0.0);

        let e1 = unit_vector(2, 0);
        let r = check_boundary_conditions(&p, &e, &e1, &z, &z, &e.w1.apply(&e1)).unwrap();
        assert!((r.left_kernel.residual - 1.0).abs() < 1e-15);
        assert!(!r.left_kernel.pass);
    }

    #[test]
    fn scalar_phase_conditions() {
        let phi = 1.3;
        let p = MultipointProblem::new([-1.0, 0.0, 1.0, 2.0], diag(&[0.0], Nonpositive), diag(&[2.0], Nonnegative), diag(&[0.0], Nonnegative)).unwrap();
        let e = scalar_extension(phi, 0.4);
        let u1 = CVector::from(vec![c(0.7, -0.2)]);
        let u3 = u1.mapv(|z| z * Complex64::from_polar(1.0, phi));
        let u2a = CVector::from(vec![c(1.0, 0.0)]);
        let u2b = u2a.mapv(|z| z * Complex64::from_polar(1.0, 0.4));
        assert!(check_boundary_conditions(&p, &e, &u1, &u2a, &u2b, &u3).unwrap().passed());
    }

    #[test]
    fn scalar_extension_phases() {
        let e = scalar_extension(0.0, 0.0);
        assert_eq!(e.w1.entries()[[0, 0]], c(1.0, 0.0));
        assert_eq!(e.w2.entries()[[0, 0]], c(1.0, 0.0));
        let e = scalar_extension(std::f64::consts::PI, 0.0);
        assert!((e.w1.entries()[[0, 0]] - c(-1.0, 0.0)).norm() < 1e-15);
        let e = scalar_extension(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
        for w in [&e.w1, &e.w2] {
            assert!((w.entries()[[0, 0]] - c(0.0, 1.0)).norm() < 1e-15);
            assert!((w.entries()[[0, 0]].norm() - 1.0).abs() < 1e-15);
            assert!(w.residual() < 1e-15);
        }
    }

    #[test]
    fn scalar_translation_always_extends() {
        let p = MultipointProblem::new([-1.0, 0.0, 1.0, 2.0], diag(&[0.0], Nonpositive), diag(&[0.0], Nonnegative), diag(&[0.0], Nonnegative)).unwrap();
        for k in 0..12 {
            let e = scalar_extension(0.5 * k as f64, 6.0 - 0.5 * k as f64);
            assert!(validate_extension(&p, &e).unwrap().extension_exists);
        }
    }

    #[test]
    fn invariant_under_unitary_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = MultipointProblem::new(
            [-1.0, 0.0, 1.0, 2.0],
            diag(&[-2.0, 0.0, 0.0], Nonpositive),
            diag(&[1.0, 2.0, 3.0], Nonnegative),
            diag(&[0.0, 0.0, 5.0], Nonnegative),
        )
        .unwrap();
        let mut w = CMatrix::zeros((3, 3));
        w[[0, 1]] = c(1.0, 0.0);
        w[[1, 2]] = c(0.0, 1.0);
        w[[2, 0]] = c(1.0, 0.0);
        let good = ExtensionParams::new(UnitaryOperator::new(w).unwrap(), UnitaryOperator::identity(3)).unwrap();
        let bad = ExtensionParams::new(UnitaryOperator::identity(3), UnitaryOperator::identity(3)).unwrap();
        let base_good = validate_extension(&p, &good).unwrap().extension_exists;
        let base_bad = validate_extension(&p, &bad).unwrap().extension_exists;
        assert!(base_good && !base_bad);
        for _ in 0..20 {
            let u = random::unitary(&mut rng, 3);
            let v = random::unitary(&mut rng, 3);
            let (pg, eg) = conjugate_halfline(&p, &good, &u, &v).unwrap();
            assert_eq!(validate_extension(&pg, &eg).unwrap().extension_exists, base_good);
            let (pb, eb) = conjugate_halfline(&p, &bad, &u, &v).unwrap();
            assert_eq!(validate_extension(&pb, &eb).unwrap().extension_exists, base_bad);
        }
    }

    #[test]
    fn endpoint_order_is_enforced() {
        let err = MultipointProblem::new([0.0, 0.0, 1.0, 2.0], diag(&[0.0], Nonpositive), diag(&[0.0], Nonnegative), diag(&[0.0], Nonnegative));
        assert!(matches!(err, Err(Error::InvalidProblem(_))));
    }
}
