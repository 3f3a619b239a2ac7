//! Spectrum of the half-line part `L_{W1}` on `(-inf, a1) ∪ (a3, inf)`.
//!
//! There are no eigenvalues: a candidate eigenfunction is `e^{lambda (t - a1)} f1*`
//! on the left and `e^{lambda (t - a3)} f3*` on the right, and at least one of
//! the two fails to be square integrable unless `f1* = f3* = 0`. The whole
//! imaginary axis is continuous spectrum.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary_triplet::expm1;
use crate::composite_spectrum::SpectralSet;
use crate::error::{Error, Result};
use crate::extension::NormalExtension;
use crate::linalg::{norm, CVector};
use crate::operator_model::EXP_LIMIT;

/// `|Re lambda|` at or below this is treated as on the axis.
pub const MARGINAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonEigenReason {
    /// `Re lambda < 0`: `u1` grows toward `-inf`.
    LeftGrowth,
    /// `Re lambda > 0`: `u3` grows toward `+inf`.
    RightGrowth,
    /// `Re lambda = 0`: both pieces have constant modulus, which forces zero data.
    Marginal,
}

impl fmt::Display for NonEigenReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NonEigenReason::LeftGrowth => "left-growth",
            NonEigenReason::RightGrowth => "right-growth",
            NonEigenReason::Marginal => "marginal",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointSpectrumVerdict {
    pub lambda: Complex64,
    /// Always false.
    pub is_eigenvalue: bool,
    pub reason: NonEigenReason,
    /// `∫_{-inf}^{a1} |e^{lambda (t - a1)}|^2 dt`, `None` when infinite.
    pub left_norm_factor: Option<f64>,
    /// `∫_{a3}^{inf} |e^{lambda (t - a3)}|^2 dt`, `None` when infinite.
    pub right_norm_factor: Option<f64>,
    pub kernel_dim: usize,
}

/// Classifies `lambda` as a non-eigenvalue of `L_{W1}`.
///
/// An eigenfunction needs both pieces in `L2`. Whichever factor is infinite
/// forces its boundary vector to vanish, and `f3* = W1 f1*` with `W1`
/// unitary then forces the other one to vanish too.
pub fn point_spectrum_check(ext: &NormalExtension, lambda: Complex64) -> PointSpectrumVerdict {
    let r = lambda.re;
    let marginal = r.abs() <= MARGINAL_TOL;
    let left_norm_factor = (!marginal && r > 0.0).then(|| 1.0 / (2.0 * r));
    let right_norm_factor = (!marginal && r < 0.0).then(|| -1.0 / (2.0 * r));
    let reason = match (left_norm_factor, right_norm_factor) {
        (None, None) => NonEigenReason::Marginal,
        (Some(_), _) => NonEigenReason::RightGrowth,
        (_, Some(_)) => NonEigenReason::LeftGrowth,
    };
    PointSpectrumVerdict {
        lambda,
        is_eigenvalue: false,
        reason,
        left_norm_factor,
        right_norm_factor,
        kernel_dim: ext.report().kernel_dims.0,
    }
}

/// Real-part elimination: `Re lambda` must lie in both `sigma(A1)` and `sigma(A3)`.
#[derive(Clone, Debug, Serialize)]
pub struct ContinuousCertificate {
    pub set: SpectralSet,
    pub sigma_a1: Vec<f64>,
    pub sigma_a3: Vec<f64>,
    pub intersection: Vec<f64>,
}

/// Common points of two spectra, each taken as the midpoint of a matched pair.
/// Anything other than `0` is an error.
pub fn real_part_elimination(sigma_a1: &[f64], sigma_a3: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut common = Vec::new();
    for &x in sigma_a1 {
        for &y in sigma_a3 {
            if (x - y).abs() <= tol {
                let m = 0.5 * (x + y);
                if !common.iter().any(|c: &f64| (c - m).abs() <= tol) {
                    common.push(m);
                }
            }
        }
    }
    let bad: Vec<f64> = common.iter().copied().filter(|m| m.abs() > tol).collect();
    if !bad.is_empty() {
        return Err(Error::InconsistentCoefficients(bad));
    }
    Ok(common)
}

pub fn continuous_spectrum(ext: &NormalExtension) -> Result<ContinuousCertificate> {
    let p = ext.problem();
    let (a1, a3) = (p.left(), p.right());
    let tol = a1.tol_kernel() * a1.norm().max(a3.norm()).max(1.0);
    let intersection = real_part_elimination(a1.eigenvalues(), a3.eigenvalues(), tol)?;
    Ok(ContinuousCertificate {
        set: SpectralSet::ImaginaryAxis,
        sigma_a1: a1.eigenvalues().to_vec(),
        sigma_a3: a3.eigenvalues().to_vec(),
        intersection,
    })
}

/// Sign of the exponent in the witness source `f1(t) = e^{i lambda_i t} e^{∓(t - a1)} f*`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessProfile {
    /// `e^{-(t - a1)}`: the would-be solution is `(e^{-(t - a1)} - 1) f*`.
    #[default]
    Printed,
    /// `e^{+(t - a1)}`: the source is in `L2` and the would-be solution is `(1 - e^{t - a1}) f*`.
    Decaying,
}

impl WitnessProfile {
    /// Scalar profile of the would-be solution at `s = a1 - t >= 0`.
    pub fn profile(self, s: f64) -> f64 {
        match self {
            WitnessProfile::Printed => s.exp_m1(),
            WitnessProfile::Decaying => -(-s).exp_m1(),
        }
    }

    /// `∫_0^T profile(s)^2 ds`
    pub fn truncated_integral(self, t: f64) -> Result<f64> {
        let z = |x: f64| expm1(Complex64::new(x, 0.0)).re;
        match self {
            WitnessProfile::Printed => {
                if 2.0 * t > EXP_LIMIT {
                    return Err(Error::Range { exponent: 2.0 * t, limit: EXP_LIMIT });
                }
                Ok(z(2.0 * t) / 2.0 - 2.0 * z(t) + t)
            }
            WitnessProfile::Decaying => Ok(-z(-2.0 * t) / 2.0 + 2.0 * z(-t) + t),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NonSurjectivityWitness {
    pub lambda_i: f64,
    pub profile: WitnessProfile,
    pub a1: f64,
    #[serde(skip)]
    pub f_star: CVector,
    /// `(T, ||u1||^2 over (a1 - T, a1))`
    pub truncated_norms: Vec<(f64, f64)>,
}

impl NonSurjectivityWitness {
    /// Source `f1(t)` that has no `L2` preimage under `L_{W1} - i lambda_i`.
    pub fn source(&self, t: f64) -> CVector {
        let sign = match self.profile {
            WitnessProfile::Printed => -1.0,
            WitnessProfile::Decaying => 1.0,
        };
        let w = Complex64::new(0.0, self.lambda_i * t).exp() * (sign * (t - self.a1)).exp();
        self.f_star.mapv(|z| z * w)
    }

    /// The would-be solution `u1(t) = -∫_t^{a1} e^{i lambda_i (t - s)} f1(s) ds` on `t < a1`.
    pub fn solution(&self, t: f64) -> CVector {
        let w = -Complex64::new(0.0, self.lambda_i * t).exp() * self.profile.profile(self.a1 - t);
        self.f_star.mapv(|z| z * w)
    }

    /// True when the truncated norms grow strictly.
    pub fn diverges(&self) -> bool {
        self.truncated_norms.windows(2).all(|w| w[1].1 > w[0].1)
    }
}

/// Builds the witness that `L_{W1} - i lambda_i` is not onto, with `f*` the
/// first basis vector of `ker A1`.
pub fn nonsurjectivity_witness(ext: &NormalExtension, lambda_i: f64, t_list: &[f64], profile: WitnessProfile) -> Result<NonSurjectivityWitness> {
    let f_star = ext.problem().left().kernel_basis().into_iter().next().ok_or(Error::NoWitness)?;
    nonsurjectivity_witness_with(ext, lambda_i, t_list, profile, f_star)
}

/// As [`nonsurjectivity_witness`] with a caller-chosen `f* ∈ ker A1`.
pub fn nonsurjectivity_witness_with(ext: &NormalExtension, lambda_i: f64, t_list: &[f64], profile: WitnessProfile, f_star: CVector) -> Result<NonSurjectivityWitness> {
    let p = ext.problem();
    crate::linalg::ensure_dim(p.dim(), f_star.len())?;
    let a1 = p.left();
    let leak = norm(&a1.apply(&f_star));
    if norm(&f_star) == 0.0 || leak > a1.cutoff(a1.tol_kernel()) * norm(&f_star) {
        return Err(Error::NoWitness);
    }
    if t_list.iter().any(|t| !(*t > 0.0)) || t_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidProblem("truncation lengths must be positive and ascending".into()));
    }
    let f2 = norm(&f_star).powi(2);
    let truncated_norms = t_list
        .iter()
        .map(|&t| Ok((t, profile.truncated_integral(t)? * f2)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NonSurjectivityWitness { lambda_i, profile, a1: p.a1(), f_star, truncated_norms })
}

#[derive(Clone, Debug, Serialize)]
pub struct HalflineSpectrum {
    pub point: SpectralSet,
    pub residual: SpectralSet,
    pub continuous: SpectralSet,
    pub certificate: ContinuousCertificate,
    /// Point checks at the sampled `lambda`.
    pub samples: Vec<PointSpectrumVerdict>,
}

impl HalflineSpectrum {
    pub fn sampled_point_spectrum_empty(&self) -> bool {
        self.samples.iter().all(|v| !v.is_eigenvalue)
    }
}

pub fn full_halfline_spectrum(ext: &NormalExtension, samples: &[Complex64]) -> Result<HalflineSpectrum> {
    let certificate = continuous_spectrum(ext)?;
    Ok(HalflineSpectrum {
        point: SpectralSet::Empty,
        residual: SpectralSet::Empty,
        continuous: certificate.set.clone(),
        certificate,
        samples: samples.iter().map(|&l| point_spectrum_check(ext, l)).collect(),
    })
}
