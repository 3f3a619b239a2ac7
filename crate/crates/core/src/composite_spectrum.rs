//! Spectrum of `L_{W1 W2} = L_{W1} ⊕ L_{W2}`.
//!
//! The half-line part has no eigenvalues and continuous spectrum `iR`; the
//! interval part has pure point spectrum. So
//!
//! ```text
//! sigma_p = sigma_p(L_{W2}),   sigma_c = (iR \ sigma_p(L_{W2})) ∪ sigma_c(L_{W2}),   sigma_r = ∅
//! ```
//!
//! and `sigma_c(L_{W2})` is empty in finite dimension.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::extension::NormalExtension;
use crate::halfline_spectrum::{full_halfline_spectrum, HalflineSpectrum};
use crate::interval_spectrum::{branch_shift, branch_value, interval_eigenvalues, monodromy_spectrum, ArgBranch, BranchWindow, IntervalEigenvalue};

/// Duplicate-point merging tolerance.
pub const MERGE_TOL: f64 = 1e-10;

/// Subsets of `C` built from the imaginary axis, finite sets and arithmetic
/// progressions. Membership is the only query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralSet {
    Empty,
    ImaginaryAxis,
    Finite { points: Vec<Complex64> },
    /// `{offset + k step : k ∈ Z}`
    Ladder { offset: Complex64, step: Complex64 },
    /// `iR` without the points of `excluded`.
    AxisMinus { excluded: Box<SpectralSet> },
    Union { parts: Vec<SpectralSet> },
}

impl SpectralSet {
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        match self {
            SpectralSet::Empty => false,
            SpectralSet::ImaginaryAxis => z.re.abs() <= tol,
            SpectralSet::Finite { points } => points.iter().any(|p| (p - z).norm() <= tol),
            SpectralSet::Ladder { offset, step } => {
                let k = ((z - offset) / step).re.round();
                (offset + step * k - z).norm() <= tol
            }
            SpectralSet::AxisMinus { excluded } => z.re.abs() <= tol && !excluded.contains(z, tol),
            SpectralSet::Union { parts } => parts.iter().any(|s| s.contains(z, tol)),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SpectralSet::Empty => true,
            SpectralSet::Finite { points } => points.is_empty(),
            SpectralSet::Union { parts } => parts.iter().all(SpectralSet::is_empty),
            _ => false,
        }
    }

    /// Flattening union that drops empty parts.
    pub fn union(parts: impl IntoIterator<Item = SpectralSet>) -> SpectralSet {
        let mut flat = Vec::new();
        for s in parts {
            match s {
                SpectralSet::Union { parts } => flat.extend(parts.into_iter().filter(|p| !p.is_empty())),
                s if s.is_empty() => {}
                s => flat.push(s),
            }
        }
        match flat.len() {
            0 => SpectralSet::Empty,
            1 => flat.pop().unwrap(),
            _ => SpectralSet::Union { parts: flat },
        }
    }

    /// `(iR \ self) ∪ extra`
    pub fn axis_complement(&self, extra: SpectralSet) -> SpectralSet {
        let axis = if self.is_empty() {
            SpectralSet::ImaginaryAxis
        } else {
            SpectralSet::AxisMinus { excluded: Box::new(self.clone()) }
        };
        SpectralSet::union([axis, extra])
    }
}

fn fmt_complex(z: &Complex64) -> String {
    // adding 0.0 turns -0.0 into 0.0
    let z = Complex64::new(z.re + 0.0, z.im + 0.0);
    if z.im >= 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}-{}i", z.re, -z.im)
    }
}

impl fmt::Display for SpectralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralSet::Empty => f.write_str("{}"),
            SpectralSet::ImaginaryAxis => f.write_str("iR"),
            SpectralSet::Finite { points } => {
                let s: Vec<String> = points.iter().map(fmt_complex).collect();
                write!(f, "{{{}}}", s.join(", "))
            }
            SpectralSet::Ladder { offset, step } => write!(f, "{{{} + k({}) : k in Z}}", fmt_complex(offset), fmt_complex(step)),
            SpectralSet::AxisMinus { excluded } => write!(f, "iR \\ {excluded}"),
            SpectralSet::Union { parts } => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                f.write_str(&s.join(" U "))
            }
        }
    }
}

/// Where each part of a [`SpectrumResult`] came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub point: String,
    pub continuous: String,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumResult {
    /// Symbolic point spectrum.
    pub point: SpectralSet,
    /// Points of `point` inside the enumeration window.
    pub point_enumerated: Vec<Complex64>,
    pub residual: SpectralSet,
    pub continuous: SpectralSet,
    /// Enumerated eigenvalues that sit on `iR` and are removed from the continuous part.
    pub excluded_axis_points: Vec<Complex64>,
    pub provenance: Provenance,
    pub window: Option<BranchWindow>,
    pub eigenvalues: Vec<IntervalEigenvalue>,
    #[serde(skip)]
    pub halfline: Option<HalflineSpectrum>,
}

impl SpectrumResult {
    /// Pure point spectrum given by a finite list, e.g. a matrix.
    pub fn finite(points: Vec<Complex64>) -> Self {
        let points = merge_points(points, MERGE_TOL);
        SpectrumResult {
            point: SpectralSet::Finite { points: points.clone() },
            point_enumerated: points,
            residual: SpectralSet::Empty,
            continuous: SpectralSet::Empty,
            excluded_axis_points: Vec::new(),
            provenance: Provenance {
                point: "finite eigenvalue list".into(),
                continuous: "finite dimension".into(),
                residual: "finite dimension".into(),
            },
            window: None,
            eigenvalues: Vec::new(),
            halfline: None,
        }
    }

    pub fn in_point(&self, z: Complex64, tol: f64) -> bool {
        self.point.contains(z, tol)
    }

    pub fn in_continuous(&self, z: Complex64, tol: f64) -> bool {
        self.continuous.contains(z, tol)
    }

    /// Enumerated point spectrum meets the continuous part nowhere.
    pub fn disjoint(&self, tol: f64) -> bool {
        self.point_enumerated.iter().all(|z| !self.continuous.contains(*z, tol))
    }
}

/// Sorted by `(Re, Im)`, with points within `tol` of an earlier one dropped.
pub fn merge_points(mut points: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out: Vec<Complex64> = Vec::with_capacity(points.len());
    for z in points {
        if !out.iter().rev().take_while(|w| z.re - w.re <= tol).any(|w| (w - z).norm() <= tol) {
            out.push(z);
        }
    }
    out
}

/// `sigma_p(S1 ⊕ S2) = sigma_p(S1) ∪ sigma_p(S2)` on the enumerated points.
pub fn direct_sum_point(s1: &SpectrumResult, s2: &SpectrumResult) -> Vec<Complex64> {
    merge_points(s1.point_enumerated.iter().chain(&s2.point_enumerated).copied().collect(), MERGE_TOL)
}

/// One ladder per monodromy eigenvalue, duplicates merged.
fn point_ladders(ext: &NormalExtension, branch: ArgBranch) -> Result<Vec<SpectralSet>> {
    let p = ext.problem();
    let spec = monodromy_spectrum(p, &ext.params().w2, branch)?;
    let step = branch_shift(p);
    let mut ladders: Vec<SpectralSet> = Vec::new();
    for mode in &spec.modes {
        let offset = branch_value(p, mode.log_mu, 0);
        if !ladders.iter().any(|l| l.contains(offset, MERGE_TOL)) {
            ladders.push(SpectralSet::Ladder { offset, step });
        }
    }
    Ok(ladders)
}

/// Spectrum of the full extension, with eigenvalues enumerated over `window`.
pub fn full_spectrum(ext: &NormalExtension, window: BranchWindow, branch: ArgBranch) -> Result<SpectrumResult> {
    full_spectrum_sampled(ext, window, branch, &[])
}

/// As [`full_spectrum`], also checking the half-line point spectrum at `samples`.
pub fn full_spectrum_sampled(ext: &NormalExtension, window: BranchWindow, branch: ArgBranch, samples: &[Complex64]) -> Result<SpectrumResult> {
    let halfline = full_halfline_spectrum(ext, samples)?;
    let p = ext.problem();
    let eigenvalues = interval_eigenvalues(p, &ext.params().w2, window, branch)?;
    let ladders = point_ladders(ext, branch)?;
    let on_axis: Vec<SpectralSet> = ladders
        .iter()
        .filter(|l| matches!(l, SpectralSet::Ladder { offset, .. } if offset.re.abs() <= MERGE_TOL))
        .cloned()
        .collect();
    let point_enumerated = merge_points(eigenvalues.iter().map(|e| e.lambda).collect(), MERGE_TOL);
    let excluded_axis_points = point_enumerated.iter().copied().filter(|z| z.re.abs() <= MERGE_TOL).collect();
    // sigma_c of the interval part is empty in finite dimension
    let continuous = SpectralSet::union(on_axis).axis_complement(SpectralSet::Empty);
    Ok(SpectrumResult {
        point: SpectralSet::union(ladders),
        point_enumerated,
        residual: SpectralSet::Empty,
        continuous,
        excluded_axis_points,
        provenance: Provenance {
            point: "interval part: branches of e^{-lambda (b2 - a2)} = mu".into(),
            continuous: "half-line part iR minus interval eigenvalues".into(),
            residual: "normal operator".into(),
        },
        window: Some(window),
        eigenvalues,
        halfline: Some(halfline),
    })
}
