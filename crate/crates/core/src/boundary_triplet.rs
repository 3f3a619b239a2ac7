//! Boundary triplets for `-i d/dt` on the half-line pair and on the interval.
//!
//! Test functions are finite exponential sums `u(t) = sum e^{c (t - anchor)} h`,
//! so every L2 pairing is an exact closed-form expression and the Green
//! identity can be checked without quadrature error.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{inner, random, CVector, I};
use crate::operator_model::HermitianOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalTag {
    /// `(-inf, a1)`, anchored at `a1`.
    Left,
    /// `(a2, b2)`, anchored at `a2`.
    Middle,
    /// `(a3, +inf)`, anchored at `a3`.
    Right,
}

impl IntervalTag {
    fn name(self) -> &'static str {
        match self {
            IntervalTag::Left => "left",
            IntervalTag::Middle => "middle",
            IntervalTag::Right => "right",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpTerm {
    pub rate: Complex64,
    pub coeff: CVector,
}

#[derive(Clone, Debug)]
pub struct TestFunction {
    tag: IntervalTag,
    anchor: f64,
    /// Right end of the middle interval; `None` on the half-lines.
    end: Option<f64>,
    dim: usize,
    terms: Vec<ExpTerm>,
}

impl TestFunction {
    pub fn left(a1: f64, dim: usize, terms: Vec<ExpTerm>) -> Result<Self> {
        Self::build(IntervalTag::Left, a1, None, dim, terms)
    }

    pub fn right(a3: f64, dim: usize, terms: Vec<ExpTerm>) -> Result<Self> {
        Self::build(IntervalTag::Right, a3, None, dim, terms)
    }

    pub fn middle(a2: f64, b2: f64, dim: usize, terms: Vec<ExpTerm>) -> Result<Self> {
        if !(a2 < b2) {
            return Err(Error::InvalidTestFunction(format!("empty interval ({a2}, {b2})")));
        }
        Self::build(IntervalTag::Middle, a2, Some(b2), dim, terms)
    }

    /// Constant `h` on `(a2, b2)`.
    pub fn constant(a2: f64, b2: f64, h: CVector) -> Result<Self> {
        let dim = h.len();
        Self::middle(a2, b2, dim, vec![ExpTerm { rate: Complex64::new(0.0, 0.0), coeff: h }])
    }

    fn build(tag: IntervalTag, anchor: f64, end: Option<f64>, dim: usize, terms: Vec<ExpTerm>) -> Result<Self> {
        for t in &terms {
            if t.coeff.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: t.coeff.len() });
            }
            let ok = match tag {
                IntervalTag::Left => t.rate.re > 0.0,
                IntervalTag::Right => t.rate.re < 0.0,
                IntervalTag::Middle => t.rate.is_finite(),
            };
            if !ok {
                return Err(Error::InvalidTestFunction(format!("rate {} is not square-integrable on the {} interval", t.rate, tag.name())));
            }
        }
        Ok(TestFunction { tag, anchor, end, dim, terms })
    }

    pub fn tag(&self) -> IntervalTag {
        self.tag
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn end(&self) -> Option<f64> {
        self.end
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn eval(&self, t: f64) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for term in &self.terms {
            let w = (term.rate * (t - self.anchor)).exp();
            out.scaled_add(w, &term.coeff);
        }
        out
    }

    /// Value at the anchor: `sum h`.
    pub fn boundary_value(&self) -> CVector {
        self.terms.iter().fold(CVector::zeros(self.dim), |acc, t| acc + &t.coeff)
    }

    /// Value at `b2` for a middle function: `sum e^{c (b2 - a2)} h`.
    pub fn end_value(&self) -> Result<CVector> {
        let end = self.end.ok_or(Error::TagMismatch { expected: "middle", found: self.tag.name() })?;
        Ok(self.eval(end))
    }

    pub fn derivative(&self) -> TestFunction {
        self.map_terms(|t| ExpTerm { rate: t.rate, coeff: t.coeff.mapv(|z| z * t.rate) })
    }

    /// Pointwise `A u(t)`.
    pub fn apply(&self, a: &HermitianOperator) -> TestFunction {
        self.map_terms(|t| ExpTerm { rate: t.rate, coeff: a.apply(&t.coeff) })
    }

    pub fn scale(&self, s: Complex64) -> TestFunction {
        self.map_terms(|t| ExpTerm { rate: t.rate, coeff: t.coeff.mapv(|z| z * s) })
    }

    /// `-i u'`, the action of the maximal operator of `-i d/dt`.
    pub fn m0_star(&self) -> TestFunction {
        self.derivative().scale(-I)
    }

    fn map_terms<F: Fn(&ExpTerm) -> ExpTerm>(&self, f: F) -> TestFunction {
        TestFunction { terms: self.terms.iter().map(f).collect(), ..self.clone() }
    }

    /// Exact L2 inner product `(u, v)` over the function's interval.
    pub fn pairing(&self, other: &TestFunction) -> Result<Complex64> {
        if self.tag != other.tag {
            return Err(Error::TagMismatch { expected: self.tag.name(), found: other.tag.name() });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut total = Complex64::new(0.0, 0.0);
        for tu in &self.terms {
            for tv in &other.terms {
                let z = tu.rate + tv.rate.conj();
                let integral = match self.tag {
                    IntervalTag::Left if z.re > 0.0 => 1.0 / z,
                    IntervalTag::Right if z.re < 0.0 => -1.0 / z,
                    IntervalTag::Middle => {
                        let tau = self.end.unwrap_or(self.anchor) - self.anchor;
                        phi1(z * tau) * tau
                    }
                    _ => return Err(Error::NotIntegrable { rate: z }),
                };
                total += inner(&tu.coeff, &tv.coeff) * integral;
            }
        }
        Ok(total)
    }

    pub fn l2_norm_sq(&self) -> Result<f64> {
        Ok(self.pairing(self)?.re)
    }

    /// Zero boundary data, the role of minimal-domain elements.
    pub fn vanishes_at_boundary(&self, tol: f64) -> bool {
        let at_anchor = crate::linalg::norm(&self.boundary_value()) <= tol;
        match self.end {
            Some(end) => at_anchor && crate::linalg::norm(&self.eval(end)) <= tol,
            None => at_anchor,
        }
    }
}

/// `(e^z - 1) / z`, accurate near 0.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    expm1(z) / z
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let s = (0.5 * y).sin();
    Complex64::new(x.exp_m1() * y.cos() - 2.0 * s * s, x.exp() * y.sin())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPair {
    pub gamma1: CVector,
    pub gamma2: CVector,
}

fn combine(plus_end: &CVector, minus_end: &CVector) -> BoundaryPair {
    let gamma1 = (plus_end + minus_end).mapv(|z| z / (I * SQRT_2));
    let gamma2 = (plus_end - minus_end).mapv(|z| z / SQRT_2);
    BoundaryPair { gamma1, gamma2 }
}

fn expect_tag(u: &TestFunction, tag: IntervalTag) -> Result<()> {
    if u.tag != tag {
        return Err(Error::TagMismatch { expected: tag.name(), found: u.tag.name() });
    }
    Ok(())
}

/// `Y1 u = (u3(a3) + u1(a1)) / (i sqrt2)`, `Y2 u = (u3(a3) - u1(a1)) / sqrt2`.
pub fn boundary_maps_halfline(u_left: &TestFunction, u_right: &TestFunction) -> Result<BoundaryPair> {
    expect_tag(u_left, IntervalTag::Left)?;
    expect_tag(u_right, IntervalTag::Right)?;
    if u_left.dim != u_right.dim {
        return Err(Error::DimensionMismatch { expected: u_left.dim, found: u_right.dim });
    }
    Ok(combine(&u_right.boundary_value(), &u_left.boundary_value()))
}

/// `G1 u = (u2(b2) + u2(a2)) / (i sqrt2)`, `G2 u = (u2(b2) - u2(a2)) / sqrt2`.
pub fn boundary_maps_interval(u_mid: &TestFunction) -> Result<BoundaryPair> {
    expect_tag(u_mid, IntervalTag::Middle)?;
    Ok(combine(&u_mid.end_value()?, &u_mid.boundary_value()))
}

/// `(M* u, v) - (u, M* v) - [(Y2 u, Y1 v) - (Y1 u, Y2 v)]` on the half-line pair.
///
/// On `(-inf, a1)` the boundary point is a right endpoint, which flips the
/// orientation of the boundary form relative to the interval case; with the
/// maps `Y1`, `Y2` as defined above the identity closes in this order.
pub fn green_identity_residual(u: (&TestFunction, &TestFunction), v: (&TestFunction, &TestFunction)) -> Result<Complex64> {
    let lhs = skew_form(u.0, v.0)? + skew_form(u.1, v.1)?;
    let bu = boundary_maps_halfline(u.0, u.1)?;
    let bv = boundary_maps_halfline(v.0, v.1)?;
    let rhs = inner(&bu.gamma2, &bv.gamma1) - inner(&bu.gamma1, &bv.gamma2);
    Ok(lhs - rhs)
}

/// `(M* u, v) - (u, M* v) - [(G1 u, G2 v) - (G2 u, G1 v)]` on `(a2, b2)`.
pub fn green_identity_residual_interval(u: &TestFunction, v: &TestFunction) -> Result<Complex64> {
    let lhs = skew_form(u, v)?;
    let bu = boundary_maps_interval(u)?;
    let bv = boundary_maps_interval(v)?;
    let rhs = inner(&bu.gamma1, &bv.gamma2) - inner(&bu.gamma2, &bv.gamma1);
    Ok(lhs - rhs)
}

fn skew_form(u: &TestFunction, v: &TestFunction) -> Result<Complex64> {
    Ok(u.m0_star().pairing(v)? - u.pairing(&v.m0_star())?)
}

/// Unit-rate profiles with `u1(a1) = (i f - g)/sqrt2` and `u3(a3) = (i f + g)/sqrt2`,
/// so that `Y1 u = f` and `Y2 u = g`.
///
/// The right profile decays as `e^{-(t - a3)}`, the square-integrable choice.
pub fn surjectivity_witness(f: &CVector, g: &CVector, a1: f64, a3: f64) -> Result<(TestFunction, TestFunction)> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), found: g.len() });
    }
    let dim = f.len();
    let at_a1 = (f.mapv(|z| I * z) - g).mapv(|z| z / SQRT_2);
    let at_a3 = (f.mapv(|z| I * z) + g).mapv(|z| z / SQRT_2);
    let u1 = TestFunction::left(a1, dim, vec![ExpTerm { rate: Complex64::new(1.0, 0.0), coeff: at_a1 }])?;
    let u3 = TestFunction::right(a3, dim, vec![ExpTerm { rate: Complex64::new(-1.0, 0.0), coeff: at_a3 }])?;
    Ok((u1, u3))
}

/// `(||u'||^2, ||A u||^2)` for a minimal-domain test function; both are finite
/// for every member of the exponential family.
pub fn sobolev_norms(u: &TestFunction, a: &HermitianOperator) -> Result<(f64, f64)> {
    Ok((u.derivative().l2_norm_sq()?, u.apply(a).l2_norm_sq()?))
}

/// Random exponential profiles with `|Re c|` in `[0.1, 5]`, scaled to unit `L2` norm.
pub fn random_test_function<R: Rng + ?Sized>(rng: &mut R, tag: IntervalTag, anchor: f64, end: f64, dim: usize, terms: usize) -> TestFunction {
    let terms = (0..terms)
        .map(|_| {
            let re = rng.random_range(0.1..5.0);
            let im = rng.random_range(-5.0..5.0);
            let rate = match tag {
                IntervalTag::Left => Complex64::new(re, im),
                IntervalTag::Right => Complex64::new(-re, im),
                IntervalTag::Middle => Complex64::new(if rng.random::<bool>() { re } else { -re }, im),
            };
            ExpTerm { rate, coeff: random::vector(rng, dim) }
        })
        .collect();
    let f = TestFunction::build(tag, anchor, (tag == IntervalTag::Middle).then_some(end), dim, terms).expect("random rates respect the half-line signs");
    let n = f.l2_norm_sq().expect("integrable by construction").sqrt();
    if n > 0.0 {
        f.scale(Complex64::new(1.0 / n, 0.0))
    } else {
        f
    }
}
