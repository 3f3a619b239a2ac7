//! Brute-force checks that share no code path with the closed forms:
//! finite-difference eigenvalues of the interval problem, Gauss-Legendre
//! quadrature, a discrete normality probe, and the Galerkin truncation of the
//! heat-type example on `[0, 1]` with Neumann conditions.

use std::f64::consts::PI;

use ndarray::s;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary_triplet::TestFunction;
use crate::error::{Error, Result};
use crate::extension::{ExtensionParams, MultipointProblem};
use crate::interval_spectrum::monodromy;
use crate::linalg::{adjoint, frobenius, general_eigvals, identity, opnorm2, smallest_singular_value, CMatrix, CVector};
use crate::operator_model::{HermitianOperator, SignConstraint, UnitaryOperator};

pub const MIN_GRID: usize = 16;
pub const MAX_UNKNOWNS: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdScheme {
    /// `(u_{j+1} - u_j)/h + A (u_j + u_{j+1})/2 = lambda (u_j + u_{j+1})/2`, second order.
    #[default]
    Box,
    /// `(u_{j+1} - u_j)/h + A u_j = lambda u_j`, first order.
    Upwind,
}

#[derive(Clone, Debug, Serialize)]
pub struct FdEigenResult {
    pub grid_size: usize,
    pub scheme: FdScheme,
    /// Finite eigenvalues sorted by `(Re, Im)`.
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalues at infinity (singular mass matrix); `eigenvalues.len() + infinite = m dim`.
    pub infinite: usize,
    /// `sigma_min(e^{-lambda tau} I - M) / ||M||` per eigenvalue.
    pub residuals: Vec<f64>,
    /// Observed order from the grids `m/4`, `m/2`, `m`.
    pub order_estimate: Option<f64>,
}

impl FdEigenResult {
    pub fn nearest(&self, z: Complex64) -> Option<Complex64> {
        self.eigenvalues.iter().copied().min_by(|a, b| (a - z).norm().total_cmp(&(b - z).norm()))
    }

    /// `|lambda_h - lambda| / max(1, |lambda|)` against the nearest discrete eigenvalue.
    pub fn relative_error(&self, z: Complex64) -> f64 {
        self.nearest(z).map_or(f64::INFINITY, |w| (w - z).norm() / z.norm().max(1.0))
    }
}

fn check_grid(dim: usize, m: usize) -> Result<()> {
    if m < MIN_GRID {
        return Err(Error::GridTooSmall { m, min: MIN_GRID });
    }
    if dim * m > MAX_UNKNOWNS {
        return Err(Error::GridTooLarge { size: dim * m, limit: MAX_UNKNOWNS });
    }
    Ok(())
}

/// Index sets of the coupled components of `A2` and `W2`.
fn components(a: &CMatrix, w: &CMatrix) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && (a[[i, j]].norm() > 0.0 || w[[i, j]].norm() > 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

fn sub(a: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_shape_fn((idx.len(), idx.len()), |(i, j)| a[[idx[i], idx[j]]])
}

/// Pencil `(B, C)` with `B u = lambda C u` on unknowns `u_0 .. u_{m-1}`,
/// `u_m = W u_0` folded into the last row.
pub fn fd_pencil(a: &CMatrix, w: &CMatrix, tau: f64, m: usize, scheme: FdScheme) -> (CMatrix, CMatrix) {
    let d = a.nrows();
    let h = tau / m as f64;
    let n = m * d;
    let id = identity(d);
    let (diag_b, off_b, diag_c, off_c) = match scheme {
        FdScheme::Box => (a.mapv(|z| z * 0.5) - &id.mapv(|z| z / h), a.mapv(|z| z * 0.5) + &id.mapv(|z| z / h), id.mapv(|z| z * 0.5), id.mapv(|z| z * 0.5)),
        FdScheme::Upwind => (a - &id.mapv(|z| z / h), id.mapv(|z| z / h), id.clone(), CMatrix::zeros((d, d))),
    };
    let mut b = CMatrix::zeros((n, n));
    let mut c = CMatrix::zeros((n, n));
    for j in 0..m {
        let r = j * d;
        b.slice_mut(s![r..r + d, r..r + d]).assign(&diag_b);
        c.slice_mut(s![r..r + d, r..r + d]).assign(&diag_c);
        let (col, ob, oc) = if j + 1 < m { ((j + 1) * d, off_b.clone(), off_c.clone()) } else { (0, off_b.dot(w), off_c.dot(w)) };
        let mut bb = b.slice_mut(s![r..r + d, col..col + d]);
        bb += &ob;
        let mut cc = c.slice_mut(s![r..r + d, col..col + d]);
        cc += &oc;
    }
    (b, c)
}

/// Finite eigenvalues of `B u = lambda C u` and the count of infinite ones.
fn pencil_eigenvalues(b: &CMatrix, c: &CMatrix, scheme: FdScheme, shift: f64) -> Result<(Vec<Complex64>, usize)> {
    if scheme == FdScheme::Upwind {
        // C = I
        return Ok((general_eigvals(b)?, 0));
    }
    // (B - sigma C)^{-1} C x = nu x with lambda = sigma + 1/nu
    let shifted = b - &c.mapv(|z| z * shift);
    let k = crate::linalg::inverse(&shifted)?.dot(c);
    let nus = general_eigvals(&k)?;
    let top = nus.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut out = Vec::with_capacity(nus.len());
    let mut infinite = 0;
    for nu in nus {
        if nu.norm() <= 1e-12 * top {
            infinite += 1;
        } else {
            out.push(Complex64::new(shift, 0.0) + 1.0 / nu);
        }
    }
    Ok((out, infinite))
}

fn raw_fd(p: &MultipointProblem, w2: &UnitaryOperator, m: usize, scheme: FdScheme) -> Result<(Vec<Complex64>, usize)> {
    let a = p.middle().entries();
    let w = w2.entries();
    let shift = p.middle().eigenvalues()[0] - 1.0;
    let mut all = Vec::with_capacity(m * p.dim());
    let mut infinite = 0;
    for idx in components(a, w) {
        let (b, c) = fd_pencil(&sub(a, &idx), &sub(w, &idx), p.tau(), m, scheme);
        let (ev, inf) = pencil_eigenvalues(&b, &c, scheme, shift)?;
        all.extend(ev);
        infinite += inf;
    }
    all.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok((all, infinite))
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v[v.len() / 2])
}

fn nearest_in(list: &[Complex64], z: Complex64) -> Complex64 {
    *list.iter().min_by(|a, b| (*a - z).norm().total_cmp(&(*b - z).norm())).unwrap()
}

/// Observed order from three grids, using the finest-grid eigenvalues with
/// `|Im lambda| <= m_coarse / (10 tau)`.
fn richardson(coarse: &[Complex64], mid: &[Complex64], fine: &[Complex64], m_coarse: usize, tau: f64) -> Option<f64> {
    let bound = m_coarse as f64 / (10.0 * tau);
    let mut orders = Vec::new();
    for &z in fine.iter().filter(|z| z.im.abs() <= bound) {
        let zm = nearest_in(mid, z);
        let zc = nearest_in(coarse, zm);
        let (e1, e2) = ((zc - zm).norm(), (zm - z).norm());
        if e2 > 1e-12 * z.norm().max(1.0) && e1 > e2 {
            orders.push((e1 / e2).log2());
        }
    }
    median(orders)
}

/// Finite-difference eigenvalues of `u' + A2 u = lambda u`, `u(b2) = W2 u(a2)`
/// on `m` cells.
pub fn fd_interval_eigenvalues(p: &MultipointProblem, w2: &UnitaryOperator, m: usize, scheme: FdScheme) -> Result<FdEigenResult> {
    crate::linalg::ensure_dim(p.dim(), w2.dim())?;
    check_grid(p.dim(), m)?;
    let (eigenvalues, infinite) = raw_fd(p, w2, m, scheme)?;
    let order_estimate = if m / 4 >= MIN_GRID {
        let coarse = raw_fd(p, w2, m / 4, scheme)?.0;
        let mid = raw_fd(p, w2, m / 2, scheme)?.0;
        richardson(&coarse, &mid, &eigenvalues, m / 4, p.tau())
    } else {
        None
    };
    let mono = monodromy(p, w2)?.matrix;
    let m_norm = opnorm2(&mono)?.max(f64::MIN_POSITIVE);
    let id = identity(p.dim());
    let residuals = eigenvalues
        .iter()
        .map(|&z| {
            let e = -z * p.tau();
            if e.re > 700.0 {
                return Ok(f64::INFINITY);
            }
            Ok(smallest_singular_value(&(id.mapv(|x| x * e.exp()) - &mono))? / m_norm)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(FdEigenResult { grid_size: m, scheme, eigenvalues, infinite, residuals, order_estimate })
}

/// `||L L* - L* L||_F / ||L||_F^2` for the dense upwind matrix.
pub fn normality_probe(p: &MultipointProblem, w2: &UnitaryOperator, m: usize) -> Result<f64> {
    crate::linalg::ensure_dim(p.dim(), w2.dim())?;
    check_grid(p.dim(), m)?;
    let (l, _) = fd_pencil(p.middle().entries(), w2.entries(), p.tau(), m, FdScheme::Upwind);
    let la = adjoint(&l);
    let comm = l.dot(&la) - la.dot(&l);
    Ok(frobenius(&comm) / frobenius(&l).powi(2))
}

/// Cosine-mode truncation of the example with `A1 = d²/dx²`,
/// `A2 = -d²/dx² + 1`, `A3 = -d²/dx²` under Neumann conditions on `[0, 1]`.
pub fn build_example35(n: usize, phi: f64, psi: f64) -> Result<(MultipointProblem, ExtensionParams)> {
    if n == 0 {
        return Err(Error::InvalidProblem("example needs at least one mode".into()));
    }
    let k2: Vec<f64> = (0..n).map(|k| (k as f64 * PI).powi(2)).collect();
    let a1 = HermitianOperator::from_diagonal(&k2.iter().map(|x| -x).collect::<Vec<_>>(), SignConstraint::Nonpositive)?;
    let a2 = HermitianOperator::from_diagonal(&k2.iter().map(|x| x + 1.0).collect::<Vec<_>>(), SignConstraint::Nonnegative)?;
    let a3 = HermitianOperator::from_diagonal(&k2, SignConstraint::Nonnegative)?;
    let p = MultipointProblem::new([-1.0, -0.5, 0.5, 1.0], a1, a2, a3)?;
    let e = ExtensionParams::new(UnitaryOperator::phase(n, phi), UnitaryOperator::phase(n, psi))?;
    Ok((p, e))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

pub const GL_POINTS: usize = 32;

/// Squared `L2` norm of a sampled function with `panels` 32-point panels.
pub fn quadrature_l2_fn<F: Fn(f64) -> CVector>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(GL_POINTS);
    let panels = panels.max(1);
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = lo + (k as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            let v = f(mid + 0.5 * h * xi);
            total += wi * 0.5 * h * v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
    }
    total
}

/// Squared `L2` norm of `f` over `[lo, hi]`, with panels sized to its fastest rate.
pub fn quadrature_l2(f: &TestFunction, lo: f64, hi: f64) -> f64 {
    let rate = f.terms().iter().map(|t| t.rate.norm()).fold(0.0, f64::max);
    let panels = ((hi - lo) * (1.0 + rate) / 4.0).ceil() as usize;
    quadrature_l2_fn(|t| f.eval(t), lo, hi, panels)
}

/// `[W2, A2]` norm next to the discrete commutator, for trend tables.
#[derive(Clone, Debug, Serialize)]
pub struct NormalityTrend {
    pub commutator: f64,
    pub probes: Vec<(usize, f64)>,
}

pub fn normality_trend(p: &MultipointProblem, w2: &UnitaryOperator, grids: &[usize]) -> Result<NormalityTrend> {
    let probes = grids.iter().map(|&m| Ok((m, normality_probe(p, w2, m)?))).collect::<Result<Vec<_>>>()?;
    Ok(NormalityTrend { commutator: crate::linalg::commutator_norm(w2.entries(), p.middle().entries()), probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_triplet::{ExpTerm, IntervalTag};
    use crate::interval_spectrum::{interval_eigenvalues, ArgBranch, BranchWindow};
    use crate::linalg::{random, unit_vector};
    use crate::operator_model::validate_coefficients;
    use crate::SignConstraint::*;
    use rand::SeedableRng;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn problem(a2: &[f64], ends: (f64, f64)) -> MultipointProblem {
        let n = a2.len();
        MultipointProblem::new(
            [ends.0 - 1.0, ends.0, ends.1, ends.1 + 1.0],
            HermitianOperator::zero(n, Nonpositive),
            HermitianOperator::from_diagonal(a2, Nonnegative).unwrap(),
            HermitianOperator::zero(n, Nonnegative),
        )
        .unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(32);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for deg in [2, 10, 40, 62] {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            assert!((q - 2.0 / (deg + 1) as f64).abs() < 1e-14, "deg {deg}");
        }
        let (x, w) = gauss_legendre(5);
        assert_eq!(x.len(), 5);
        assert!(x[2].abs() < 1e-15 && (w[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_examples() {
        let zero = TestFunction::middle(0.0, 1.0, 2, vec![]).unwrap();
        assert_eq!(quadrature_l2(&zero, 0.0, 1.0), 0.0);
        let e = TestFunction::middle(0.0, 1.0, 1, vec![ExpTerm { rate: c(1.0, 0.0), coeff: unit_vector(1, 0) }]).unwrap();
        let want = ((2.0f64).exp() - 1.0) / 2.0;
        assert!((quadrature_l2(&e, 0.0, 1.0) / want - 1.0).abs() < 1e-14);
        assert!((want - 3.19453).abs() < 1e-5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let f = crate::boundary_triplet::random_test_function(&mut rng, IntervalTag::Middle, -0.3, 1.1, 3, 3);
            let exact = f.l2_norm_sq().unwrap();
            assert!((quadrature_l2(&f, -0.3, 1.1) / exact - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn grid_guards() {
        let p = problem(&[0.0], (0.0, 1.0));
        let w = UnitaryOperator::identity(1);
        assert!(matches!(fd_interval_eigenvalues(&p, &w, 8, FdScheme::Box), Err(Error::GridTooSmall { .. })));
        assert!(matches!(fd_interval_eigenvalues(&p, &w, 5000, FdScheme::Box), Err(Error::GridTooLarge { .. })));
    }

    #[test]
    fn periodic_scalar_fd() {
        let p = problem(&[0.0], (0.0, 1.0));
        let r = fd_interval_eigenvalues(&p, &UnitaryOperator::identity(1), 512, FdScheme::Box).unwrap();
        assert_eq!(r.eigenvalues.len() + r.infinite, 512);
        for k in -2..=2 {
            assert!(r.relative_error(c(0.0, TAU * k as f64)) < 5e-3);
        }
        let order = r.order_estimate.unwrap();
        assert!((1.8..2.2).contains(&order), "order {order}");
    }

    #[test]
    fn upwind_is_first_order() {
        let p = problem(&[0.0], (0.0, 1.0));
        let r = fd_interval_eigenvalues(&p, &UnitaryOperator::identity(1), 256, FdScheme::Upwind).unwrap();
        assert_eq!(r.eigenvalues.len(), 256);
        let order = r.order_estimate.unwrap();
        assert!((0.8..1.2).contains(&order), "order {order}");
        assert!(r.relative_error(c(0.0, TAU)) < 5e-2);
    }

    #[test]
    fn refinement_does_not_increase_error() {
        let p = problem(&[2.0], (0.0, 1.0));
        let w = UnitaryOperator::phase(1, 1.0);
        let exact = interval_eigenvalues(&p, &w, BranchWindow::ImBound(20.0), ArgBranch::ZeroToTwoPi).unwrap();
        let mut prev = f64::INFINITY;
        for m in [64, 128, 256] {
            let r = fd_interval_eigenvalues(&p, &w, m, FdScheme::Box).unwrap();
            let err = exact.iter().map(|e| r.relative_error(e.lambda)).fold(0.0, f64::max);
            assert!(err <= prev);
            prev = err;
        }
    }

    #[test]
    fn fd_matches_non_commuting_formula() {
        let p = problem(&[1.0, 3.0], (0.0, 1.0));
        let (s, co) = (0.6f64.sin(), 0.6f64.cos());
        let rot = UnitaryOperator::new(ndarray::array![[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]).unwrap();
        let exact = interval_eigenvalues(&p, &rot, BranchWindow::ImBound(15.0), ArgBranch::ZeroToTwoPi).unwrap();
        let r = fd_interval_eigenvalues(&p, &rot, 512, FdScheme::Box).unwrap();
        for e in &exact {
            assert!(r.relative_error(e.lambda) < 5e-3, "{}", e.lambda);
        }
    }

    #[test]
    fn residual_certificate_separates_good_eigenvalues() {
        let p = problem(&[1.0, 3.0], (0.0, 0.5));
        let r = fd_interval_eigenvalues(&p, &UnitaryOperator::identity(2), 256, FdScheme::Box).unwrap();
        for (z, res) in r.eigenvalues.iter().zip(&r.residuals) {
            if z.im.abs() < 10.0 {
                assert!(*res < 1e-3);
            }
        }
        assert!(r.residuals.iter().any(|&x| x > 1e-2));
    }

    #[test]
    fn components_split_diagonal_problems() {
        let a = crate::linalg::real_diag(&[1.0, 2.0, 3.0]);
        let mut w = identity(3);
        w[[0, 2]] = c(0.1, 0.0);
        let g = components(&a, &w);
        assert_eq!(g, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn normality_probe_trends() {
        let scalar = problem(&[0.0], (0.0, 1.0));
        let s: Vec<f64> = [64, 128, 256].iter().map(|&m| normality_probe(&scalar, &UnitaryOperator::identity(1), m).unwrap()).collect();
        assert!(s.iter().all(|&x| x < 1e-12), "{s:?}");
        let p = problem(&[1.0, 3.0], (0.0, 1.0));
        let commuting: Vec<f64> = [64, 128].iter().map(|&m| normality_probe(&p, &UnitaryOperator::phase(2, 0.4), m).unwrap()).collect();
        assert!(commuting.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let w = UnitaryOperator::new(random::unitary(&mut rng, 2)).unwrap();
        let t = normality_trend(&p, &w, &[64, 128]).unwrap();
        assert!(t.commutator > 0.1);
        assert_eq!(t.probes.len(), 2);
    }

    #[test]
    fn example35_builder() {
        let (p, e) = build_example35(1, 0.3, 0.4).unwrap();
        assert_eq!(p.left().eigenvalues(), &[0.0]);
        assert_eq!(p.middle().eigenvalues(), &[1.0]);
        assert_eq!(p.right().eigenvalues(), &[0.0]);
        assert_eq!(e.dim(), 1);
        let (p, _) = build_example35(4, 0.3, 0.4).unwrap();
        for (k, (got, want)) in p.middle().eigenvalues().iter().zip([1.0, 10.8696, 40.4784, 89.8264]).enumerate() {
            assert!((got - want).abs() < 1e-4);
            assert_eq!(*got, (k as f64 * PI).powi(2) + 1.0);
        }
        let report = validate_coefficients(p.left(), p.middle(), p.right()).unwrap();
        assert!(report.passed);
        assert_eq!(report.kernel_dims, (1, 1));
        assert!(build_example35(0, 0.0, 0.0).is_err());
    }
}
