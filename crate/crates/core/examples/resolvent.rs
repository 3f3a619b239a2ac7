//! Applies the interval resolvent to a constant source and checks the
//! differential equation and the boundary condition at the endpoints.

use mpnormal::boundary_triplet::TestFunction;
use mpnormal::config::preset;
use mpnormal::interval_spectrum::resolvent_apply;
use mpnormal::linalg::norm;
use ndarray::array;
use num_complex::Complex64;

fn main() -> mpnormal::Result<()> {
    let (p, e) = preset("diag-2x2")?.build()?;
    let f2 = TestFunction::constant(p.a2(), p.b2(), array![Complex64::new(1.0, 0.0), Complex64::new(0.0, -2.0)])?;
    for lambda in [Complex64::new(0.5, 0.0), Complex64::new(-1.0, 3.0), Complex64::new(2.0, 12.0)] {
        let u = resolvent_apply(&p, &e.w2, lambda, &f2)?;
        let bc = norm(&(u.eval(p.b2())? - e.w2.apply(&u.eval(p.a2())?)));
        // central difference of u' + A2 u - lambda u - f2 at the midpoint
        let (t, h) = (0.5 * (p.a2() + p.b2()), 1e-5);
        let du = (u.eval(t + h)? - u.eval(t - h)?).mapv(|z| z / (2.0 * h));
        let ut = u.eval(t)?;
        let ode = norm(&(du + p.middle().apply(&ut) - ut.mapv(|z| z * lambda) - f2.eval(t)));
        println!("lambda = {lambda:>8}: bc residual {bc:.2e}, ode residual {ode:.2e}");
    }
    Ok(())
}
