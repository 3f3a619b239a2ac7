//! Eigenvalues of the interval part for a scalar phase condition, with the
//! eigenfunction boundary residual of each.

use mpnormal::config::preset;
use mpnormal::interval_spectrum::{eigenfunction_bc_residual, interval_eigenvalues, ArgBranch, BranchWindow};

fn main() -> mpnormal::Result<()> {
    let (p, e) = preset("scalar-phase")?.build()?;
    let evs = interval_eigenvalues(&p, &e.w2, BranchWindow::Range { n_min: -3, n_max: 3 }, ArgBranch::ZeroToTwoPi)?;
    println!("{:>4} {:>22} {:>22} {:>10}", "n", "Re", "Im", "bc resid");
    for ev in &evs {
        let bc = eigenfunction_bc_residual(&p, &e.w2, ev)?;
        println!("{:>4} {:>22.15} {:>22.15} {:>10.2e}", ev.branch_n, ev.lambda.re, ev.lambda.im, bc);
    }
    Ok(())
}
