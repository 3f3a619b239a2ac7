//! Closed-form eigenvalues against a box-scheme discretization on a sequence
//! of grids.

use mpnormal::config::preset;
use mpnormal::interval_spectrum::{interval_eigenvalues, ArgBranch, BranchWindow};
use mpnormal::oracle::{fd_interval_eigenvalues, FdScheme};

fn main() -> mpnormal::Result<()> {
    let (p, e) = preset("diag-2x2")?.build()?;
    let exact = interval_eigenvalues(&p, &e.w2, BranchWindow::ImBound(20.0), ArgBranch::ZeroToTwoPi)?;
    println!("{} eigenvalues with |Im| <= 20", exact.len());
    println!("{:>6} {:>12} {:>8}", "m", "max rel err", "order");
    for m in [64, 128, 256] {
        let fd = fd_interval_eigenvalues(&p, &e.w2, m, FdScheme::Box)?;
        let err = exact.iter().map(|ev| fd.relative_error(ev.lambda)).fold(0.0, f64::max);
        let order = fd.order_estimate.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into());
        println!("{m:>6} {err:>12.3e} {order:>8}");
    }
    Ok(())
}
