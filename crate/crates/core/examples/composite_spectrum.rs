//! Full spectrum of the extension: point, continuous and residual parts.

use mpnormal::composite_spectrum::full_spectrum;
use mpnormal::config::preset;
use mpnormal::interval_spectrum::{ArgBranch, BranchWindow};
use mpnormal::NormalExtension;
use num_complex::Complex64;

fn main() -> mpnormal::Result<()> {
    for name in ["scalar-periodic", "scalar-phase", "diag-2x2"] {
        let (p, e) = preset(name)?.build()?;
        let ext = NormalExtension::new(p, e)?;
        let s = full_spectrum(&ext, BranchWindow::Range { n_min: -2, n_max: 2 }, ArgBranch::ZeroToTwoPi)?;
        println!("{name}");
        println!("  point      {}", s.point);
        println!("  continuous {}", s.continuous);
        println!("  residual   {}", s.residual);
        let probe = Complex64::new(0.0, 1.0);
        println!("  i in point: {}, in continuous: {}", s.in_point(probe, 1e-9), s.in_continuous(probe, 1e-9));
    }
    Ok(())
}
