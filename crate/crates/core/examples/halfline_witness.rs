//! Half-line part: no eigenvalues off or on the axis, and a source that has
//! no square-integrable preimage for a point on the axis.

use mpnormal::config::preset;
use mpnormal::halfline_spectrum::{continuous_spectrum, nonsurjectivity_witness, point_spectrum_check, WitnessProfile};
use mpnormal::NormalExtension;
use num_complex::Complex64;

fn main() -> mpnormal::Result<()> {
    let (p, e) = preset("scalar-periodic")?.build()?;
    let ext = NormalExtension::new(p, e)?;
    for z in [Complex64::new(-1.0, 2.0), Complex64::new(0.0, 1.0), Complex64::new(3.0, -4.0)] {
        let v = point_spectrum_check(&ext, z);
        println!("{z:>8}: eigenvalue {}, {}", v.is_eigenvalue, v.reason);
    }
    let cert = continuous_spectrum(&ext)?;
    println!("continuous part {} (real parts shared by sigma(A1), sigma(A3): {:?})", cert.set, cert.intersection);
    for profile in [WitnessProfile::Printed, WitnessProfile::Decaying] {
        let w = nonsurjectivity_witness(&ext, 1.5, &[1.0, 2.0, 4.0, 8.0, 16.0], profile)?;
        println!("{profile:?} profile, truncated norms:");
        for (t, v) in &w.truncated_norms {
            println!("  T = {t:>4}: {v:.6e}");
        }
    }
    Ok(())
}
