//! Coupled `N x N` system whose point spectrum sits in `Re lambda >= 1`.

use std::f64::consts::PI;

use mpnormal::composite_spectrum::full_spectrum;
use mpnormal::interval_spectrum::{ArgBranch, BranchWindow};
use mpnormal::oracle::build_example35;
use mpnormal::NormalExtension;

fn main() -> mpnormal::Result<()> {
    for n in [2, 4, 8, 16] {
        let (p, e) = build_example35(n, PI / 4.0, PI / 3.0)?;
        let ext = NormalExtension::new(p, e)?;
        let s = full_spectrum(&ext, BranchWindow::Range { n_min: -5, n_max: 5 }, ArgBranch::ZeroToTwoPi)?;
        let mut re: Vec<f64> = s.point_enumerated.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        re.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let shown: Vec<String> = re.iter().take(4).map(|x| format!("{x:.6}")).collect();
        println!("N = {n:>2}: {} eigenvalues, distinct Re: {} ...  continuous {}", s.point_enumerated.len(), shown.join(", "), s.continuous);
    }
    println!("1 + pi^2 = {:.6}", 1.0 + PI * PI);
    Ok(())
}
