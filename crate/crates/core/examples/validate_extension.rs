//! Builds a problem by hand, validates a few unitary pairs and shows the
//! reasons a pair is rejected.

use mpnormal::extension::validate_extension;
use mpnormal::linalg::{identity, CMatrix};
use mpnormal::{ExtensionParams, HermitianOperator, MultipointProblem, SignConstraint, UnitaryOperator};
use num_complex::Complex64;

fn main() -> mpnormal::Result<()> {
    let p = MultipointProblem::new(
        [-1.0, 0.0, 1.0, 2.0],
        HermitianOperator::from_diagonal(&[0.0, -2.0], SignConstraint::Nonpositive)?,
        HermitianOperator::from_diagonal(&[1.0, 3.0], SignConstraint::Nonnegative)?,
        HermitianOperator::from_diagonal(&[0.0, 5.0], SignConstraint::Nonnegative)?,
    )?;
    let one = Complex64::new(1.0, 0.0);
    let swap = CMatrix::from_shape_vec((2, 2), vec![0.0 * one, one, one, 0.0 * one]).unwrap();
    let candidates = [
        ("W1 = I, W2 = I", identity(2), identity(2)),
        ("W1 = swap, W2 = I", swap.clone(), identity(2)),
        ("W1 = I, W2 = swap", identity(2), swap),
    ];
    for (label, w1, w2) in candidates {
        let e = ExtensionParams::new(UnitaryOperator::new(w1)?, UnitaryOperator::new(w2)?)?;
        let r = validate_extension(&p, &e)?;
        println!("{label}: extension {}, kernels {:?}, kernel residual {:.1e}", r.extension_exists, r.kernel_dims, r.kernel_residual);
        for note in r.notes.iter().skip(1) {
            println!("  note: {note}");
        }
    }
    Ok(())
}
