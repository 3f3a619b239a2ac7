//! Abstract Green identity for the boundary maps and the round trip of the
//! boundary data through explicit preimages.

use mpnormal::boundary_triplet::{boundary_maps_halfline, green_identity_residual, random_test_function, surjectivity_witness, IntervalTag};
use mpnormal::linalg::{norm, random};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mpnormal::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (a1, a3, d) = (-1.0, 1.0, 3);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let u1 = random_test_function(&mut rng, IntervalTag::Left, a1, 0.0, d, 3);
        let u3 = random_test_function(&mut rng, IntervalTag::Right, a3, 0.0, d, 3);
        let v1 = random_test_function(&mut rng, IntervalTag::Left, a1, 0.0, d, 3);
        let v3 = random_test_function(&mut rng, IntervalTag::Right, a3, 0.0, d, 3);
        worst = worst.max(green_identity_residual((&u1, &u3), (&v1, &v3))?.norm());
    }
    println!("largest Green identity residual over 20 pairs: {worst:.2e}");

    let (f, g) = (random::vector(&mut rng, d), random::vector(&mut rng, d));
    let (w1, w3) = surjectivity_witness(&f, &g, a1, a3)?;
    let y = boundary_maps_halfline(&w1, &w3)?;
    println!("boundary data round trip: {:.2e}, {:.2e}", norm(&(y.gamma1 - &f)), norm(&(y.gamma2 - &g)));
    Ok(())
}
