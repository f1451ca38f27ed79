//! Tensor-product interpolants: grids, evaluation, and means.
//!
//! ```bash
//! cargo run --example tensor_interpolation
//! ```

use amisc::index::MultiIndex;
use amisc::models::Cosine2d;
use amisc::tensor::{tensor_points, TensorComponent};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    // grid sizes are the product of the per-dimension node counts
    for beta in [vec![0, 0], vec![1, 1], vec![2, 2], vec![3, 1]] {
        let pts = tensor_points(&MultiIndex::new(beta.clone()));
        println!("beta {beta:?}: {} grid points", pts.len());
    }

    // interpolate the two-variable cosine on a 17x17 grid
    let mut comp = TensorComponent::new(&[], MultiIndex::new(vec![4, 4]), 1);
    comp.populate(|z| Ok(vec![Cosine2d::value(z)])).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let z = [
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        ];
        let v = comp.eval(&z).unwrap()[0];
        worst = worst.max((v - Cosine2d::value(&z)).abs());
    }
    println!("\ncos(2 pi z1) cos(pi z2) at beta = (4,4):");
    println!("  max interpolation error over 500 random points: {worst:.2e}");

    // the mean comes from the tensorized quadrature weights; cross-check it
    // against plain Monte Carlo on the interpolant
    let mean = comp.mean().unwrap()[0];
    let n = 200_000;
    let mut sum = 0.0;
    for _ in 0..n {
        let z = [
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        ];
        sum += comp.eval(&z).unwrap()[0];
    }
    println!(
        "  quadrature mean {mean:+.3e}, Monte Carlo mean {:+.3e} ({n} samples)",
        sum / n as f64
    );
    println!("  exact mean is 0 (both factors integrate to zero)");
}
