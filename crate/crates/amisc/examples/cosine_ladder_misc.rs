//! Multi-index collocation on an algebraic fidelity ladder: cheap shifted
//! cosines stand in for coarse discretizations of an expensive model, and the
//! combined surrogate beats every tensor interpolant it is built from.
//!
//! ```bash
//! cargo run --example cosine_ladder_misc
//! ```

use amisc::adaptive::{amisc_run, AdaptiveOptions};
use amisc::models::{cosine_ladder, CosineLadder};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    // shifts 1/5, 1/10, 1/20 at costs 1, 2, 4
    let ladder = cosine_ladder(&[0.2, 0.1, 0.05]).unwrap();
    let opts = AdaptiveOptions {
        kappa: 0.5,
        w_max: Some(25.0),
        max_level: 10,
        ..Default::default()
    };
    let result = amisc_run(&ladder, &opts).unwrap();
    let surrogate = &result.surrogate;

    println!("accepted (model level, stochastic level) pairs:");
    for idx in surrogate.accepted().iter() {
        let c = surrogate.coefficients().get(idx);
        println!("  ({})  coefficient {c:+}", idx.to_delimited(','));
    }

    println!("\nallocation: cheap models receive the most points");
    for entry in surrogate.allocation_profile() {
        println!(
            "  model {:?}: {} points, work fraction {:.3}",
            entry.alpha, entry.points, entry.work_fraction
        );
    }

    // compare against every constituent interpolant on its own
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let zs: Vec<f64> = (0..1000).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let linf = |f: &dyn Fn(f64) -> f64| -> f64 {
        zs.iter()
            .map(|&z| (f(z) - CosineLadder::truth(z)).abs())
            .fold(0.0, f64::max)
    };
    let combined = linf(&|z| surrogate.eval(&[z]).unwrap()[0]);
    println!("\nworst-case error against the limit function:");
    println!("  combined surrogate: {combined:.4e}");
    for idx in surrogate.accepted().iter() {
        let comp = surrogate.component(idx).unwrap();
        let err = linf(&|z| comp.eval(&[z]).unwrap()[0]);
        println!("  constituent ({}): {err:.4e}", idx.to_delimited(','));
    }
}
