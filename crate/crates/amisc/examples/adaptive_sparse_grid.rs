//! Dimension-adaptive sparse-grid interpolation of a single model: the greedy
//! loop ranks candidate index refinements by error reduction per unit work.
//!
//! ```bash
//! cargo run --example adaptive_sparse_grid
//! ```

use amisc::adaptive::{AdaptiveOptions, SparseGridDriver};
use amisc::models::{cosine_2d, Cosine2d};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let model = cosine_2d();
    let opts = AdaptiveOptions {
        kappa: 0.5,
        w_max: Some(1200.0),
        max_level: 6,
        ..Default::default()
    };

    // validation points for an error readout along the run
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let validation: Vec<[f64; 2]> = (0..500)
        .map(|_| {
            [
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            ]
        })
        .collect();

    let mut driver = SparseGridDriver::new(&model, opts).unwrap();
    println!("step  index   gamma      work   linf-error");
    let mut next_work = 0.0f64;
    driver
        .run_with_observer(&mut |row, surrogate| {
            if row.work >= next_work {
                let mut err = 0.0f64;
                for z in &validation {
                    let v = surrogate.eval(z).unwrap()[0];
                    err = err.max((v - Cosine2d::value(z)).abs());
                }
                println!(
                    "{:4}  ({})  {:9.2e}  {:6}  {err:9.2e}",
                    row.step,
                    row.index.to_delimited(','),
                    row.gamma,
                    row.work
                );
                next_work = row.work * 1.5;
            }
        })
        .unwrap();

    let surrogate = driver.surrogate();
    println!(
        "\naccepted {} indices, {} model evaluations",
        surrogate.accepted().len(),
        surrogate.work_total()
    );
    println!(
        "surrogate mean {:+.3e}, variance {:.6} (exact: 0 and 1/4)",
        surrogate.mean()[0],
        surrogate.variance()[0]
    );
}
