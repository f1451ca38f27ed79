//! Output statistics of a surrogate: kernel density estimates of the QoI
//! distribution and power-mean aggregation of pointwise criteria.
//!
//! ```bash
//! cargo run --example output_density
//! ```

use amisc::adaptive::{sparse_grid_run, AdaptiveOptions};
use amisc::models::cosine_2d;
use amisc::studio::{kde_density, pn_aggregate, silverman_bandwidth};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let model = cosine_2d();
    let opts = AdaptiveOptions {
        kappa: 0.5,
        w_max: Some(900.0),
        max_level: 6,
        ..Default::default()
    };
    let result = sparse_grid_run(&model, &opts).unwrap();
    let surrogate = &result.surrogate;

    // push uniform samples through the surrogate
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 50_000;
    let samples: Vec<f64> = (0..n)
        .map(|_| {
            let z = [
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            ];
            surrogate.eval(&z).unwrap()[0]
        })
        .collect();

    let h = silverman_bandwidth(&samples).unwrap();
    println!("{n} surrogate samples, Silverman bandwidth {h:.4}");

    // a coarse console sketch of the density on [-1, 1]
    let grid: Vec<f64> = (0..33).map(|i| -1.1 + 2.2 * i as f64 / 32.0).collect();
    let density = kde_density(&samples, &grid).unwrap();
    let peak = density.iter().cloned().fold(0.0, f64::max);
    println!("\nQoI density (the product of two cosines piles mass at the edges):");
    for (x, d) in grid.iter().zip(&density) {
        let bar = "#".repeat((d / peak * 50.0).round() as usize);
        println!("  {x:+.2} | {bar}");
    }

    // trapezoid check: the estimate integrates to about one
    let wide: Vec<f64> = (0..4001).map(|i| -3.0 + 6.0 * i as f64 / 4000.0).collect();
    let wide_density = kde_density(&samples, &wide).unwrap();
    let mut integral = 0.0;
    for i in 1..wide.len() {
        integral += 0.5 * (wide_density[i] + wide_density[i - 1]) * (wide[i] - wide[i - 1]);
    }
    println!("\ndensity integral: {integral:.4}");

    // power-mean aggregation of pointwise criteria approaches the maximum
    let criteria: Vec<f64> = samples.iter().map(|v| v.abs()).collect();
    println!(
        "\npower-mean aggregation of |QoI| (maximum is {:.4}):",
        criteria.iter().cloned().fold(0.0, f64::max)
    );
    for p in [1.0, 2.0, 10.0, 50.0] {
        println!("  p = {p:3}: {:.4}", pn_aggregate(&criteria, p).unwrap());
    }
}
