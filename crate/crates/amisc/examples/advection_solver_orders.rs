//! Discretization convergence of the built-in advection-diffusion model:
//! second order in each mesh direction, first order in the time step.
//!
//! ```bash
//! cargo run --example advection_solver_orders
//! ```

use amisc::models::{
    advection_cost, advection_diffusion_ensemble, kle_diffusivity, AdvectionDiffusionConfig,
    ModelEnsemble,
};

fn main() {
    let cfg = AdvectionDiffusionConfig::desk();
    let model = advection_diffusion_ensemble(cfg.clone()).unwrap();
    println!(
        "desk-scale ensemble: {} random inputs, levels 0..={} per discretization dimension",
        cfg.n_kle, cfg.max_level
    );
    println!(
        "diffusivity at the domain center for z = 0: {:.5} (0.5 + e)",
        kle_diffusivity([0.5, 0.5], &[0.0; 4], &cfg)
    );

    println!("\nraw cost model per solve (finest normalized to 1):");
    for alpha in [[0u32, 0, 0], [1, 0, 0], [2, 2, 2], [4, 4, 4]] {
        println!(
            "  alpha {alpha:?}: raw {}, normalized {:.6}",
            advection_cost(&alpha),
            model.cost(&alpha)
        );
    }

    let z = vec![0.0; 4];
    let labels = ["x1 mesh", "x2 mesh", "time step"];
    let expected = [2.0, 2.0, 1.0];
    println!("\nobserved orders from successive refinements (others at level 4):");
    for dim in 0..3 {
        let qs: Vec<f64> = (1..=4u32)
            .map(|level| {
                let mut alpha = [4u32, 4, 4];
                alpha[dim] = level;
                model.evaluate(&alpha, &z).unwrap()[0]
            })
            .collect();
        let diffs: Vec<f64> = qs.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let orders: Vec<String> = diffs
            .windows(2)
            .map(|w| format!("{:.3}", (w[0] / w[1]).log2()))
            .collect();
        println!(
            "  {:9} (expected {:.1}): {}",
            labels[dim],
            expected[dim],
            orders.join(", ")
        );
    }
    println!(
        "\nQoI at the finest desk level: {:.8e}",
        model.evaluate(&[4, 4, 4], &z).unwrap()[0]
    );
}
