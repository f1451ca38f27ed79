//! Multifidelity payoff on the advection-diffusion model: the multi-index
//! driver reaches a target accuracy at a small fraction of the work of an
//! adaptive sparse grid that only queries the finest model.
//!
//! Runs a reduced configuration (levels 0..=3, 200 validation samples) so the
//! whole comparison takes well under a minute; the acceptance suite runs the
//! full desk-scale version.
//!
//! ```bash
//! cargo run --example multiindex_speedup
//! ```

use amisc::adaptive::{AdaptiveOptions, MiscDriver, SparseGridDriver};
use amisc::models::{
    advection_diffusion_ensemble, AdvectionDiffusionConfig, ModelEnsemble, Pinned,
};
use amisc::studio::{relative_linf_error, sample_unit_cube};

fn main() {
    let mut cfg = AdvectionDiffusionConfig::desk();
    cfg.max_level = 3;

    let truth_model = advection_diffusion_ensemble(cfg.clone()).unwrap();
    let validation = sample_unit_cube(23, 200, cfg.n_kle);
    println!(
        "computing {} reference solves at level (3,3,3)...",
        validation.len()
    );
    let truth: Vec<f64> = validation
        .iter()
        .map(|z| truth_model.evaluate(&[3, 3, 3], z).unwrap()[0])
        .collect();

    let error_of = |surrogate: &amisc::adaptive::MiscSurrogate| -> f64 {
        let values: Vec<f64> = validation
            .iter()
            .map(|z| surrogate.eval(z).unwrap()[0])
            .collect();
        relative_linf_error(&truth, &values).unwrap()
    };

    let target = 5e-3;
    let opts = AdaptiveOptions {
        kappa: 1.0,
        w_max: Some(420.0),
        max_level: 10,
        ..Default::default()
    };

    // single fidelity: every sample costs one unit
    let pinned = Pinned::at_top(advection_diffusion_ensemble(cfg.clone()).unwrap());
    let mut driver = SparseGridDriver::new(&pinned, opts.clone()).unwrap();
    let mut single_cross = None;
    driver
        .run_with_observer(&mut |row, s| {
            if single_cross.is_none() && error_of(s) <= target {
                single_cross = Some(row.work);
            }
        })
        .unwrap();
    println!(
        "single fidelity: work {:.2}, final error {:.2e}, reached {target:.0e} at work {single_cross:?}",
        driver.surrogate().work_total(),
        error_of(driver.surrogate())
    );

    // multi-index over the full level lattice
    let model = advection_diffusion_ensemble(cfg).unwrap();
    let opts = AdaptiveOptions {
        w_max: Some(8.0),
        ..opts
    };
    let mut driver = MiscDriver::new(&model, opts).unwrap();
    let mut multi_cross = None;
    driver
        .run_with_observer(&mut |row, s| {
            if multi_cross.is_none() && error_of(s) <= target {
                multi_cross = Some(row.work);
            }
        })
        .unwrap();
    println!(
        "multi-index:     work {:.2}, final error {:.2e}, reached {target:.0e} at work {multi_cross:?}",
        driver.surrogate().work_total(),
        error_of(driver.surrogate())
    );

    if let (Some(wm), Some(ws)) = (multi_cross, single_cross) {
        println!("\nspeedup at matched error: {:.0}x", ws / wm);
    }
    println!("\nwork allocation of the multi-index run (top models get few points):");
    let profile = driver.surrogate().allocation_profile();
    for entry in profile.iter().take(6) {
        println!(
            "  alpha {:?}: {} points, work share {:.4}",
            entry.alpha, entry.points, entry.work_fraction
        );
    }
    if profile.len() > 6 {
        println!("  ... {} more discretizations", profile.len() - 6);
    }
}
