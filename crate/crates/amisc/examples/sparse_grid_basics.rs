//! The combination technique: downward-closed index sets, inclusion-exclusion
//! coefficients, and how slowly sparse-grid point counts grow with dimension.
//!
//! ```bash
//! cargo run --example sparse_grid_basics
//! ```

use std::collections::BTreeMap;

use amisc::combi::{combination_coefficients, isotropic_index_set, sparse_eval, sparse_points};
use amisc::models::Cosine2d;
use amisc::tensor::TensorComponent;

fn main() {
    // the level-2 isotropic set in two dimensions and its coefficients
    let set = isotropic_index_set(2, 2);
    let weights = combination_coefficients(&set).unwrap();
    println!("isotropic level-2 set in d=2 (index -> coefficient):");
    for (idx, c) in weights.iter() {
        println!("  ({}) -> {c:+}", idx.to_delimited(','));
    }
    println!("  coefficient sum: {}", weights.sum());

    // sparse counts vs full tensor counts at level 2
    println!("\npoints at level 2, sparse vs full tensor:");
    for d in [2usize, 5, 10, 20, 40] {
        let sparse = sparse_points(&isotropic_index_set(2, d))
            .unwrap()
            .points
            .len();
        let tensor = 5f64.powi(d as i32);
        println!("  d={d:2}: sparse {sparse:5}, tensor {tensor:.1e}");
    }

    // the combined interpolant reproduces the model at every sparse point
    let set = isotropic_index_set(3, 2);
    let weights = combination_coefficients(&set).unwrap();
    let mut components = BTreeMap::new();
    for beta in set.iter() {
        let mut comp = TensorComponent::new(&[], beta.clone(), 1);
        comp.populate(|z| Ok(vec![Cosine2d::value(z)])).unwrap();
        components.insert(beta.clone(), comp);
    }
    let grid = sparse_points(&set).unwrap();
    let mut worst = 0.0f64;
    for p in &grid.points {
        let v = sparse_eval(&weights, &components, p).unwrap()[0];
        worst = worst.max((v - Cosine2d::value(p)).abs());
    }
    println!(
        "\nlevel-3 sparse interpolant of the cosine model: {} unique points, \
         worst on-grid deviation {worst:.2e}",
        grid.points.len()
    );

    // the per-index new-point sets partition the union
    let mut new_counts: Vec<(String, usize)> = grid
        .new_points
        .iter()
        .map(|(beta, own)| (beta.to_delimited(','), own.len()))
        .collect();
    new_counts.sort();
    println!("new points contributed per index:");
    for (beta, count) in new_counts {
        println!("  ({beta}): {count}");
    }
}
