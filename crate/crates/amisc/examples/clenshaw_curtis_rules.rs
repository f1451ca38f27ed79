//! Univariate building blocks: nested Clenshaw-Curtis nodes, probability
//! quadrature weights, and barycentric Lagrange evaluation.
//!
//! ```bash
//! cargo run --example clenshaw_curtis_rules
//! ```

use amisc::rules::{cc_growth, cc_nodes, cc_quadrature_weights, UnivariateRule};

fn main() {
    println!("growth rule m(l): 1 at level 0, then 2^l + 1");
    for level in 0..=5u32 {
        println!("  level {level}: {} nodes", cc_growth(level));
    }

    println!("\nnodes are nested across levels:");
    for level in 0..=3u32 {
        let nodes: Vec<String> = cc_nodes(level).iter().map(|x| format!("{x:+.4}")).collect();
        println!("  level {level}: [{}]", nodes.join(", "));
    }

    println!("\nweights against the uniform density sum to one:");
    for level in 0..=4u32 {
        let w = cc_quadrature_weights(level);
        let sum: f64 = w.iter().sum();
        println!("  level {level}: sum = {sum:.16}");
    }
    let w1 = cc_quadrature_weights(1);
    println!(
        "  level 1 weights: [{:.4}, {:.4}, {:.4}] (1/6, 2/3, 1/6)",
        w1[0], w1[1], w1[2]
    );

    // quadrature exactness: x^k integrates exactly for k < m(l)
    let rule = UnivariateRule::clenshaw_curtis(2);
    println!("\nlevel-2 rule integrating monomials (exact value in parentheses):");
    for k in 0..rule.node_count() {
        let approx: f64 = rule
            .nodes()
            .iter()
            .zip(rule.quad_weights())
            .map(|(&x, &w)| w * x.powi(k as i32))
            .sum();
        let exact = if k % 2 == 0 {
            1.0 / (k as f64 + 1.0)
        } else {
            0.0
        };
        println!("  E[z^{k}] = {approx:+.12} ({exact:+.12})");
    }

    // interpolate a smooth function on 1025 nodes; barycentric evaluation
    // stays stable at high level
    let rule = UnivariateRule::clenshaw_curtis(10);
    let data: Vec<f64> = rule.nodes().iter().map(|&x| (3.0 * x).sin()).collect();
    let mut worst = 0.0f64;
    for i in 0..200 {
        let x = -1.0 + 2.0 * (i as f64 + 0.5) / 200.0;
        let value: f64 = rule
            .basis_all(x)
            .iter()
            .zip(&data)
            .map(|(b, d)| b * d)
            .sum();
        worst = worst.max((value - (3.0 * x).sin()).abs());
    }
    println!(
        "\nsin(3z) interpolated on {} nodes: max error {worst:.2e}",
        rule.node_count()
    );
}
