//! Univariate Clenshaw-Curtis node families on `[-1, 1]`, barycentric Lagrange
//! basis evaluation, and quadrature weights taken against the uniform
//! probability density.
//!
//! The node family is the nested one: a single midpoint at level 0, then the
//! extrema `cos((j-1)pi/(m-1))` with `m(l) = 2^l + 1` points at level `l >= 1`.
//! Nodes of level `l` are a subset of the nodes of level `l + 1`, which lets
//! sparse grids reuse every model evaluation when an index is refined. Node
//! coordinates are generated symmetrically so that shared nodes agree bitwise
//! across levels.
//!
//! Quadrature weights come from the analytic cosine-series formula for
//! Clenshaw-Curtis integration of the Lagrange basis, scaled to the uniform
//! probability density so they sum to one.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Number of points of the nested Clenshaw-Curtis rule at `level`.
pub fn cc_growth(level: u32) -> usize {
    if level == 0 {
        1
    } else {
        (1usize << level) + 1
    }
}

/// Clenshaw-Curtis nodes at `level`, in extremum order (1 down to -1).
///
/// Level 0 is the single midpoint 0. For `level >= 1` the nodes are
/// `cos(j*pi/n)`, `j = 0..=n` with `n = m - 1`; the first half is mirrored
/// onto the second so the set is exactly symmetric and shared nodes are
/// bitwise identical across levels.
pub fn cc_nodes(level: u32) -> Vec<f64> {
    if level == 0 {
        return vec![0.0];
    }
    let m = cc_growth(level);
    let n = m - 1;
    let mut nodes = vec![0.0; m];
    for j in 0..n / 2 {
        let x = if j == 0 {
            1.0
        } else {
            ((j as f64) * PI / (n as f64)).cos()
        };
        nodes[j] = x;
        nodes[n - j] = -x;
    }
    nodes[n / 2] = 0.0;
    nodes
}

/// Quadrature weights of the level-`level` rule against the uniform
/// probability density on `[-1, 1]`; same ordering as [`cc_nodes`].
pub fn cc_quadrature_weights(level: u32) -> Vec<f64> {
    if level == 0 {
        return vec![1.0];
    }
    let m = cc_growth(level);
    let n = m - 1; // even
    let half = n / 2;
    let mut weights = vec![0.0; m];
    for j in 0..=half {
        let theta = (j as f64) * PI / (n as f64);
        let mut s = 1.0;
        for k in 1..=half {
            let b = if k == half { 1.0 } else { 2.0 };
            s -= b * (2.0 * k as f64 * theta).cos() / ((4 * k * k - 1) as f64);
        }
        let c = if j == 0 || j == n { 1.0 } else { 2.0 };
        // c*s/n integrates dx over [-1,1]; halve for the probability density.
        let w = 0.5 * c * s / (n as f64);
        weights[j] = w;
        weights[n - j] = w;
    }
    weights
}

/// Identity of a nested node: the reduced fraction `num / 2^den_log2` of its
/// cosine angle over pi. Grid points are deduplicated by these ids rather
/// than by floating-point comparison.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NodeId {
    num: u32,
    den_log2: u32,
}

/// Identity of node `j` (0-based) of the level-`level` rule.
pub fn cc_node_id(level: u32, j: usize) -> NodeId {
    if level == 0 {
        // the midpoint, angle pi/2
        return NodeId {
            num: 1,
            den_log2: 1,
        };
    }
    let mut num = j as u32;
    let mut den = level;
    while num != 0 && num.is_multiple_of(2) && den > 0 {
        num /= 2;
        den -= 1;
    }
    if num == 0 {
        NodeId {
            num: 0,
            den_log2: 0,
        }
    } else {
        NodeId { num, den_log2: den }
    }
}

impl NodeId {
    /// Smallest rule level whose node set contains this node.
    pub fn min_level(self) -> u32 {
        if self.num == 1 && self.den_log2 == 1 {
            0 // the midpoint belongs to the level-0 rule
        } else if self.den_log2 == 0 {
            1 // the endpoints +1/-1 first appear at level 1
        } else {
            self.den_log2
        }
    }
}

/// Barycentric weights for a set of pairwise-distinct nodes, normalized so the
/// largest magnitude is one. Computed in log space so rules with up to
/// `2^10 + 1` nodes stay in range.
fn barycentric_weights(nodes: &[f64]) -> Result<Vec<f64>> {
    let m = nodes.len();
    let mut log_mag = vec![0.0f64; m];
    let mut sign = vec![1.0f64; m];
    for j in 0..m {
        let mut lg = 0.0;
        let mut sg = 1.0;
        for k in 0..m {
            if k == j {
                continue;
            }
            let d = nodes[j] - nodes[k];
            if d == 0.0 {
                return Err(Error::InvalidRule(format!(
                    "duplicate nodes at positions {j} and {k}"
                )));
            }
            lg += d.abs().ln();
            if d < 0.0 {
                sg = -sg;
            }
        }
        log_mag[j] = -lg;
        sign[j] = sg;
    }
    let max = log_mag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((0..m).map(|j| sign[j] * (log_mag[j] - max).exp()).collect())
}

/// One univariate interpolation/quadrature rule: nodes, probability-weighted
/// quadrature weights, and precomputed barycentric weights. Immutable after
/// construction and shareable across threads.
#[derive(Debug, Clone)]
pub struct UnivariateRule {
    level: u32,
    nodes: Vec<f64>,
    quad_weights: Vec<f64>,
    bary_weights: Vec<f64>,
}

impl UnivariateRule {
    /// The nested Clenshaw-Curtis rule at `level`.
    pub fn clenshaw_curtis(level: u32) -> Self {
        let nodes = cc_nodes(level);
        let quad_weights = cc_quadrature_weights(level);
        let bary_weights = barycentric_weights(&nodes).expect("CC nodes are distinct");
        UnivariateRule {
            level,
            nodes,
            quad_weights,
            bary_weights,
        }
    }

    /// Shared, lazily-built rule for `level`.
    pub fn cached(level: u32) -> Arc<UnivariateRule> {
        static CACHE: OnceLock<Mutex<BTreeMap<u32, Arc<UnivariateRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
        let mut guard = cache.lock().unwrap();
        guard
            .entry(level)
            .or_insert_with(|| Arc::new(UnivariateRule::clenshaw_curtis(level)))
            .clone()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// All Lagrange basis values `phi_j(x)`, `j = 0..m`, via the barycentric
    /// second form. Exact one-hot at the nodes.
    pub fn basis_all(&self, x: f64) -> Vec<f64> {
        let m = self.nodes.len();
        if m == 1 {
            return vec![1.0];
        }
        if let Some(hit) = self.nodes.iter().position(|&n| n == x) {
            let mut out = vec![0.0; m];
            out[hit] = 1.0;
            return out;
        }
        let mut out = vec![0.0; m];
        let mut denom = 0.0;
        for (j, o) in out.iter_mut().enumerate() {
            let t = self.bary_weights[j] / (x - self.nodes[j]);
            *o = t;
            denom += t;
        }
        for t in &mut out {
            *t /= denom;
        }
        out
    }

    /// Single Lagrange basis value `phi_j(x)`.
    pub fn basis(&self, j: usize, x: f64) -> f64 {
        self.basis_all(x)[j]
    }
}

/// Lagrange basis polynomial `j` (0-based) of arbitrary pairwise-distinct
/// `nodes`, evaluated at `x`.
///
/// Uses the barycentric form internally; duplicate nodes are rejected.
pub fn lagrange_basis_eval(nodes: &[f64], j: usize, x: f64) -> Result<f64> {
    if j >= nodes.len() {
        return Err(Error::Validation(format!(
            "basis index {j} out of range for {} nodes",
            nodes.len()
        )));
    }
    let w = barycentric_weights(nodes)?;
    if let Some(hit) = nodes.iter().position(|&n| n == x) {
        return Ok(if hit == j { 1.0 } else { 0.0 });
    }
    let mut denom = 0.0;
    let mut num = 0.0;
    for k in 0..nodes.len() {
        let t = w[k] / (x - nodes[k]);
        if k == j {
            num = t;
        }
        denom += t;
    }
    Ok(num / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn growth_rule() {
        assert_eq!(cc_growth(0), 1);
        assert_eq!(cc_growth(1), 3);
        assert_eq!(cc_growth(2), 5);
        assert_eq!(cc_growth(10), 1025);
    }

    #[test]
    fn nodes_level_0_and_1() {
        assert_eq!(cc_nodes(0), vec![0.0]);
        assert_eq!(cc_nodes(1), vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn nodes_are_nested_bitwise() {
        for level in 0..=6u32 {
            let coarse = cc_nodes(level);
            let fine = cc_nodes(level + 1);
            for x in &coarse {
                assert!(
                    fine.iter().any(|y| y == x),
                    "node {x} of level {level} missing at level {}",
                    level + 1
                );
            }
        }
    }

    #[test]
    fn node_ids_match_coordinates() {
        // Two (level, j) pairs get the same id exactly when their coordinates agree.
        let mut seen: std::collections::HashMap<NodeId, f64> = std::collections::HashMap::new();
        for level in 0..=6u32 {
            let nodes = cc_nodes(level);
            for (j, &x) in nodes.iter().enumerate() {
                let id = cc_node_id(level, j);
                if let Some(&prev) = seen.get(&id) {
                    assert_eq!(prev, x);
                } else {
                    seen.insert(id, x);
                }
                assert!(id.min_level() <= level);
                // the node must actually be present at its min level
                let lvl = id.min_level();
                assert!(cc_nodes(lvl).contains(&x));
            }
        }
        // distinct coordinates never collide
        let mut by_coord: std::collections::HashMap<u64, NodeId> = std::collections::HashMap::new();
        for (&id, &x) in &seen {
            let bits = x.to_bits();
            if let Some(&other) = by_coord.get(&bits) {
                assert_eq!(other, id);
            }
            by_coord.insert(bits, id);
        }
    }

    #[test]
    fn weights_level_0_and_1() {
        assert_eq!(cc_quadrature_weights(0), vec![1.0]);
        let w = cc_quadrature_weights(1);
        assert!((w[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!((w[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w[2] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_one() {
        for level in 0..=8u32 {
            let s: f64 = cc_quadrature_weights(level).iter().sum();
            assert!((s - 1.0).abs() <= 1e-14, "level {level}: sum {s}");
        }
    }

    #[test]
    fn quadrature_exactness_up_to_degree() {
        // level-l rule integrates x^k against the uniform density for k <= m(l)-1
        for level in 0..=5u32 {
            let nodes = cc_nodes(level);
            let weights = cc_quadrature_weights(level);
            let m = nodes.len();
            for k in 0..m {
                let approx: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .map(|(&x, &w)| w * x.powi(k as i32))
                    .sum();
                let exact = if k % 2 == 0 {
                    1.0 / (k as f64 + 1.0)
                } else {
                    0.0
                };
                assert!(
                    (approx - exact).abs() <= 1e-12,
                    "level {level} monomial {k}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn weights_match_lagrange_integrals() {
        // independent route: integrate each Lagrange basis with a fine Gauss rule
        let (gx, gw) = crate::pce::gauss_legendre(64);
        for level in 1..=4u32 {
            let rule = UnivariateRule::clenshaw_curtis(level);
            for j in 0..rule.node_count() {
                let integral: f64 = gx
                    .iter()
                    .zip(&gw)
                    .map(|(&x, &w)| 0.5 * w * rule.basis(j, x))
                    .sum();
                assert!(
                    (integral - rule.quad_weights()[j]).abs() < 1e-13,
                    "level {level} weight {j}"
                );
            }
        }
    }

    #[test]
    fn lagrange_interpolation_property() {
        let nodes = cc_nodes(3);
        for j in 0..nodes.len() {
            for (k, &x) in nodes.iter().enumerate() {
                let v = lagrange_basis_eval(&nodes, j, x).unwrap();
                assert_eq!(v, if j == k { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn lagrange_partition_of_unity() {
        let nodes = cc_nodes(4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let s: f64 = (0..nodes.len())
                .map(|j| lagrange_basis_eval(&nodes, j, x).unwrap())
                .sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn duplicate_nodes_rejected() {
        let nodes = vec![0.0, 0.5, 0.5];
        assert!(matches!(
            lagrange_basis_eval(&nodes, 0, 0.1),
            Err(Error::InvalidRule(_))
        ));
    }

    #[test]
    fn interpolation_reproduces_data_on_arbitrary_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let m = 2 + (rng.random::<f64>() * 8.0) as usize;
            let mut nodes: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
            nodes.dedup();
            let data: Vec<f64> = (0..nodes.len()).map(|_| rng.random::<f64>()).collect();
            for (k, &x) in nodes.iter().enumerate() {
                let value: f64 = (0..nodes.len())
                    .map(|j| data[j] * lagrange_basis_eval(&nodes, j, x).unwrap())
                    .sum();
                assert!((value - data[k]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn barycentric_stable_at_level_10() {
        // 1025 nodes; interpolate a smooth function and check a few off-node points
        let rule = UnivariateRule::clenshaw_curtis(10);
        let data: Vec<f64> = rule.nodes().iter().map(|&x| (2.0 * x).cos()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let x: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let basis = rule.basis_all(x);
            let value: f64 = basis.iter().zip(&data).map(|(b, d)| b * d).sum();
            assert!((value - (2.0 * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn rules_shareable_across_threads() {
        let rule = UnivariateRule::cached(4);
        std::thread::scope(|s| {
            for t in 0..4 {
                let r = rule.clone();
                s.spawn(move || {
                    let x = -0.3 + 0.1 * t as f64;
                    let b = r.basis_all(x);
                    let sum: f64 = b.iter().sum();
                    assert!((sum - 1.0).abs() < 1e-12);
                });
            }
        });
    }
}
