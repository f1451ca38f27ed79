//! Tensor-product grids, interpolants, and their means over `d` stochastic
//! dimensions.
//!
//! Grid points are the Cartesian product of per-dimension Clenshaw-Curtis
//! nodes, enumerated in a fixed lexicographic order: dimension 1 varies
//! slowest, the last dimension fastest. Stored model values are row-aligned
//! with that order, which makes the layout testable and results reproducible
//! bit for bit. Quantities of interest are vectors throughout; statistics are
//! componentwise.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::rules::{cc_growth, cc_node_id, NodeId, UnivariateRule};

/// Digit layout of a tensor grid: per-dimension levels and sizes.
#[derive(Debug, Clone)]
pub struct TensorGrid {
    levels: Vec<u32>,
    sizes: Vec<usize>,
    total: usize,
}

impl TensorGrid {
    pub fn new(beta: &MultiIndex) -> Self {
        let levels: Vec<u32> = beta.entries().to_vec();
        let sizes: Vec<usize> = levels.iter().map(|&l| cc_growth(l)).collect();
        let total = sizes.iter().product();
        TensorGrid {
            levels,
            sizes,
            total,
        }
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Per-dimension node indices of flat point `k` (dimension 1 slowest).
    pub fn digits(&self, k: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.sizes.len()];
        let mut rem = k;
        for i in (0..self.sizes.len()).rev() {
            digits[i] = rem % self.sizes[i];
            rem /= self.sizes[i];
        }
        digits
    }

    /// Walk all points in grid order, calling `f(k, digits)`.
    pub fn for_each_point(&self, mut f: impl FnMut(usize, &[usize])) {
        let d = self.sizes.len();
        let mut digits = vec![0usize; d];
        for k in 0..self.total {
            f(k, &digits);
            for i in (0..d).rev() {
                digits[i] += 1;
                if digits[i] < self.sizes[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    /// Nested-node identity of point `digits`.
    pub fn node_ids(&self, digits: &[usize]) -> Vec<NodeId> {
        digits
            .iter()
            .zip(&self.levels)
            .map(|(&j, &l)| cc_node_id(l, j))
            .collect()
    }

    /// Per-dimension minimal levels at which the point first appears; the
    /// points whose signature equals the grid's own level vector are exactly
    /// the points not contained in any smaller grid.
    pub fn min_level_signature(&self, digits: &[usize]) -> Vec<u32> {
        digits
            .iter()
            .zip(&self.levels)
            .map(|(&j, &l)| cc_node_id(l, j).min_level())
            .collect()
    }
}

/// Full Cartesian grid of `cc_nodes(beta_i)`, lexicographic with dimension 1
/// varying slowest; `prod_i cc_growth(beta_i)` points.
pub fn tensor_points(beta: &MultiIndex) -> Vec<Vec<f64>> {
    let grid = TensorGrid::new(beta);
    let rules: Vec<Arc<UnivariateRule>> = beta
        .entries()
        .iter()
        .map(|&l| UnivariateRule::cached(l))
        .collect();
    let mut points = Vec::with_capacity(grid.total());
    grid.for_each_point(|_, digits| {
        points.push(
            digits
                .iter()
                .zip(&rules)
                .map(|(&j, r)| r.nodes()[j])
                .collect(),
        );
    });
    points
}

/// One tensor-product interpolant: a discretization index `alpha` (possibly
/// empty), stochastic levels `beta`, the grid, and the model values at the
/// grid points. Values row `k` corresponds to grid point `k`.
#[derive(Debug, Clone)]
pub struct TensorComponent {
    alpha: Vec<u32>,
    beta: MultiIndex,
    grid: TensorGrid,
    rules: Vec<Arc<UnivariateRule>>,
    n_qoi: usize,
    values: Option<Vec<f64>>, // row-major (point, qoi)
}

impl TensorComponent {
    pub fn new(alpha: &[u32], beta: MultiIndex, n_qoi: usize) -> Self {
        assert!(n_qoi >= 1);
        let grid = TensorGrid::new(&beta);
        let rules = beta
            .entries()
            .iter()
            .map(|&l| UnivariateRule::cached(l))
            .collect();
        TensorComponent {
            alpha: alpha.to_vec(),
            beta,
            grid,
            rules,
            n_qoi,
            values: None,
        }
    }

    /// Populate by evaluating `f` at every grid point, in grid order.
    pub fn populate(&mut self, mut f: impl FnMut(&[f64]) -> Result<Vec<f64>>) -> Result<()> {
        let mut values = Vec::with_capacity(self.grid.total() * self.n_qoi);
        let mut point = vec![0.0; self.grid.dim()];
        let mut err = None;
        self.grid.for_each_point(|_, digits| {
            if err.is_some() {
                return;
            }
            for (i, &j) in digits.iter().enumerate() {
                point[i] = self.rules[i].nodes()[j];
            }
            match f(&point) {
                Ok(v) => {
                    debug_assert_eq!(v.len(), self.n_qoi);
                    values.extend_from_slice(&v);
                }
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        self.values = Some(values);
        Ok(())
    }

    /// Install values directly; must be `total * n_qoi` long, grid order.
    pub fn set_values(&mut self, values: Vec<f64>) -> Result<()> {
        if values.len() != self.grid.total() * self.n_qoi {
            return Err(Error::Validation(format!(
                "expected {} values, got {}",
                self.grid.total() * self.n_qoi,
                values.len()
            )));
        }
        self.values = Some(values);
        Ok(())
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn beta(&self) -> &MultiIndex {
        &self.beta
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn rules(&self) -> &[Arc<UnivariateRule>] {
        &self.rules
    }

    pub fn n_qoi(&self) -> usize {
        self.n_qoi
    }

    pub fn is_populated(&self) -> bool {
        self.values.is_some()
    }

    pub fn values(&self) -> Result<&[f64]> {
        self.values
            .as_deref()
            .ok_or_else(|| Error::NotReady(format!("component beta={:?} has no values", self.beta)))
    }

    /// Coordinates of grid point `k`.
    pub fn point(&self, k: usize) -> Vec<f64> {
        self.grid
            .digits(k)
            .iter()
            .zip(&self.rules)
            .map(|(&j, r)| r.nodes()[j])
            .collect()
    }

    /// Interpolant value at `z`; exact at the grid points.
    pub fn eval(&self, z: &[f64]) -> Result<Vec<f64>> {
        let values = self.values()?;
        debug_assert_eq!(z.len(), self.grid.dim());
        let basis: Vec<Vec<f64>> = self
            .rules
            .iter()
            .zip(z)
            .map(|(r, &zi)| r.basis_all(zi))
            .collect();
        let n_q = self.n_qoi;
        let mut out = vec![0.0; n_q];
        self.grid.for_each_point(|k, digits| {
            let mut w = 1.0;
            for (i, &j) in digits.iter().enumerate() {
                w *= basis[i][j];
            }
            if w != 0.0 {
                let row = &values[k * n_q..(k + 1) * n_q];
                for (o, &v) in out.iter_mut().zip(row) {
                    *o += w * v;
                }
            }
        });
        Ok(out)
    }

    /// Mean of the interpolant under the uniform product density: the values
    /// weighted by the tensorized quadrature weights.
    pub fn mean(&self) -> Result<Vec<f64>> {
        let values = self.values()?;
        let n_q = self.n_qoi;
        let mut out = vec![0.0; n_q];
        self.grid.for_each_point(|k, digits| {
            let mut w = 1.0;
            for (i, &j) in digits.iter().enumerate() {
                w *= self.rules[i].quad_weights()[j];
            }
            let row = &values[k * n_q..(k + 1) * n_q];
            for (o, &v) in out.iter_mut().zip(row) {
                *o += w * v;
            }
        });
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn populate_with(alpha: &[u32], beta: Vec<u32>, f: impl Fn(&[f64]) -> f64) -> TensorComponent {
        let mut comp = TensorComponent::new(alpha, MultiIndex::new(beta), 1);
        comp.populate(|z| Ok(vec![f(z)])).unwrap();
        comp
    }

    #[test]
    fn point_counts() {
        assert_eq!(tensor_points(&MultiIndex::new(vec![0, 0])).len(), 1);
        assert_eq!(tensor_points(&MultiIndex::new(vec![1, 1])).len(), 9);
        assert_eq!(tensor_points(&MultiIndex::new(vec![2, 2])).len(), 25);
    }

    #[test]
    fn zero_grid_is_the_midpoint() {
        let pts = tensor_points(&MultiIndex::new(vec![0, 0]));
        assert_eq!(pts, vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn level_one_grid_is_the_cross_product() {
        let pts = tensor_points(&MultiIndex::new(vec![1, 1]));
        // dimension 1 slowest: first three points share z1 = 1
        assert_eq!(pts[0], vec![1.0, 1.0]);
        assert_eq!(pts[1], vec![1.0, 0.0]);
        assert_eq!(pts[2], vec![1.0, -1.0]);
        assert_eq!(pts[3], vec![0.0, 1.0]);
        assert_eq!(pts[8], vec![-1.0, -1.0]);
        for p in &pts {
            for c in p {
                assert!([-1.0, 0.0, 1.0].contains(c));
            }
        }
    }

    #[test]
    fn eval_constant_and_linear() {
        let comp = populate_with(&[], vec![1, 0], |_| 3.5);
        assert!((comp.eval(&[0.37, -0.8]).unwrap()[0] - 3.5).abs() < 1e-14);

        let comp = populate_with(&[], vec![1, 0], |z| z[0]);
        assert!((comp.eval(&[0.5, 0.0]).unwrap()[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn eval_not_ready() {
        let comp = TensorComponent::new(&[], MultiIndex::new(vec![1]), 1);
        assert!(matches!(comp.eval(&[0.0]), Err(Error::NotReady(_))));
    }

    #[test]
    fn eval_exact_at_grid_points() {
        let f = |z: &[f64]| {
            (2.0 * std::f64::consts::PI * z[0]).cos() * (std::f64::consts::PI * z[1]).cos()
        };
        let comp = populate_with(&[], vec![2, 2], f);
        let values = comp.values().unwrap().to_vec();
        for (k, &expected) in values.iter().enumerate() {
            let z = comp.point(k);
            let v = comp.eval(&z).unwrap()[0];
            assert!((v - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn eval_matches_direct_double_sum() {
        // independent oracle: the naive Lagrange double sum with explicit products
        let f = |z: &[f64]| {
            (2.0 * std::f64::consts::PI * z[0]).cos() * (std::f64::consts::PI * z[1]).cos()
        };
        let comp = populate_with(&[], vec![2, 2], f);
        let n1 = crate::rules::cc_nodes(2);
        let n2 = crate::rules::cc_nodes(2);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let z = [
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            ];
            let mut direct = 0.0;
            for (j1, &x1) in n1.iter().enumerate() {
                for (j2, &x2) in n2.iter().enumerate() {
                    let b1 = crate::rules::lagrange_basis_eval(&n1, j1, z[0]).unwrap();
                    let b2 = crate::rules::lagrange_basis_eval(&n2, j2, z[1]).unwrap();
                    direct += f(&[x1, x2]) * b1 * b2;
                }
            }
            let v = comp.eval(&z).unwrap()[0];
            assert!(
                (v - direct).abs() < 1e-11,
                "tensor eval {v} vs direct sum {direct}"
            );
        }
    }

    #[test]
    fn polynomial_exactness() {
        // per-dimension degree <= m(beta_i) - 1 is reproduced exactly
        let poly =
            |z: &[f64]| 1.0 + 2.0 * z[0] - z[0] * z[0] + 0.5 * z[1] + 3.0 * z[0] * z[0] * z[1];
        let comp = populate_with(&[], vec![1, 1], poly); // degrees (2, 2) allowed... (m=3)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let z = [
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            ];
            let v = comp.eval(&z).unwrap()[0];
            assert!((v - poly(&z)).abs() <= 1e-10);
        }
    }

    #[test]
    fn mean_examples() {
        let comp = populate_with(&[], vec![1, 1], |_| 2.5);
        assert!((comp.mean().unwrap()[0] - 2.5).abs() < 1e-14);

        let comp = populate_with(&[], vec![1, 2], |z| z[0]);
        assert!(comp.mean().unwrap()[0].abs() < 1e-14);

        let comp = populate_with(&[], vec![1, 0], |z| z[0] * z[0]);
        assert!((comp.mean().unwrap()[0] - 1.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn mean_agrees_with_monte_carlo() {
        let f = |z: &[f64]| {
            (2.0 * std::f64::consts::PI * z[0]).cos() * (std::f64::consts::PI * z[1]).cos()
        };
        let comp = populate_with(&[], vec![3, 3], f);
        let mean = comp.mean().unwrap()[0];

        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 100_000usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let z = [
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            ];
            let v = comp.eval(&z).unwrap()[0];
            sum += v;
            sumsq += v * v;
        }
        let mc = sum / n as f64;
        let var = (sumsq / n as f64 - mc * mc).max(0.0);
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - mc).abs() <= 3.0 * se,
            "mean {mean} vs MC {mc} (3se = {})",
            3.0 * se
        );
    }

    #[test]
    fn multi_qoi_rows_align() {
        let mut comp = TensorComponent::new(&[0], MultiIndex::new(vec![1]), 2);
        comp.populate(|z| Ok(vec![z[0], 10.0 + z[0]])).unwrap();
        let v = comp.eval(&[0.25]).unwrap();
        assert!((v[0] - 0.25).abs() < 1e-13);
        assert!((v[1] - 10.25).abs() < 1e-13);
        let m = comp.mean().unwrap();
        assert!(m[0].abs() < 1e-13);
        assert!((m[1] - 10.0).abs() < 1e-13);
    }
}
